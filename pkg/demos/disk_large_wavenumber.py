"""Plane-wave propagation on the unit disk at large wavenumbers.

Errors are reported against dofs per wavelength, the scale on which
different wavenumbers can be compared.  Higher degrees reach a given
accuracy with fewer dofs per wavelength; watch the error plummet once
the mesh starts resolving the oscillation.

The dof cap keeps the direct solves desk-sized; raise it (and the level
count) on machines with more memory to push closer to the accuracy
threshold at higher omega.

Run:  python3 demos/disk_large_wavenumber.py [omega] [dof_cap]
"""

import sys

from helmtrefftz.harness import RunConfig, run_experiment

omega = float(sys.argv[1]) if len(sys.argv) > 1 else 100.0
dof_cap = int(sys.argv[2]) if len(sys.argv) > 2 else 60_000
reports = run_experiment(
    RunConfig(
        experiment="planewave",
        degrees=(2, 3, 4),
        levels=10,
        omegas=(omega,),
        dof_cap=dof_cap,
        out="dofso2d.csv",
    )
)

print(f"omega = {omega:g}")
print(f"{'method':>7} {'p':>3} {'dofs':>7} {'N_lambda':>9} {'l2error':>11}")
for r in reports:
    print(f"{r.method:>7} {r.p:>3} {r.dofs:>7} {r.dofspwl:>9.2f} {r.l2error:>11.3e}")
print("rows written to dofso2d.csv")
