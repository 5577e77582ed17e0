"""h-refinement study on the unit square against a radiating wave.

The exact solution is the order-zero outgoing cylindrical wave centered
at (-0.25, 0), a smooth but genuinely oscillatory Helmholtz field at
omega = 10.  Both the embedded Trefftz solver and the standard DG solver
run on the same refinement ladder; the summary table shows the expected
orders p (DG norm) and p+1 (L2 norm).

Run:  python3 demos/hankel_h_convergence.py [levels]
"""

import sys

from helmtrefftz.harness import RunConfig, run_experiment, summarize

levels = int(sys.argv[1]) if len(sys.argv) > 1 else 3
config = RunConfig(
    experiment="hankel",
    degrees=(3, 4, 5),
    levels=levels,
    out="hankel2d.csv",
)
reports = run_experiment(config)
print(summarize(reports))
print(f"{len(reports)} rows written to hankel2d.csv")
