"""Shared fixtures-in-spirit: projections and manufactured polynomial data."""

import numpy as np
import sympy

from helmtrefftz.polyspace import (
    _monomial_tables,
    map_rule_to_triangle,
    quadrature_rule,
)


def zero_f(pts):
    return np.zeros(pts.shape[:-1], dtype=complex)


def zero_g(pts, normals):
    return np.zeros(pts.shape[:-1], dtype=complex)


def project(mesh, p, func):
    """Per-element L2 projection onto the broken degree-p space."""
    pts, w = map_rule_to_triangle(quadrature_rule(min(2 * p + 2, 30)), mesh.tri_coords)
    ev = _monomial_tables(mesh.incenters, mesh.diameters, p, pts)
    gram = np.einsum("eqi,eqj,eq->eij", ev.values, ev.values, w)
    rhs = np.einsum("eqi,eq->ei", ev.values, func(pts) * w)
    return np.linalg.solve(gram, rhs[..., None])[..., 0].ravel().astype(complex)


def polynomial_problem(p, omega):
    """Continuous polynomial solution with matching source and impedance data."""
    x, y = sympy.symbols("x y")
    u = (x + 2 * y) ** p + x * y
    f = -sympy.diff(u, x, 2) - sympy.diff(u, y, 2) - omega**2 * u
    lam = lambda e: sympy.lambdify((x, y), e, "numpy")
    uf, ff = lam(u), lam(f)
    gxf, gyf = lam(sympy.diff(u, x)), lam(sympy.diff(u, y))

    def u_cb(pts):
        return np.asarray(uf(pts[..., 0], pts[..., 1]), dtype=complex) * np.ones(
            pts.shape[:-1]
        )

    def f_cb(pts):
        return np.asarray(ff(pts[..., 0], pts[..., 1]), dtype=complex) * np.ones(
            pts.shape[:-1]
        )

    def g_cb(pts, normals):
        grad = np.stack(
            [
                gxf(pts[..., 0], pts[..., 1]) * np.ones(pts.shape[:-1]),
                gyf(pts[..., 0], pts[..., 1]) * np.ones(pts.shape[:-1]),
            ],
            axis=-1,
        )
        return np.einsum("...d,...d->...", grad, normals) + 1j * omega * u_cb(pts)

    return u_cb, f_cb, g_cb
