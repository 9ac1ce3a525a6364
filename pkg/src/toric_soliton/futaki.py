"""Soliton vector from the vanishing of the weighted affine moments.

Sign convention.  The input polytope is the moment image P; the fan-side
(algebraic) polytope is its reflection -P.  The soliton vector reported
here is the fan-side one: it is the unique minimizer of the strictly
convex functional

    W(a) = integral over P of exp(+2 <a, x>) dv
         = integral over -P of exp(-2 <a, x>) dv,

so the vanishing gradient is the weighted-moment condition on the
fan-side polytope.  With this convention the nonzero pairings
2 <alpha, a> with the Demazure roots are non-negative (the solitonic
spectrum is positive), and for the blown-up plane the first component of
``a`` is the negative root of the one-point blow-up transcendental
equation (see :mod:`toric_soliton.calabi`).  The moment-image drift
covector used by the differential operators is ``-a``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NonConvergenceError
from .polytope import DelzantPolytope, normalize_algebraic
from .quadrature import integrate, integrate_vector

MAX_NEWTON_ITERATIONS = 60
MAX_QUADRATURE_ORDER = 40


@dataclass(frozen=True)
class SolitonData:
    """Solved soliton vector with Einstein constant and diagnostics."""

    a: tuple[float, ...]
    lam: float
    futaki_residual: float
    residuals: tuple[float, ...]
    iterations: tuple[dict, ...]
    quadrature_order: int

    @property
    def a_array(self) -> np.ndarray:
        return np.array(self.a)


def weighted_volume(p: DelzantPolytope, a, order: int = 10) -> tuple[float, np.ndarray, np.ndarray]:
    """V(a) = int_P exp(-2<a,x>) dv with gradient and Hessian in a.

    Returns (V, grad V, hess V) where grad V = -2 int x w dv and
    hess V = 4 int x x^T w dv; the Hessian is a Gram matrix of the
    coordinates and therefore symmetric positive definite.
    """
    a = np.asarray(a, dtype=float)
    n = p.dim

    def packed(pts: np.ndarray) -> np.ndarray:
        w = np.exp(-2.0 * (pts @ a))
        cols = [w]
        cols.extend(-2.0 * pts[:, i] * w for i in range(n))
        for i in range(n):
            for j in range(n):
                cols.append(4.0 * pts[:, i] * pts[:, j] * w)
        return np.stack(cols, axis=1)

    moments = integrate_vector(p, packed, 1 + n + n * n, order=order)
    value = float(moments[0])
    grad = moments[1 : 1 + n]
    hess = moments[1 + n :].reshape(n, n)
    return value, grad, hess


def _fan_side_volume(p: DelzantPolytope, a, order: int) -> tuple[float, np.ndarray, np.ndarray]:
    # W(a) = V(-a); chain rule flips the gradient and preserves the Hessian.
    value, grad, hess = weighted_volume(p, -np.asarray(a, dtype=float), order=order)
    return value, -grad, hess


def _newton_minimize(p: DelzantPolytope, a0: np.ndarray, tol: float, order: int,
                     trace: list[dict]) -> np.ndarray:
    a = a0.copy()
    for iteration in range(MAX_NEWTON_ITERATIONS):
        value, grad, hess = _fan_side_volume(p, a, order)
        grad_norm = float(np.linalg.norm(grad))
        trace.append({
            "iteration": iteration,
            "order": order,
            "volume": value,
            "grad_norm": grad_norm,
            "a": tuple(float(c) for c in a),
        })
        if grad_norm / value <= tol:
            break
        eigenvalues = np.linalg.eigvalsh(hess)
        if eigenvalues[0] <= 0:
            raise NonConvergenceError("weighted-volume Hessian lost positive definiteness")
        step = np.linalg.solve(hess, -grad)
        t = 1.0
        while t > 1e-12:
            candidate = a + t * step
            if _fan_side_volume(p, candidate, order)[0] < value:
                break
            t *= 0.5
        else:
            raise NonConvergenceError("damping underflow in Newton line search")
        a = a + t * step
    else:
        raise NonConvergenceError(f"no convergence after {MAX_NEWTON_ITERATIONS} Newton iterations")
    # Quadratic polish to the quadrature noise floor, so that minimizers at
    # successive orders can be compared well below the user tolerance.
    for _ in range(3):
        _, grad, hess = _fan_side_volume(p, a, order)
        grad_norm = float(np.linalg.norm(grad))
        if grad_norm == 0.0:
            break
        candidate = a + np.linalg.solve(hess, -grad)
        if float(np.linalg.norm(_fan_side_volume(p, candidate, order)[1])) < grad_norm:
            a = candidate
        else:
            break
    return a


def solve_soliton_vector(p: DelzantPolytope, tol: float = 1e-10, order: int = 10) -> SolitonData:
    """Solve the weighted-moment condition for the soliton vector.

    Non-algebraic input is normalized first.  Newton iteration starts at
    zero with step halving; the quadrature order is raised until two
    successive orders agree to 0.1 tol.  Existence and uniqueness hold for
    any valid Fano input, so non-convergence signals numerical trouble.
    """
    p = normalize_algebraic(p)
    trace: list[dict] = []
    a = _newton_minimize(p, np.zeros(p.dim), tol, order, trace)
    cap = max(MAX_QUADRATURE_ORDER, order + 12)
    while order + 6 <= cap:
        refined = _newton_minimize(p, a, tol, order + 6, trace)
        if np.max(np.abs(refined - a)) <= 0.1 * tol:
            a = refined
            order = order + 6
            break
        a, order = refined, order + 6
    else:
        raise NonConvergenceError("quadrature orders failed to agree at the maximum order")

    value, grad, _ = _fan_side_volume(p, a, order)
    # Defect of the weighted-moment condition over the affine basis {1, x_1..x_n}:
    # the constant is exact, each coordinate defect is |int x_i w| / V = |grad_i| / (2V).
    residuals = (0.0,) + tuple(float(abs(g)) / (2.0 * value) for g in grad)
    return SolitonData(
        a=tuple(float(c) for c in a),
        lam=1.0,
        futaki_residual=max(residuals),
        residuals=residuals,
        iterations=tuple(trace),
        quadrature_order=order,
    )


def einstein_constant(scal_mean: float, n: int) -> float:
    """Einstein constant from the mean scalar curvature: scal_mean / (2n)."""
    return scal_mean / (2.0 * n)
