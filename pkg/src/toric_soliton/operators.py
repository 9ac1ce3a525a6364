"""Differential operators on torus-Fourier modes in action-angle coordinates.

A function is represented as a radial profile ``u(x)`` on the polytope
interior together with an integer mode ``k``; the represented function is
``u(x) exp(i <k, t>)``.  Phase factors are never sampled: the angular
sector acts diagonally on modes, contributing ``k^T G k`` from the second
angular derivatives and ``-2 orientation <a, k>`` from the first-order
imaginary term, so every evaluation reduces to x-space.

Sign conventions.  The plain Laplacian is the positive-spectrum operator
``-sum_ij d_i(H_ij d_j u)`` (constants are harmonic, ``x^2`` on the flat
model maps to ``-2``).  The context stores the fan-side soliton vector
``a`` (see :mod:`toric_soliton.futaki`); the drift covector on the moment
image is its negative, so the weighted Laplacian is

    Delta^{g,a} u = Delta^g u - 2 sum_ij a_i H_ij d_j u,

which makes every affine function an eigenfunction with eigenvalue two on
a soliton and keeps the solitonic spectrum 2 <alpha, a> non-negative.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import BoundaryEvaluationError, MalformedInputError
from .polytope import DelzantPolytope
from .potentials import SymplecticPotential


@dataclass(frozen=True)
class EquivariantFunction:
    """Torus mode k plus a radial profile with analytic derivatives."""

    mode: tuple[int, ...]
    value: Callable[[np.ndarray], float]
    grad: Callable[[np.ndarray], np.ndarray]
    hess: Callable[[np.ndarray], np.ndarray]

    @property
    def mode_array(self) -> np.ndarray:
        return np.array(self.mode, dtype=float)


def profile_constant(c: float, n: int, mode: tuple[int, ...] | None = None) -> EquivariantFunction:
    mode = mode if mode is not None else (0,) * n
    return EquivariantFunction(
        mode=mode,
        value=lambda x: c,
        grad=lambda x: np.zeros(n),
        hess=lambda x: np.zeros((n, n)),
    )


def profile_linear(b, constant: float = 0.0, mode: tuple[int, ...] | None = None) -> EquivariantFunction:
    """Profile <x, b> + constant, torus-invariant by default."""
    b = np.asarray(b, dtype=float)
    n = len(b)
    mode = mode if mode is not None else (0,) * n
    return EquivariantFunction(
        mode=mode,
        value=lambda x: float(b @ x) + constant,
        grad=lambda x: b.copy(),
        hess=lambda x: np.zeros((n, n)),
    )


def profile_coordinate(i: int, n: int) -> EquivariantFunction:
    b = np.zeros(n)
    b[i] = 1.0
    return profile_linear(b)


def profile_product(u: EquivariantFunction, v: EquivariantFunction) -> EquivariantFunction:
    """Product of two torus-invariant profiles."""
    if any(u.mode) or any(v.mode):
        raise MalformedInputError("profile products are defined for torus-invariant factors")
    return EquivariantFunction(
        mode=u.mode,
        value=lambda x: u.value(x) * v.value(x),
        grad=lambda x: u.grad(x) * v.value(x) + u.value(x) * v.grad(x),
        hess=lambda x: (
            u.hess(x) * v.value(x)
            + u.value(x) * v.hess(x)
            + np.outer(u.grad(x), v.grad(x))
            + np.outer(v.grad(x), u.grad(x))
        ),
    )


def profile_exp_pairing(potential: SymplecticPotential, alpha, mode: tuple[int, ...] | None = None) -> EquivariantFunction:
    """Profile exp(-<alpha, grad phi>) with derivatives through G and dG."""
    alpha = np.asarray(alpha, dtype=float)
    n = len(alpha)
    mode = mode if mode is not None else (0,) * n

    def value(x):
        return float(np.exp(-alpha @ potential.gradient(x)))

    def grad(x):
        galpha = potential.hessian(x) @ alpha
        return -galpha * value(x)

    def hess(x):
        galpha = potential.hessian(x) @ alpha
        dgalpha = np.einsum("jlk,l->jk", potential.hessian_derivative(x), alpha)
        return (np.outer(galpha, galpha) - dgalpha) * value(x)

    return EquivariantFunction(mode=mode, value=value, grad=grad, hess=hess)


@dataclass(frozen=True)
class OperatorContext:
    """Polytope, potential stack, and fan-side soliton vector."""

    polytope: DelzantPolytope
    potential: SymplecticPotential
    a: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", np.asarray(self.a, dtype=float))
        if self.a.shape != (self.polytope.dim,):
            raise MalformedInputError(f"soliton vector has shape {self.a.shape}, expected ({self.polytope.dim},)")
        # facet order may differ between equal polytopes (e.g. user input vs
        # the built-in blow-up trapezoid), so compare as sets
        same = (
            self.potential.polytope.dim == self.polytope.dim
            and frozenset(self.potential.polytope.facets) == frozenset(self.polytope.facets)
        )
        if not same:
            raise MalformedInputError("potential and context polytopes disagree")

    def require_interior(self, x) -> np.ndarray:
        return self.potential.require_interior(x)


def _divergence_term(ctx: OperatorContext, f: EquivariantFunction, x: np.ndarray) -> float:
    """sum_ij d_i(H_ij d_j u) = sum_j (sum_i dH[i,j,i]) d_j u + sum_ij H_ij d_i d_j u."""
    h = ctx.potential.inv_hessian(x)
    dh = ctx.potential.inv_hessian_derivative(x)
    du = f.grad(x)
    d2u = f.hess(x)
    return float(np.einsum("iji->j", dh) @ du + np.sum(h * d2u))


def apply_laplacian(ctx: OperatorContext, f: EquivariantFunction, x) -> complex:
    """Plain Laplacian on the mode: -div(H grad u) + (k^T G k) u."""
    x = ctx.require_interior(x)
    k = f.mode_array
    result = -_divergence_term(ctx, f, x)
    if k.any():
        g = ctx.potential.hessian(x)
        result += float(k @ g @ k) * f.value(x)
    return complex(result)


def apply_weighted_laplacian(ctx: OperatorContext, f: EquivariantFunction, x) -> complex:
    """Weighted Laplacian: plain plus the moment-image drift -2 a^T H grad u."""
    x = ctx.require_interior(x)
    h = ctx.potential.inv_hessian(x)
    drift = -2.0 * float(ctx.a @ h @ f.grad(x))
    return apply_laplacian(ctx, f, x) + drift


def apply_complex_weighted_laplacian(ctx: OperatorContext, f: EquivariantFunction, x, orientation: int = 1) -> complex:
    """Complex weighted Laplacian; orientation -1 realizes the conjugate structure.

    On mode k the angular sector contributes
    (k^T G k - 2 orientation <a, k>) u in total.
    """
    if orientation not in (1, -1):
        raise MalformedInputError(f"orientation must be +1 or -1, got {orientation}")
    x = ctx.require_interior(x)
    k = f.mode_array
    result = apply_weighted_laplacian(ctx, f, x)
    if k.any():
        result += -2.0 * orientation * float(ctx.a @ k) * f.value(x)
    return result


def product_rule_check(ctx: OperatorContext, u: EquivariantFunction, v: EquivariantFunction, x) -> float:
    """Defect of the weighted product rule for torus-invariant profiles.

    Returns Delta(uv) - v Delta u - u Delta v + 2 grad u^T H grad v,
    which vanishes identically.
    """
    x = ctx.require_interior(x)
    product = profile_product(u, v)
    h = ctx.potential.inv_hessian(x)
    lhs = apply_weighted_laplacian(ctx, product, x)
    rhs = (
        v.value(x) * apply_weighted_laplacian(ctx, u, x)
        + u.value(x) * apply_weighted_laplacian(ctx, v, x)
        - 2.0 * float(u.grad(x) @ h @ v.grad(x))
    )
    return float((lhs - rhs).real)


def gradients(ctx: OperatorContext, f: EquivariantFunction, x) -> dict[str, tuple[np.ndarray, np.ndarray]]:
    """Riemannian and symplectic gradients as (x-components, t-components)."""
    x = ctx.require_interior(x)
    k = f.mode_array
    du = f.grad(x)
    u = f.value(x)
    h = ctx.potential.inv_hessian(x)
    g = ctx.potential.hessian(x)
    dt = 1j * k * u  # angular derivatives with the phase factor set to one
    return {
        "riemannian": (h @ du, g @ dt),
        "symplectic": (-dt, du.astype(complex)),
    }


def abreu_scalar_curvature(ctx: OperatorContext, x) -> float:
    """Scalar curvature -sum_ij d^2 H_ij / dx_i dx_j."""
    x = ctx.require_interior(x)
    d2h = ctx.potential.inv_hessian_second(x)
    return float(-np.einsum("ijij->", d2h))


def ricci_and_lie_components(ctx: OperatorContext, x) -> tuple[np.ndarray, np.ndarray]:
    """Ricci components and the Lie-derivative components of the soliton field.

    Ric[k, l] = -(1/2) sum_i d^2 H_li / dx_i dx_k; the Lie components use
    the moment-image drift covector (-a), which makes the soliton identity
    Ric - Lie = identity hold with the fan-side vector stored in the context.
    """
    x = ctx.require_interior(x)
    dh = ctx.potential.inv_hessian_derivative(x)
    d2h = ctx.potential.inv_hessian_second(x)
    ric = -0.5 * np.einsum("liik->kl", d2h)
    lie = np.einsum("i,ilk->kl", ctx.a, dh)
    return ric, lie


def soliton_residual(ctx: OperatorContext, x, scal_mean: float) -> float:
    """Pointwise defect Scal(x) - scal_mean + 2 Delta^g <x, a> of the soliton equation."""
    x = ctx.require_interior(x)
    dh = ctx.potential.inv_hessian_derivative(x)
    laplacian_linear = -float(np.einsum("iji->j", dh) @ ctx.a)
    return abreu_scalar_curvature(ctx, x) - scal_mean + 2.0 * laplacian_linear


# -- finite-difference oracle ------------------------------------------------


def _fd_metric(ctx: OperatorContext, y: np.ndarray, h: float) -> tuple[np.ndarray, np.ndarray]:
    """(G, H) at y from potential values only, by nested central differences."""
    phi = ctx.potential.value
    n = len(y)
    g = np.zeros((n, n))
    base = phi(y)
    for i in range(n):
        ei = np.zeros(n)
        ei[i] = h
        g[i, i] = (phi(y + ei) - 2.0 * base + phi(y - ei)) / h**2
        for j in range(i + 1, n):
            ej = np.zeros(n)
            ej[j] = h
            mixed = (phi(y + ei + ej) - phi(y + ei - ej) - phi(y - ei + ej) + phi(y - ei - ej)) / (4.0 * h**2)
            g[i, j] = g[j, i] = mixed
    return g, np.linalg.inv(g)


def _fd_step(ctx: OperatorContext, x: np.ndarray, factor: float) -> float:
    norms = np.linalg.norm(ctx.polytope.normal_matrix, axis=1)
    distances = ctx.polytope.facet_values(x) / norms
    step = factor * float(distances.min())
    if step <= 0.0:
        raise BoundaryEvaluationError("finite-difference step underflow near the boundary")
    return step


def finite_difference_oracle(ctx: OperatorContext, f: EquivariantFunction, x, operator: str,
                             step: float | None = None) -> complex:
    """Re-evaluate an operator using only potential values and profile values.

    Independent of the analytic derivative stack: the metric comes from
    nested central differences of phi, the profile derivatives from central
    differences of u.  Supported operators: ``laplacian``, ``weighted``,
    ``complex+``, ``complex-``, ``abreu`` (which ignores f).
    """
    x = ctx.require_interior(np.asarray(x, dtype=float))
    n = len(x)

    if operator == "abreu":
        h3 = step if step is not None else _fd_step(ctx, x, 0.02)
        total = 0.0
        for i in range(n):
            for j in range(n):
                ei = np.zeros(n)
                ei[i] = h3
                ej = np.zeros(n)
                ej[j] = h3
                if i == j:
                    entries = [
                        _fd_metric(ctx, x + ei, h3)[1][i, j],
                        _fd_metric(ctx, x, h3)[1][i, j],
                        _fd_metric(ctx, x - ei, h3)[1][i, j],
                    ]
                    total += (entries[0] - 2.0 * entries[1] + entries[2]) / h3**2
                else:
                    total += (
                        _fd_metric(ctx, x + ei + ej, h3)[1][i, j]
                        - _fd_metric(ctx, x + ei - ej, h3)[1][i, j]
                        - _fd_metric(ctx, x - ei + ej, h3)[1][i, j]
                        + _fd_metric(ctx, x - ei - ej, h3)[1][i, j]
                    ) / (4.0 * h3**2)
        return complex(-total)

    if operator not in ("laplacian", "weighted", "complex+", "complex-"):
        raise MalformedInputError(f"unknown operator id {operator!r}")

    h = step if step is not None else _fd_step(ctx, x, 0.005)

    def grad_u(y: np.ndarray) -> np.ndarray:
        out = np.zeros(n)
        for j in range(n):
            ej = np.zeros(n)
            ej[j] = h
            out[j] = (f.value(y + ej) - f.value(y - ej)) / (2.0 * h)
        return out

    def flux(y: np.ndarray) -> np.ndarray:
        return _fd_metric(ctx, y, h)[1] @ grad_u(y)

    divergence = 0.0
    for i in range(n):
        ei = np.zeros(n)
        ei[i] = h
        divergence += (flux(x + ei)[i] - flux(x - ei)[i]) / (2.0 * h)

    g_fd, h_fd = _fd_metric(ctx, x, h)
    result = -divergence
    k = f.mode_array
    u = f.value(x)
    if k.any():
        result += float(k @ g_fd @ k) * u
    if operator in ("weighted", "complex+", "complex-"):
        result += -2.0 * float(ctx.a @ h_fd @ grad_u(x))
    if operator == "complex+" and k.any():
        result += -2.0 * float(ctx.a @ k) * u
    if operator == "complex-" and k.any():
        result += 2.0 * float(ctx.a @ k) * u
    return complex(result)
