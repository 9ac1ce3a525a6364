"""Symplectic potentials and their derivative stacks.

Every differential operator in this package consumes a potential only
through one verification surface: the gradient, the Hessian ``G``, its
inverse ``H``, and the first and second derivatives of ``H``.  Two
families implement it:

* potentials given on the convex-function side (Guillemin, smooth
  perturbations, quadratic models) supply ``G`` and its derivatives
  analytically and derive the ``H`` stack by matrix calculus;
* metrics given on the inverse side (the one-point blow-up family in
  :mod:`toric_soliton.calabi`) supply ``H`` analytically and recover the
  gradient by a line integral of ``G``, with the gauge fixed to zero at a
  chosen interior base point.  The gauge shifts affine data only and is
  harmless to every verification performed here.

Index conventions: ``dG[i, j, k] = d G_ij / d x_k`` and
``d2H[i, j, k, l] = d^2 H_ij / d x_k d x_l``.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import BoundaryEvaluationError, LossOfConvexityError
from .polytope import DelzantPolytope

#: points with any facet value at or below this are treated as boundary
BOUNDARY_TOL = 1e-12


class SymplecticPotential(ABC):
    """Evaluable potential exposing the full derivative stack at interior points."""

    polytope: DelzantPolytope

    def require_interior(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        values = self.polytope.facet_values(x)
        if float(values.min()) <= BOUNDARY_TOL:
            raise BoundaryEvaluationError(f"point {tuple(x)} is not interior (min facet value {values.min():.3e})")
        return x

    @abstractmethod
    def value(self, x) -> float: ...

    @abstractmethod
    def gradient(self, x) -> np.ndarray: ...

    @abstractmethod
    def hessian(self, x) -> np.ndarray: ...

    @abstractmethod
    def hessian_derivative(self, x) -> np.ndarray: ...

    @abstractmethod
    def inv_hessian(self, x) -> np.ndarray: ...

    @abstractmethod
    def inv_hessian_derivative(self, x) -> np.ndarray: ...

    @abstractmethod
    def inv_hessian_second(self, x) -> np.ndarray: ...


class PhiSidePotential(SymplecticPotential):
    """Stack driven by analytic G, dG, d2G; the H side is derived."""

    @abstractmethod
    def hessian_second(self, x) -> np.ndarray:
        """Second derivatives of G entries, shape (n, n, n, n)."""

    def inv_hessian(self, x) -> np.ndarray:
        return np.linalg.inv(self.hessian(x))

    def inv_hessian_derivative(self, x) -> np.ndarray:
        h = self.inv_hessian(x)
        dg = self.hessian_derivative(x)
        return -np.einsum("ia,abk,bj->ijk", h, dg, h)

    def inv_hessian_second(self, x) -> np.ndarray:
        h = self.inv_hessian(x)
        dg = self.hessian_derivative(x)
        d2g = self.hessian_second(x)
        dh = -np.einsum("ia,abk,bj->ijk", h, dg, h)
        term1 = np.einsum("ial,abk,bj->ijkl", dh, dg, h)
        term2 = np.einsum("ia,abkl,bj->ijkl", h, d2g, h)
        term3 = np.einsum("ia,abk,bjl->ijkl", h, dg, dh)
        return -(term1 + term2 + term3)


class GuilleminPotential(PhiSidePotential):
    """Canonical potential (1/2) sum_r L_r log L_r with analytic derivatives."""

    def __init__(self, polytope: DelzantPolytope):
        self.polytope = polytope
        self._normals = polytope.normal_matrix  # (d, n)

    def _facet_values(self, x: np.ndarray) -> np.ndarray:
        x = self.require_interior(x)
        return self.polytope.facet_values(x)

    def value(self, x) -> float:
        ell = self._facet_values(x)
        return 0.5 * float(np.sum(ell * np.log(ell)))

    def gradient(self, x) -> np.ndarray:
        ell = self._facet_values(x)
        return 0.5 * ((1.0 + np.log(ell)) @ self._normals)

    def hessian(self, x) -> np.ndarray:
        ell = self._facet_values(x)
        return 0.5 * np.einsum("ri,rj,r->ij", self._normals, self._normals, 1.0 / ell)

    def hessian_derivative(self, x) -> np.ndarray:
        ell = self._facet_values(x)
        return -0.5 * np.einsum("ri,rj,rk,r->ijk", self._normals, self._normals, self._normals, ell**-2)

    def hessian_second(self, x) -> np.ndarray:
        ell = self._facet_values(x)
        return np.einsum("ri,rj,rk,rl,r->ijkl", self._normals, self._normals, self._normals, self._normals, ell**-3)


def _zeros_third(x: np.ndarray) -> np.ndarray:
    n = len(x)
    return np.zeros((n, n, n))


def _zeros_fourth(x: np.ndarray) -> np.ndarray:
    n = len(x)
    return np.zeros((n, n, n, n))


@dataclass(frozen=True)
class SmoothField:
    """Smooth scalar field with derivatives, restriction of a function smooth near P."""

    value: Callable[[np.ndarray], float]
    gradient: Callable[[np.ndarray], np.ndarray]
    hessian: Callable[[np.ndarray], np.ndarray]
    third: Callable[[np.ndarray], np.ndarray] = _zeros_third
    fourth: Callable[[np.ndarray], np.ndarray] = _zeros_fourth

    @staticmethod
    def quadratic(q: np.ndarray) -> "SmoothField":
        """h(x) = (1/2) x^T q x."""
        q = 0.5 * (np.asarray(q, dtype=float) + np.asarray(q, dtype=float).T)
        return SmoothField(
            value=lambda x: 0.5 * float(x @ q @ x),
            gradient=lambda x: q @ x,
            hessian=lambda x: q.copy(),
        )

    @staticmethod
    def affine(c: np.ndarray, constant: float = 0.0) -> "SmoothField":
        c = np.asarray(c, dtype=float)
        n = len(c)
        return SmoothField(
            value=lambda x: float(c @ x) + constant,
            gradient=lambda x: c.copy(),
            hessian=lambda x: np.zeros((n, n)),
        )


class PerturbedPotential(PhiSidePotential):
    """Base potential plus a smooth field; the stacks add entrywise."""

    def __init__(self, base: PhiSidePotential, h: SmoothField, convexity_samples: int = 9):
        self.polytope = base.polytope
        self.base = base
        self.h = h
        for pt in self.polytope.interior_grid(convexity_samples, margin_fraction=0.05):
            g = base.hessian(pt) + h.hessian(np.asarray(pt))
            if np.linalg.eigvalsh(g)[0] <= 0.0:
                raise LossOfConvexityError(f"perturbed Hessian not positive definite at {tuple(pt)}")

    def value(self, x) -> float:
        x = self.require_interior(x)
        return self.base.value(x) + float(self.h.value(x))

    def gradient(self, x) -> np.ndarray:
        x = self.require_interior(x)
        return self.base.gradient(x) + np.asarray(self.h.gradient(x), dtype=float)

    def hessian(self, x) -> np.ndarray:
        x = self.require_interior(x)
        return self.base.hessian(x) + np.asarray(self.h.hessian(x), dtype=float)

    def hessian_derivative(self, x) -> np.ndarray:
        x = self.require_interior(x)
        return self.base.hessian_derivative(x) + np.asarray(self.h.third(x), dtype=float)

    def hessian_second(self, x) -> np.ndarray:
        x = self.require_interior(x)
        return self.base.hessian_second(x) + np.asarray(self.h.fourth(x), dtype=float)


class QuadraticPotential(PhiSidePotential):
    """phi = (1/2) x^T M x; the flat model when M is the identity."""

    def __init__(self, polytope: DelzantPolytope, matrix: np.ndarray | None = None):
        self.polytope = polytope
        n = polytope.dim
        m = np.eye(n) if matrix is None else np.asarray(matrix, dtype=float)
        if np.linalg.eigvalsh(0.5 * (m + m.T))[0] <= 0.0:
            raise LossOfConvexityError("quadratic potential requires a positive definite matrix")
        self._matrix = 0.5 * (m + m.T)

    def value(self, x) -> float:
        x = self.require_interior(x)
        return 0.5 * float(x @ self._matrix @ x)

    def gradient(self, x) -> np.ndarray:
        x = self.require_interior(x)
        return self._matrix @ x

    def hessian(self, x) -> np.ndarray:
        self.require_interior(x)
        return self._matrix.copy()

    def hessian_derivative(self, x) -> np.ndarray:
        self.require_interior(x)
        n = self.polytope.dim
        return np.zeros((n, n, n))

    def hessian_second(self, x) -> np.ndarray:
        self.require_interior(x)
        n = self.polytope.dim
        return np.zeros((n, n, n, n))


class HSidePotential(SymplecticPotential):
    """Stack driven by analytic H, dH, d2H; gradient recovered by line integral."""

    #: base point for the gradient gauge; subclasses set it to an interior point
    base_point: np.ndarray

    @abstractmethod
    def inv_hessian(self, x) -> np.ndarray: ...

    @abstractmethod
    def inv_hessian_derivative(self, x) -> np.ndarray: ...

    @abstractmethod
    def inv_hessian_second(self, x) -> np.ndarray: ...

    def hessian(self, x) -> np.ndarray:
        return np.linalg.inv(self.inv_hessian(x))

    def hessian_derivative(self, x) -> np.ndarray:
        g = self.hessian(x)
        dh = self.inv_hessian_derivative(x)
        return -np.einsum("ia,abk,bj->ijk", g, dh, g)

    def __init_cache(self) -> dict:
        cache = getattr(self, "_gradient_cache", None)
        if cache is None:
            cache = {}
            self._gradient_cache = cache
        return cache

    def gradient(self, x) -> np.ndarray:
        x = self.require_interior(x)
        cache = self.__init_cache()
        key = x.tobytes()
        if key not in cache:
            cache[key] = gradient_by_line_integral(self.hessian, x, self.base_point, polytope=self.polytope)
        return cache[key].copy()

    def value(self, x) -> float:
        # Gauge phi(base) = 0; nested line integral of the recovered gradient.
        x = self.require_interior(x)
        x0 = np.asarray(self.base_point, dtype=float)
        direction = x - x0

        def directional(s: float) -> float:
            return float(self.gradient(x0 + s * direction) @ direction)

        return _adaptive_scalar_integral(directional)


def _gauss_panels(fun: Callable[[np.ndarray], np.ndarray], panels: int, nodes: int = 16):
    """Composite Gauss-Legendre of a vector-valued function over [0, 1]."""
    xs, ws = np.polynomial.legendre.leggauss(nodes)
    total = None
    for k in range(panels):
        lo, hi = k / panels, (k + 1) / panels
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        for xi, wi in zip(xs, ws):
            contribution = (wi * half) * np.asarray(fun(mid + half * xi))
            total = contribution if total is None else total + contribution
    return total


def _adaptive_scalar_integral(fun: Callable[[float], float], rtol: float = 1e-12) -> float:
    previous = _gauss_panels(lambda s: np.array([fun(float(s))]), 1)
    for level in range(1, 8):
        current = _gauss_panels(lambda s: np.array([fun(float(s))]), 2**level)
        if np.max(np.abs(current - previous)) <= rtol * (1.0 + np.max(np.abs(current))):
            return float(current[0])
        previous = current
    return float(previous[0])


def gradient_by_line_integral(
    hessian_field: Callable[[np.ndarray], np.ndarray],
    x,
    x0,
    rtol: float = 1e-12,
    max_doublings: int = 10,
    polytope: DelzantPolytope | None = None,
) -> np.ndarray:
    """Recover grad phi(x) - grad phi(x0) from the Hessian field alone.

    Integrates G(x0 + s (x - x0)) (x - x0) over s in [0, 1] with composite
    Gauss-Legendre panels, doubling the panel count until the result is
    stable to ``rtol``.  The segment must stay interior when a polytope is
    supplied.
    """
    x = np.asarray(x, dtype=float)
    x0 = np.asarray(x0, dtype=float)
    direction = x - x0
    if np.allclose(direction, 0.0):
        return np.zeros_like(x)
    if polytope is not None:
        for s in np.linspace(0.0, 1.0, 33):
            point = x0 + s * direction
            if not polytope.is_interior(point, margin=0.0):
                raise BoundaryEvaluationError(f"segment leaves the interior at {tuple(point)}")

    def integrand(s: np.ndarray) -> np.ndarray:
        return hessian_field(x0 + float(s) * direction) @ direction

    previous = _gauss_panels(integrand, 1)
    for level in range(1, max_doublings + 1):
        current = _gauss_panels(integrand, 2**level)
        if np.max(np.abs(current - previous)) <= rtol * (1.0 + np.max(np.abs(current))):
            return current
        previous = current
    return previous


def guillemin(p: DelzantPolytope) -> GuilleminPotential:
    """The canonical potential of a Delzant polytope."""
    return GuilleminPotential(p)


def perturbed(base: PhiSidePotential, h: SmoothField) -> PerturbedPotential:
    """Base potential plus a smooth field, with a strict-convexity check."""
    return PerturbedPotential(base, h)
