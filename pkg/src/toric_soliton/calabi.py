"""Closed-form soliton metric on the plane blown up at a point.

The moment image is a trapezoid, the diffeomorphic image of a rectangle
[alpha1, alpha2] x [beta1, beta2] under (x, y) -> (x, x y).  The metric is
separable in the rectangle coordinates with radial profiles A and B; the
matrix ``H`` of the associated potential is assembled from them and all
its derivatives are analytic, so every operator check on this example
runs with exact formulas (finite differences stay available as an
independent cross-check).

Two sign wrinkles are resolved here once and for all:

* the mean scalar curvature of the blow-up family is +4 (the value forced
  by the Einstein-constant normalization lambda = 1 in real dimension 4);
  a printed value of -4 floating around for this family is inconsistent
  with that normalization and is flagged in reports;
* the boundary slope conditions A'(alpha_i) = 2 / C_alpha_i hold with
  sign on the A side, while on the B side only the magnitudes
  |B'(beta_i)| = |2 / C_beta_i| are convention independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BoundaryEvaluationError, MalformedInputError, NonConvergenceError
from .polytope import DelzantPolytope, Facet
from .potentials import HSidePotential

#: translation taking the trapezoid tau to algebraic coordinates
ALGEBRAIC_SHIFT = np.array([2.0, 1.0])

#: default solver bracket for the nonzero soliton coefficient
DEFAULT_BRACKET = (-0.5, -0.05)


def blowup_trapezoid() -> DelzantPolytope:
    """The algebraic trapezoid of the one-point blow-up of the plane."""
    from fractions import Fraction

    one = Fraction(1)
    return DelzantPolytope(2, [
        Facet((0, 1), one),
        Facet((-1, 0), one),
        Facet((1, 0), one),
        Facet((1, -1), one),
    ])


@dataclass(frozen=True)
class CalabiParameters:
    """Interval endpoints and normal scalings of a labelled Calabi trapezoid."""

    alpha1: float
    alpha2: float
    beta1: float
    beta2: float
    c_alpha1: float
    c_alpha2: float
    c_beta1: float
    c_beta2: float

    def __post_init__(self) -> None:
        if not self.alpha1 > 0:
            raise MalformedInputError(f"alpha1 must be positive, got {self.alpha1}")
        if not self.beta1 >= 0:
            raise MalformedInputError(f"beta1 must be non-negative, got {self.beta1}")
        if not (self.alpha2 > self.alpha1 and self.beta2 > self.beta1):
            raise MalformedInputError("interval endpoints must be increasing")
        if not (self.c_alpha1 > 0 and self.c_alpha2 < 0 and self.c_beta1 < 0 and self.c_beta2 > 0):
            raise MalformedInputError("normal scalings must have signs (+, -, -, +)")

    @staticmethod
    def blow_up() -> "CalabiParameters":
        return CalabiParameters(1.0, 3.0, 0.0, 1.0, 1.0, -1.0 / 3.0, -1.0, 1.0)

    def is_blow_up(self) -> bool:
        reference = CalabiParameters.blow_up()
        return all(
            math.isclose(getattr(self, name), getattr(reference, name), abs_tol=1e-12)
            for name in ("alpha1", "alpha2", "beta1", "beta2", "c_alpha1", "c_alpha2", "c_beta1", "c_beta2")
        )


def m_constant(params: CalabiParameters) -> float:
    """The constant m = (2/C_beta1 - 2/C_beta2) / (beta2 - beta1)."""
    return (2.0 / params.c_beta1 - 2.0 / params.c_beta2) / (params.beta2 - params.beta1)


def mean_scalar_curvature(params: CalabiParameters) -> float:
    """Mean scalar curvature of the labelled trapezoid family."""
    alpha_part = (1.0 / params.c_alpha1 - 1.0 / params.c_alpha2) / (params.alpha2 - params.alpha1)
    beta_part = (1.0 / params.c_beta1 - 1.0 / params.c_beta2) / (params.beta2 - params.beta1)
    return 4.0 / (params.alpha1 + params.alpha2) * (alpha_part - beta_part)


def soliton_equation(a1: float) -> float:
    """Transcendental equation whose nonzero root is the soliton coefficient."""
    return (a1 * a1 - 0.5) * math.exp(-4.0 * a1) + 3.0 * a1 * a1 - 2.0 * a1 + 0.5


def _soliton_equation_derivative(a1: float) -> float:
    e = math.exp(-4.0 * a1)
    return (2.0 * a1 - 4.0 * (a1 * a1 - 0.5)) * e + 6.0 * a1 - 2.0


def solve_a1(params: CalabiParameters, bracket: tuple[float, float] = DEFAULT_BRACKET) -> float:
    """Nonzero root of the soliton equation by bisection plus Newton polish.

    ``a1 = 0`` also satisfies the equation and is rejected; the bracket
    must produce a sign change away from zero.
    """
    if not params.is_blow_up():
        raise MalformedInputError("the closed-form soliton equation is specific to the blow-up parameters")
    lo, hi = bracket
    flo, fhi = soliton_equation(lo), soliton_equation(hi)
    if flo == 0.0:
        root = lo
    elif fhi == 0.0:
        root = hi
    elif flo * fhi > 0.0:
        raise NonConvergenceError(f"no sign change of the soliton equation on [{lo}, {hi}]")
    else:
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            fmid = soliton_equation(mid)
            if fmid == 0.0:
                break
            if flo * fmid < 0.0:
                hi, fhi = mid, fmid
            else:
                lo, flo = mid, fmid
            if hi - lo < 1e-14:
                break
        root = 0.5 * (lo + hi)
    for _ in range(50):
        residual = soliton_equation(root)
        if abs(residual) <= 1e-13:
            break
        root -= residual / _soliton_equation_derivative(root)
    if abs(soliton_equation(root)) > 1e-12:
        raise NonConvergenceError("Newton polish of the soliton coefficient failed")
    if abs(root) < 1e-6:
        raise NonConvergenceError("bracket collapsed onto the trivial root a1 = 0")
    return root


@dataclass(frozen=True)
class CalabiSoliton:
    """Solved blow-up soliton: parameters, coefficient, m, and mean curvature."""

    params: CalabiParameters
    a1: float
    m: float
    scal_mean: float

    @staticmethod
    def solve(params: CalabiParameters | None = None) -> "CalabiSoliton":
        params = params or CalabiParameters.blow_up()
        a1 = solve_a1(params)
        return CalabiSoliton(params=params, a1=a1, m=m_constant(params), scal_mean=mean_scalar_curvature(params))

    @property
    def a(self) -> np.ndarray:
        """Soliton vector in the fan-side convention, (a1, 0)."""
        return np.array([self.a1, 0.0])


def profile_A(s: CalabiSoliton, x: float) -> tuple[float, float, float]:
    """Radial profile A with first and second derivatives, on [alpha1, alpha2]."""
    if not (s.params.alpha1 - 1e-12 <= x <= s.params.alpha2 + 1e-12):
        raise BoundaryEvaluationError(f"x = {x} outside [{s.params.alpha1}, {s.params.alpha2}]")
    a = s.a1
    if a == 0.0:
        raise MalformedInputError("profile requires a nonzero soliton coefficient")
    e = math.exp(-2.0 * a * (x - 1.0))
    c = a * a - 0.5
    scale = -1.0 / a**3
    value = scale * (c * e + a * a * x * x - (2.0 * a * a + a) * x + (a + 0.5))
    first = scale * (-2.0 * a * c * e + 2.0 * a * a * x - (2.0 * a * a + a))
    second = scale * (4.0 * a * a * c * e + 2.0 * a * a)
    return value, first, second


def profile_B(s: CalabiSoliton, y: float) -> tuple[float, float, float]:
    """Radial profile B(y) = -2 y^2 + 2 y with derivatives, on [beta1, beta2]."""
    if not (s.params.beta1 - 1e-12 <= y <= s.params.beta2 + 1e-12):
        raise BoundaryEvaluationError(f"y = {y} outside [{s.params.beta1}, {s.params.beta2}]")
    return -2.0 * y * y + 2.0 * y, -4.0 * y + 2.0, -4.0


def ode_residual(s: CalabiSoliton, x: float, scal_mean: float | None = None) -> float:
    """Defect of -A'' - 2 a1 A' - x scal_mean = m at the point x."""
    scal = s.scal_mean if scal_mean is None else scal_mean
    _, first, second = profile_A(s, x)
    return -second - 2.0 * s.a1 * first - x * scal - s.m


def boundary_residuals(s: CalabiSoliton) -> dict[str, float]:
    """Boundary interlocks of the closed forms (values and slope magnitudes)."""
    p = s.params
    a_lo = profile_A(s, p.alpha1)
    a_hi = profile_A(s, p.alpha2)
    b_lo = profile_B(s, p.beta1)
    b_hi = profile_B(s, p.beta2)
    return {
        "A_alpha1": abs(a_lo[0]),
        "A_alpha2": abs(a_hi[0]),
        "B_beta1": abs(b_lo[0]),
        "B_beta2": abs(b_hi[0]),
        "slope_A_alpha1": abs(a_lo[1] - 2.0 / p.c_alpha1),
        "slope_A_alpha2_magnitude": abs(abs(a_hi[1]) - abs(2.0 / p.c_alpha2)),
        "slope_B_beta1_magnitude": abs(abs(b_lo[1]) - abs(2.0 / p.c_beta1)),
        "slope_B_beta2_magnitude": abs(abs(b_hi[1]) - abs(2.0 / p.c_beta2)),
    }


def to_algebraic_coordinates(mu) -> np.ndarray:
    """Translate a point of the trapezoid tau to algebraic coordinates."""
    return np.asarray(mu, dtype=float) - ALGEBRAIC_SHIFT


def from_algebraic_coordinates(x) -> np.ndarray:
    return np.asarray(x, dtype=float) + ALGEBRAIC_SHIFT


@dataclass(frozen=True)
class MetricMatrices:
    """H with its first and second derivative tensors at one point."""

    h: np.ndarray
    dh: np.ndarray
    d2h: np.ndarray


def _entry_partials(s: CalabiSoliton, mu: np.ndarray) -> MetricMatrices:
    x = float(mu[0])
    y = float(mu[1]) / x
    a_val, a1d, a2d = profile_A(s, x)
    b_val, b1d, b2d = profile_B(s, y)

    # (f, f_x, f_y, f_xx, f_xy, f_yy) per entry in the rectangle coordinates
    ax = a1d / x - a_val / x**2
    axx = a2d / x - 2.0 * a1d / x**2 + 2.0 * a_val / x**3
    entries = {
        (0, 0): (a_val / x, ax, 0.0, axx, 0.0, 0.0),
        (0, 1): (y * a_val / x, y * ax, a_val / x, y * axx, ax, 0.0),
        (1, 1): (
            x * b_val + y * y * a_val / x,
            b_val + y * y * ax,
            x * b1d + 2.0 * y * a_val / x,
            y * y * axx,
            b1d + 2.0 * y * ax,
            x * b2d + 2.0 * a_val / x,
        ),
    }

    h = np.zeros((2, 2))
    dh = np.zeros((2, 2, 2))
    d2h = np.zeros((2, 2, 2, 2))
    for (i, j), (f, fx, fy, fxx, fxy, fyy) in entries.items():
        # chain rule through y = mu2 / mu1
        d1 = fx - (y / x) * fy
        d2 = fy / x
        d11 = fxx - 2.0 * (y / x) * fxy + (y / x) ** 2 * fyy + 2.0 * y / x**2 * fy
        d12 = -fy / x**2 + fxy / x - y * fyy / x**2
        d22 = fyy / x**2
        for (r, c) in {(i, j), (j, i)}:
            h[r, c] = f
            dh[r, c, 0], dh[r, c, 1] = d1, d2
            d2h[r, c, 0, 0] = d11
            d2h[r, c, 0, 1] = d2h[r, c, 1, 0] = d12
            d2h[r, c, 1, 1] = d22
    return MetricMatrices(h=h, dh=dh, d2h=d2h)


def _require_in_tau(s: CalabiSoliton, mu: np.ndarray) -> np.ndarray:
    mu = np.asarray(mu, dtype=float)
    x = mu[0]
    if not (s.params.alpha1 < x < s.params.alpha2):
        raise BoundaryEvaluationError(f"mu1 = {x} outside ({s.params.alpha1}, {s.params.alpha2})")
    y = mu[1] / x
    if not (s.params.beta1 < y < s.params.beta2):
        raise BoundaryEvaluationError(f"mu2/mu1 = {y} outside ({s.params.beta1}, {s.params.beta2})")
    return mu


def h_matrix(s: CalabiSoliton, mu) -> MetricMatrices:
    """The metric matrix H and its derivatives at an interior point of tau."""
    mu = _require_in_tau(s, mu)
    return _entry_partials(s, mu)


def g_matrix(s: CalabiSoliton, mu) -> np.ndarray:
    """Closed-form inverse of H (the explicit display of the family)."""
    mu = _require_in_tau(s, mu)
    x = float(mu[0])
    y = float(mu[1]) / x
    a_val, _, _ = profile_A(s, x)
    b_val, _, _ = profile_B(s, y)
    return np.array([
        [x / a_val + y * y / (x * b_val), -y / (x * b_val)],
        [-y / (x * b_val), 1.0 / (x * b_val)],
    ])


class CalabiPotential(HSidePotential):
    """Derivative stack of the blow-up soliton metric on the algebraic trapezoid.

    The stack lives in algebraic coordinates (the trapezoid translated so
    the privileged center is the origin); the metric data is evaluated at
    the translated point.  The gradient is recovered by a line integral
    from the origin with gauge zero there, which rescales root profiles
    by harmless positive constants.
    """

    def __init__(self, soliton: CalabiSoliton | None = None):
        self.soliton = soliton or CalabiSoliton.solve()
        self.polytope = blowup_trapezoid()
        self.base_point = np.zeros(2)

    def inv_hessian(self, x) -> np.ndarray:
        x = self.require_interior(x)
        return h_matrix(self.soliton, from_algebraic_coordinates(x)).h

    def inv_hessian_derivative(self, x) -> np.ndarray:
        x = self.require_interior(x)
        return h_matrix(self.soliton, from_algebraic_coordinates(x)).dh

    def inv_hessian_second(self, x) -> np.ndarray:
        x = self.require_interior(x)
        return h_matrix(self.soliton, from_algebraic_coordinates(x)).d2h

    def semi_closed_gradient(self, x) -> np.ndarray:
        """Independent gradient formula used to cross-check the line integral.

        Integrating the rows of G in closed form gives
        grad_2 = (1/2) log(y / (1 - y)) + c2 and
        grad_1 = F(mu1) + (1/2) log(1 - y) + c1 with F' (t) = t / A(t);
        only F needs one scalar quadrature.  Constants are fixed by the
        gauge grad(base) = 0.
        """
        x = self.require_interior(x)
        mu = from_algebraic_coordinates(x)
        base_mu = from_algebraic_coordinates(self.base_point)

        def f_scalar(t0: float, t1: float) -> float:
            nodes, weights = np.polynomial.legendre.leggauss(48)
            mid, half = 0.5 * (t0 + t1), 0.5 * (t1 - t0)
            ts = mid + half * nodes
            vals = np.array([t / profile_A(self.soliton, t)[0] for t in ts])
            return half * float(weights @ vals)

        def raw(mu_pt: np.ndarray) -> np.ndarray:
            t = float(mu_pt[0])
            y = float(mu_pt[1]) / t
            return np.array([
                f_scalar(base_mu[0], t) + 0.5 * math.log(1.0 - y),
                0.5 * math.log(y / (1.0 - y)),
            ])

        return raw(mu) - raw(base_mu)
