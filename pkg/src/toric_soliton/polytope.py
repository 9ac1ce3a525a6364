"""Delzant polytopes for toric Fano surfaces.

A polytope is stored by its facet data ``{x : <nu_r, x> + lambda_r >= 0}``
with primitive integer normals ``nu_r`` and rational offsets ``lambda_r``.
Offsets are kept as exact ``Fraction`` values so that vertices, the
privileged center and the algebraic normalization are exact for lattice
examples; floats appear only at the analysis boundary (quadrature, metric
evaluation, reports).
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import linprog

from .errors import (
    DegenerateVertexError,
    EmptyInteriorError,
    MalformedInputError,
    NonPrimitiveNormalError,
    NotFanoError,
    RedundantFacetError,
    UnboundedPolytopeError,
)

#: tolerance used when deciding whether a facet is active at a point
ACTIVE_TOL = 1e-9

#: tolerance for the privileged-center residual
CENTER_TOL = 1e-9


@dataclass(frozen=True)
class Facet:
    """One inequality <normal, x> + offset >= 0 of the polytope."""

    normal: tuple[int, ...]
    offset: Fraction

    def __post_init__(self) -> None:
        if not self.normal or any(not isinstance(c, int) for c in self.normal):
            raise MalformedInputError(f"facet normal must be an integer vector, got {self.normal!r}")
        if all(c == 0 for c in self.normal):
            raise MalformedInputError("facet normal must be nonzero")
        if math.gcd(*(abs(c) for c in self.normal)) != 1:
            raise NonPrimitiveNormalError(f"facet normal {self.normal} is not primitive")
        if not isinstance(self.offset, Fraction):
            object.__setattr__(self, "offset", _as_fraction(self.offset))

    def value(self, x: Sequence) -> Fraction | float:
        """Affine facet function L(x) = <normal, x> + offset."""
        acc = self.offset
        for c, xi in zip(self.normal, x):
            acc = acc + c * xi
        return acc


@dataclass(frozen=True)
class PrivilegedCenter:
    """The unique point where all facet functions share one positive value."""

    point: tuple[float, ...]
    common_value: float
    exact_point: tuple[Fraction, ...]
    exact_value: Fraction
    residual: float


@dataclass(frozen=True)
class DelzantVerdict:
    """Outcome of the per-vertex unimodularity check."""

    passed: bool
    vertex_determinants: tuple[tuple[tuple[float, ...], int], ...]

    def failures(self) -> list[tuple[tuple[float, ...], int]]:
        return [(v, d) for v, d in self.vertex_determinants if abs(d) != 1]


def _as_fraction(value) -> Fraction:
    """Exact conversion of an input offset (int, Fraction, float, 'p/q')."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise MalformedInputError(f"offset must be a number, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise MalformedInputError(f"cannot parse offset {value!r}") from exc
    raise MalformedInputError(f"offset must be a number or 'p/q' string, got {value!r}")


def _solve_exact(rows: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction] | None:
    """Solve a square rational system by Gaussian elimination; None if singular."""
    n = len(rows)
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            return None
        aug[col], aug[pivot] = aug[pivot], aug[col]
        pivot_val = aug[col][col]
        aug[col] = [v / pivot_val for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [v - factor * w for v, w in zip(aug[r], aug[col])]
    return [aug[r][n] for r in range(n)]


def _int_det(matrix: list[tuple[int, ...]]) -> int:
    """Exact determinant of a small integer matrix (fraction-free elimination)."""
    n = len(matrix)
    rows = [[Fraction(v) for v in row] for row in matrix]
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if rows[r][col] != 0), None)
        if pivot is None:
            return 0
        if pivot != col:
            rows[col], rows[pivot] = rows[pivot], rows[col]
            det = -det
        det *= rows[col][col]
        inv = 1 / rows[col][col]
        for r in range(col + 1, n):
            factor = rows[r][col] * inv
            rows[r] = [v - factor * w for v, w in zip(rows[r], rows[col])]
    assert det.denominator == 1
    return int(det)


class DelzantPolytope:
    """Bounded simple polytope with primitive integer facet normals.

    Construction validates the facet data: primitivity, boundedness,
    nonempty interior, simplicity (exactly n facets through each vertex)
    and non-redundancy.  Unimodularity of vertex normal bases is *not*
    enforced here; :func:`delzant_check` reports it.

    Instances are immutable after construction and safe to share.
    """

    def __init__(self, dim: int, facets: Iterable[Facet]):
        if not isinstance(dim, int) or dim < 1:
            raise MalformedInputError(f"dim must be a positive integer, got {dim!r}")
        facets = tuple(facets)
        if len(facets) <= dim:
            raise MalformedInputError(f"need more than {dim} facets, got {len(facets)}")
        for f in facets:
            if len(f.normal) != dim:
                raise MalformedInputError(f"facet normal {f.normal} has wrong dimension (expected {dim})")
        self.dim = dim
        self.facets = facets
        self._normal_matrix = np.array([f.normal for f in facets], dtype=float)
        self._offset_vector = np.array([float(f.offset) for f in facets])
        self._check_bounded_full()
        self._vertex_data = self._enumerate_vertices()
        self._check_facets_supported()
        self._center: PrivilegedCenter | None = None
        self._center_error: NotFanoError | None = None

    # -- construction checks ------------------------------------------------

    def _check_bounded_full(self) -> None:
        # Constraints in linprog form: -nu_r . x <= lambda_r.
        a_ub = -self._normal_matrix
        b_ub = self._offset_vector
        for i in range(self.dim):
            for sense in (1.0, -1.0):
                c = np.zeros(self.dim)
                c[i] = sense
                res = linprog(c, A_ub=a_ub, b_ub=b_ub, bounds=[(None, None)] * self.dim, method="highs")
                if res.status == 3:
                    raise UnboundedPolytopeError(f"region unbounded in coordinate {i}")
                if res.status == 2:
                    raise EmptyInteriorError("facet inequalities are infeasible")
        # Chebyshev-style LP: maximize t with nu_r . x + lambda_r >= t |nu_r|.
        norms = np.linalg.norm(self._normal_matrix, axis=1)
        a_cheb = np.hstack([-self._normal_matrix, norms[:, None]])
        c = np.zeros(self.dim + 1)
        c[-1] = -1.0
        res = linprog(c, A_ub=a_cheb, b_ub=b_ub, bounds=[(None, None)] * self.dim + [(0, None)], method="highs")
        if res.status != 0 or res.x[-1] <= ACTIVE_TOL:
            raise EmptyInteriorError("polytope has empty interior")

    def _enumerate_vertices(self) -> tuple[tuple[tuple[Fraction, ...], frozenset[int]], ...]:
        # All n-subsets of facets; d is small at desk scale so the scan is cheap.
        found: dict[tuple[Fraction, ...], frozenset[int]] = {}
        for subset in itertools.combinations(range(len(self.facets)), self.dim):
            rows = [[Fraction(c) for c in self.facets[i].normal] for i in subset]
            rhs = [-self.facets[i].offset for i in subset]
            point = _solve_exact(rows, rhs)
            if point is None:
                continue
            values = [f.value(point) for f in self.facets]
            if any(v < 0 for v in values):
                continue
            active = frozenset(i for i, v in enumerate(values) if v == 0)
            if len(active) > self.dim:
                raise DegenerateVertexError(
                    f"{len(active)} facets meet at vertex {tuple(float(c) for c in point)}; polytope is not simple"
                )
            found[tuple(point)] = active
        if not found:
            raise EmptyInteriorError("no vertices found")
        ordered = sorted(found.items())
        return tuple((pt, act) for pt, act in ordered)

    def _check_facets_supported(self) -> None:
        counts = [0] * len(self.facets)
        for _, active in self._vertex_data:
            for i in active:
                counts[i] += 1
        for i, c in enumerate(counts):
            if c < self.dim:
                raise RedundantFacetError(f"facet {i} (normal {self.facets[i].normal}) supports no (n-1)-face")

    # -- basic geometry -----------------------------------------------------

    @property
    def vertices(self) -> np.ndarray:
        """Vertex coordinates as a float array of shape (v, n), sorted lexicographically."""
        return np.array([[float(c) for c in pt] for pt, _ in self._vertex_data])

    @property
    def vertex_data(self) -> tuple[tuple[tuple[Fraction, ...], frozenset[int]], ...]:
        """Exact vertices with their active facet index sets."""
        return self._vertex_data

    @property
    def normal_matrix(self) -> np.ndarray:
        return self._normal_matrix.copy()

    @property
    def offsets(self) -> np.ndarray:
        return self._offset_vector.copy()

    @property
    def is_algebraic(self) -> bool:
        """True when every offset equals one (privileged center at the origin)."""
        return all(f.offset == 1 for f in self.facets)

    def facet_values(self, x: Sequence[float]) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise MalformedInputError(f"point has shape {x.shape}, expected ({self.dim},)")
        return self._normal_matrix @ x + self._offset_vector

    def facet_values_many(self, pts: np.ndarray) -> np.ndarray:
        """Facet values for an array of points of shape (m, n) -> (m, d)."""
        return pts @ self._normal_matrix.T + self._offset_vector

    def contains(self, x: Sequence[float], tol: float = ACTIVE_TOL) -> bool:
        return bool(np.min(self.facet_values(x)) >= -tol)

    def is_interior(self, x: Sequence[float], margin: float = 0.0) -> bool:
        return bool(np.min(self.facet_values(x)) > margin)

    @property
    def spread(self) -> float:
        """Largest coordinate range over the vertex set."""
        verts = self.vertices
        return float(np.max(verts.max(axis=0) - verts.min(axis=0)))

    def interior_margin(self, margin_fraction: float = 0.05) -> float:
        return margin_fraction * self.spread

    def interior_grid(self, n: int = 21, margin_fraction: float = 0.05) -> np.ndarray:
        """Tensor grid over the bounding box clipped to {min_r L_r >= margin}."""
        verts = self.vertices
        lo, hi = verts.min(axis=0), verts.max(axis=0)
        axes = [np.linspace(lo[i], hi[i], n) for i in range(self.dim)]
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, self.dim)
        margin = self.interior_margin(margin_fraction)
        keep = self.facet_values_many(mesh).min(axis=1) >= margin
        return mesh[keep]

    # -- equality and serialization ------------------------------------------

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, DelzantPolytope)
            and self.dim == other.dim
            and self.facets == other.facets
        )

    def __hash__(self) -> int:
        return hash((self.dim, self.facets))

    def __repr__(self) -> str:
        return f"DelzantPolytope(dim={self.dim}, facets={len(self.facets)}, vertices={len(self._vertex_data)})"

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "facets": [
                {
                    "normal": list(f.normal),
                    "offset": int(f.offset) if f.offset.denominator == 1 else f"{f.offset.numerator}/{f.offset.denominator}",
                }
                for f in self.facets
            ],
        }


# -- module-level operations ----------------------------------------------


def parse_polytope(source: str | bytes | dict) -> DelzantPolytope:
    """Parse and validate a polytope document.

    The document is JSON of the form
    ``{"dim": n, "facets": [{"normal": [int, ...], "offset": number|"p/q"}, ...]}``.
    Decimal offsets are read exactly (no binary-float round trip).
    """
    if isinstance(source, (str, bytes)):
        try:
            doc = json.loads(source, parse_float=Fraction, parse_int=int)
        except json.JSONDecodeError as exc:
            raise MalformedInputError(f"invalid JSON: {exc}") from exc
    elif isinstance(source, dict):
        doc = source
    else:
        raise MalformedInputError(f"unsupported source type {type(source)!r}")
    if not isinstance(doc, dict) or "dim" not in doc or "facets" not in doc:
        raise MalformedInputError("document must be an object with 'dim' and 'facets'")
    dim = doc["dim"]
    if not isinstance(dim, int):
        raise MalformedInputError(f"'dim' must be an integer, got {dim!r}")
    raw_facets = doc["facets"]
    if not isinstance(raw_facets, list) or not raw_facets:
        raise MalformedInputError("'facets' must be a nonempty list")
    facets = []
    for entry in raw_facets:
        if not isinstance(entry, dict) or "normal" not in entry or "offset" not in entry:
            raise MalformedInputError(f"facet entry {entry!r} must have 'normal' and 'offset'")
        normal = entry["normal"]
        if not isinstance(normal, list):
            raise MalformedInputError(f"facet normal must be a list, got {normal!r}")
        facets.append(Facet(normal=tuple(normal), offset=_as_fraction(entry["offset"])))
    return DelzantPolytope(dim, facets)


def compute_vertices(p: DelzantPolytope) -> list[tuple[np.ndarray, frozenset[int]]]:
    """Vertices with active facet index sets, as floats."""
    return [(np.array([float(c) for c in pt]), act) for pt, act in p.vertex_data]


def delzant_check(p: DelzantPolytope) -> DelzantVerdict:
    """Check that each vertex's active normals form a lattice basis (|det| = 1)."""
    records = []
    passed = True
    for pt, active in p.vertex_data:
        matrix = [p.facets[i].normal for i in sorted(active)]
        det = _int_det(matrix)
        if abs(det) != 1:
            passed = False
        records.append((tuple(float(c) for c in pt), det))
    return DelzantVerdict(passed=passed, vertex_determinants=tuple(records))


def privileged_center(p: DelzantPolytope) -> PrivilegedCenter:
    """Solve L_1(x) = ... = L_d(x) = c with c > 0.

    The overdetermined system is solved exactly on a full-rank subsystem;
    the remaining rows must agree to ``CENTER_TOL``.  Raises
    :class:`NotFanoError` when no consistent positive common value exists.
    """
    if p._center is not None:
        return p._center
    if p._center_error is not None:
        raise p._center_error
    d, n = len(p.facets), p.dim
    # unknowns (x, c): <nu_r, x> - c = -lambda_r
    rows = [[Fraction(c) for c in f.normal] + [Fraction(-1)] for f in p.facets]
    rhs = [-f.offset for f in p.facets]
    solution = None
    for subset in itertools.combinations(range(d), n + 1):
        candidate = _solve_exact([rows[i] for i in subset], [rhs[i] for i in subset])
        if candidate is not None:
            solution = candidate
            break
    error: NotFanoError | None = None
    if solution is None:
        error = NotFanoError("facet system is rank deficient; no unique center")
    else:
        point, value = tuple(solution[:n]), solution[n]
        residual = max(abs(float(f.value(point) - value)) for f in p.facets)
        if residual > CENTER_TOL:
            error = NotFanoError(f"no common facet value (residual {residual:.3e})")
        elif value <= 0:
            error = NotFanoError(f"common facet value {float(value):.6g} is not positive")
    if error is not None:
        p._center_error = error
        raise error
    center = PrivilegedCenter(
        point=tuple(float(c) for c in point),
        common_value=float(value),
        exact_point=point,
        exact_value=value,
        residual=residual,
    )
    p._center = center
    return center


def normalize_algebraic(p: DelzantPolytope) -> DelzantPolytope:
    """Translate the center to the origin and scale all offsets to one.

    Idempotent: an already-algebraic polytope is returned unchanged.
    """
    if p.is_algebraic:
        return p
    center = privileged_center(p)
    # x -> (x - p0)/c turns every inequality into <nu_r, x'> + 1 >= 0.
    facets = [Facet(normal=f.normal, offset=Fraction(1)) for f in p.facets]
    return DelzantPolytope(p.dim, facets)


def facet_values(p: DelzantPolytope, x: Sequence[float]) -> np.ndarray:
    """All facet affine functions L_r(x); x is interior iff all are positive."""
    return p.facet_values(x)
