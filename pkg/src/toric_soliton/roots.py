"""Demazure roots of an algebraic Delzant polytope.

A lattice covector ``alpha`` is a root when it pairs to exactly one with a
single distinguished facet normal and non-positively with every other.
Enumeration is exhaustive: each facet's feasible region is boxed by linear
programs before the integer scan, so no root can be missed.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .errors import MalformedInputError, UnboundedRootRegionError
from .polytope import DelzantPolytope

#: slack added around LP bounds before rounding to the integer box
BOX_SLACK = 1e-7


@dataclass(frozen=True)
class DemazureRoot:
    """A root alpha with its distinguished facet and all facet pairings."""

    alpha: tuple[int, ...]
    distinguished_facet: int
    pairings: tuple[int, ...]

    def pairing(self, facet_index: int) -> int:
        return self.pairings[facet_index]


@dataclass(frozen=True)
class RootSet:
    """All roots of a polytope, split into semisimple and unipotent parts."""

    roots: tuple[DemazureRoot, ...]
    semisimple: tuple[DemazureRoot, ...]
    unipotent: tuple[DemazureRoot, ...]

    def alphas(self) -> list[tuple[int, ...]]:
        return [r.alpha for r in self.roots]


@dataclass(frozen=True)
class AutomorphismDimensions:
    """Complex dimensions of the holomorphic vector field decomposition."""

    dim_eta: int
    dim_reductive: int
    dim_unipotent: int


def _facet_box(p: DelzantPolytope, rho: int) -> list[tuple[int, int]]:
    """Integer bounding box of {alpha : <alpha, nu_rho> = 1, <alpha, nu_rho'> <= 0}."""
    n = p.dim
    normals = p.normal_matrix
    a_eq = normals[rho][None, :]
    b_eq = np.array([1.0])
    others = [i for i in range(len(p.facets)) if i != rho]
    a_ub = normals[others]
    b_ub = np.zeros(len(others))
    box = []
    for i in range(n):
        bounds_i = []
        for sense in (1.0, -1.0):
            c = np.zeros(n)
            c[i] = sense
            res = linprog(
                c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq,
                bounds=[(None, None)] * n, method="highs",
            )
            if res.status == 3:
                raise UnboundedRootRegionError(
                    f"root region of facet {rho} is unbounded; normals do not positively span"
                )
            if res.status != 0:
                # infeasible region: no roots for this facet
                return []
            bounds_i.append(res.fun if sense == 1.0 else -res.fun)
        lo = math.ceil(bounds_i[0] - BOX_SLACK)
        hi = math.floor(bounds_i[1] + BOX_SLACK)
        if lo > hi:
            return []
        box.append((lo, hi))
    return box


def enumerate_roots(p: DelzantPolytope) -> RootSet:
    """Enumerate all Demazure roots of an algebraic polytope.

    Raises :class:`UnboundedRootRegionError` when a facet's region is
    unbounded (the facet normals then fail to positively span, i.e. the
    input does not come from a complete fan).
    """
    if not p.is_algebraic:
        raise MalformedInputError("root enumeration requires an algebraic polytope (all offsets 1)")
    normals = [f.normal for f in p.facets]
    roots: dict[tuple[int, ...], DemazureRoot] = {}
    for rho in range(len(p.facets)):
        box = _facet_box(p, rho)
        if not box:
            continue
        for alpha in itertools.product(*(range(lo, hi + 1) for lo, hi in box)):
            pairings = tuple(sum(a * c for a, c in zip(alpha, nu)) for nu in normals)
            if pairings[rho] != 1:
                continue
            if any(v > 0 for i, v in enumerate(pairings) if i != rho):
                continue
            if alpha in roots:
                raise MalformedInputError(f"root {alpha} pairs to one with two facets")
            roots[alpha] = DemazureRoot(alpha=alpha, distinguished_facet=rho, pairings=pairings)
    ordered = tuple(roots[a] for a in sorted(roots))
    return _split(ordered)


def _split(roots: tuple[DemazureRoot, ...]) -> RootSet:
    alphas = {r.alpha for r in roots}
    semi = tuple(r for r in roots if tuple(-c for c in r.alpha) in alphas)
    unip = tuple(r for r in roots if tuple(-c for c in r.alpha) not in alphas)
    return RootSet(roots=roots, semisimple=semi, unipotent=unip)


def split_semisimple_unipotent(rootset: RootSet) -> RootSet:
    """Recompute the semisimple/unipotent partition of a root set."""
    return _split(rootset.roots)


def automorphism_dimensions(rootset: RootSet, n: int) -> AutomorphismDimensions:
    """Complex dimensions n + |R|, n + |S|, |U| of the automorphism algebra."""
    return AutomorphismDimensions(
        dim_eta=n + len(rootset.roots),
        dim_reductive=n + len(rootset.semisimple),
        dim_unipotent=len(rootset.unipotent),
    )


def brute_force_roots(p: DelzantPolytope, radius: int | None = None) -> list[tuple[int, ...]]:
    """Independent oracle: scan the integer box [-B, B]^n against the definition.

    Default B = 1 + max vertex coordinate magnitude.  Used by the test
    suite to confirm the LP-boxed enumeration misses nothing.
    """
    if radius is None:
        radius = 1 + int(math.ceil(np.max(np.abs(p.vertices))))
    normals = [f.normal for f in p.facets]
    found = []
    for alpha in itertools.product(range(-radius, radius + 1), repeat=p.dim):
        pairings = [sum(a * c for a, c in zip(alpha, nu)) for nu in normals]
        ones = [i for i, v in enumerate(pairings) if v == 1]
        if len(ones) != 1:
            continue
        if all(v <= 0 for i, v in enumerate(pairings) if i != ones[0]):
            found.append(alpha)
    return sorted(found)
