"""Weighted volumes and the soliton-vector solve."""

from __future__ import annotations

import json

import numpy as np
import pytest

from toric_soliton import (
    einstein_constant,
    enumerate_roots,
    parse_polytope,
    solve_soliton_vector,
    weighted_volume,
)
from toric_soliton.calabi import solve_a1, soliton_equation, CalabiParameters


def polygon_moments(vertices: np.ndarray) -> tuple[float, np.ndarray]:
    """Exact polygon area and first moments from the shoelace formulas."""
    x, y = vertices[:, 0], vertices[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    area = 0.5 * float(np.sum(cross))
    mx = float(np.sum((x + xn) * cross)) / 6.0
    my = float(np.sum((y + yn) * cross)) / 6.0
    return area, np.array([mx, my])


def test_weighted_volume_cp2_at_zero(cp2):
    value, grad, hess = weighted_volume(cp2, [0.0, 0.0])
    assert value == pytest.approx(4.5, abs=1e-12)
    assert np.allclose(grad, 0.0, atol=1e-12)
    assert np.allclose(hess, hess.T)


def test_weighted_volume_blowup_matches_polygon_moments(blowup):
    # cyclic vertex order for the shoelace oracle
    ring = np.array([[-1.0, -1.0], [1.0, -1.0], [1.0, 2.0], [-1.0, 0.0]])
    area, moments = polygon_moments(ring)
    assert area == pytest.approx(4.0, abs=1e-14)
    value, grad, _ = weighted_volume(blowup, [0.0, 0.0])
    assert value == pytest.approx(area, abs=1e-12)
    assert np.allclose(grad, -2.0 * moments, atol=1e-12)
    assert np.linalg.norm(grad) > 0.1  # the weighted centroid is away from the center


def test_weighted_volume_hessian_positive_definite(cp2, blowup):
    rng = np.random.default_rng(3)
    for p in (cp2, blowup):
        for _ in range(5):
            a = rng.uniform(-0.8, 0.8, size=2)
            _, _, hess = weighted_volume(p, a)
            assert np.linalg.eigvalsh(hess)[0] > 0


def test_cp2_soliton_vector_vanishes(cp2_soliton):
    assert np.linalg.norm(cp2_soliton.a_array) <= 1e-10
    assert cp2_soliton.lam == 1.0
    assert cp2_soliton.futaki_residual <= 1e-10


def test_square_soliton_vector_vanishes(square):
    soliton = solve_soliton_vector(square)
    assert np.linalg.norm(soliton.a_array) <= 1e-12


def test_blowup_soliton_matches_bisection_oracle(blowup_soliton):
    a = blowup_soliton.a_array
    assert abs(a[1]) <= 1e-8
    oracle_root = solve_a1(CalabiParameters.blow_up())
    assert -0.5 < oracle_root < 0.0
    assert abs(a[0] - oracle_root) <= 1e-8
    assert abs(soliton_equation(a[0])) <= 1e-10


def test_solver_normalizes_first():
    # trapezoid translated by (2, 1): same soliton vector after normalization
    translated = parse_polytope(json.dumps({
        "dim": 2,
        "facets": [
            {"normal": [0, 1], "offset": 0},
            {"normal": [-1, 0], "offset": 3},
            {"normal": [1, 0], "offset": -1},
            {"normal": [1, -1], "offset": 0},
        ],
    }))
    soliton = solve_soliton_vector(translated)
    oracle_root = solve_a1(CalabiParameters.blow_up())
    assert abs(soliton.a[0] - oracle_root) <= 1e-8


def test_equivariance_under_unimodular_map(blowup_soliton):
    # vertices map by u, normals contragrediently; the solution follows the normals
    u = np.array([[1, 1], [0, 1]])
    inv_t = np.round(np.linalg.inv(u).T).astype(int)
    base = [(0, 1), (-1, 0), (1, 0), (1, -1)]
    mapped = parse_polytope(json.dumps({
        "dim": 2,
        "facets": [
            {"normal": [int(c) for c in inv_t @ np.array(nu)], "offset": 1} for nu in base
        ],
    }))
    soliton = solve_soliton_vector(mapped)
    expected = inv_t @ blowup_soliton.a_array
    assert np.allclose(soliton.a_array, expected, atol=1e-9)


def test_root_pairings_nonnegative(blowup, blowup_soliton, cp2, cp2_soliton):
    for p, soliton in ((blowup, blowup_soliton), (cp2, cp2_soliton)):
        rootset = enumerate_roots(p)
        for root in rootset.roots:
            pairing = 2.0 * float(np.array(root.alpha) @ soliton.a_array)
            assert pairing >= -1e-10
        for root in rootset.semisimple:
            assert abs(float(np.array(root.alpha) @ soliton.a_array)) <= 1e-10


def test_futaki_residuals_reported(blowup_soliton):
    assert len(blowup_soliton.residuals) == 3
    assert blowup_soliton.residuals[0] == 0.0
    assert blowup_soliton.futaki_residual == max(blowup_soliton.residuals)
    assert blowup_soliton.futaki_residual <= 1e-10
    assert len(blowup_soliton.iterations) >= 2


def test_einstein_constant():
    assert einstein_constant(4.0, 2) == 1.0
    assert einstein_constant(0.0, 5) == 0.0
    for n in (1, 2, 3, 7):
        assert einstein_constant(2.0 * n, n) == 1.0
