"""Acceptance suite: every criterion runs at its stated tolerance.

Each test prints one PASS/FAIL line (run pytest with ``-s`` or read the
captured output).  The criteria cover: exact root enumeration, dimension
counts, the soliton vector against an independent bisection oracle, the
blow-up closed forms, Abreu curvature, the affine eigenfunction identity,
the soliton equation with a negative control, eigenfunctions with their
closed forms, operator identities against the finite-difference oracle,
the eigenvalue clustering, orientation-reversed eigenvalues, and the
boundary extension of the root profiles.
"""

from __future__ import annotations

import numpy as np
import pytest

from toric_soliton import (
    OperatorContext,
    abreu_scalar_curvature,
    anti_holomorphic_fit,
    apply_complex_weighted_laplacian,
    apply_weighted_laplacian,
    assemble_decomposition,
    boundary_product_form,
    build_root_function,
    eigen_residual,
    enumerate_roots,
    finite_difference_oracle,
    integrate,
    product_rule_check,
    select_mode_sign,
    soliton_residual,
)
from toric_soliton.calabi import (
    CalabiParameters,
    m_constant,
    profile_A,
    profile_B,
    ode_residual,
    solve_a1,
    soliton_equation,
)
from toric_soliton.operators import profile_constant, profile_coordinate, profile_exp_pairing
from toric_soliton.report import calabi_report
from toric_soliton.roots import automorphism_dimensions, brute_force_roots
from test_eigenbasis import CP2_CLOSED_FORMS


def report(index: int, description: str, passed: bool) -> None:
    flag = "PASS" if passed else "FAIL"
    print(f"ACCEPTANCE {index:02d} [{flag}] {description}")
    assert passed, f"criterion {index}: {description}"


CP2_ROOTS = {(1, 0), (1, -1), (0, 1), (-1, 1), (-1, 0), (0, -1)}
BLOWUP_ROOTS = {(0, 1), (-1, 0), (-1, -1), (0, -1)}


def test_criterion_01_demazure_roots_exact(cp2, blowup):
    ok = set(enumerate_roots(cp2).alphas()) == CP2_ROOTS
    ok = ok and set(enumerate_roots(blowup).alphas()) == BLOWUP_ROOTS
    ok = ok and brute_force_roots(cp2) == sorted(CP2_ROOTS)
    ok = ok and brute_force_roots(blowup) == sorted(BLOWUP_ROOTS)
    report(1, "root sets exact on both examples, brute-force oracle agrees", ok)


def test_criterion_02_automorphism_dimensions(cp2_roots, blowup_roots):
    cp2_dims = automorphism_dimensions(cp2_roots, 2)
    blowup_dims = automorphism_dimensions(blowup_roots, 2)
    ok = (cp2_dims.dim_eta, len(cp2_roots.semisimple), len(cp2_roots.unipotent)) == (8, 6, 0)
    ok = ok and (blowup_dims.dim_eta, len(blowup_roots.semisimple), len(blowup_roots.unipotent)) == (6, 2, 2)
    report(2, "dim eta = 8 and 6 with splits (6,0) and (2,2)", ok)


def test_criterion_03_soliton_vector(cp2_soliton, blowup_soliton):
    oracle = solve_a1(CalabiParameters.blow_up())  # bisection + polish
    ok = float(np.linalg.norm(cp2_soliton.a_array)) <= 1e-10
    ok = ok and abs(blowup_soliton.a[1]) <= 1e-8
    ok = ok and abs(blowup_soliton.a[0] - oracle) <= 1e-8
    ok = ok and -0.5 < oracle < 0.0
    report(3, "soliton vectors: zero on the plane, oracle root on the blow-up", ok)


def test_criterion_04_calabi_closed_forms(calabi_soliton):
    s = calabi_soliton
    ok = abs(profile_A(s, 1.0)[0]) <= 1e-10 and abs(profile_A(s, 3.0)[0]) <= 1e-10
    ok = ok and s.m == -4.0 == m_constant(s.params)
    ok = ok and all(profile_B(s, float(y))[2] == s.m for y in np.linspace(0.0, 1.0, 11))
    xs = np.linspace(1.0, 3.0, 50)
    ok = ok and max(abs(ode_residual(s, float(x), scal_mean=4.0)) for x in xs) <= 1e-9
    note = calabi_report()["scal_mean_note"]
    ok = ok and "-4" in note and "inconsistent" in note
    report(4, "profiles vanish at the ends, B'' = m = -4, radial equation holds at +4, sign flag present", ok)


def test_criterion_05_abreu_curvature(cp2_ctx, cp2_grid, blowup, blowup_ctx):
    pointwise = max(abs(abreu_scalar_curvature(cp2_ctx, x) - 4.0) for x in cp2_grid)
    mean = integrate(blowup, lambda pt: abreu_scalar_curvature(blowup_ctx, pt), 10) / 4.0
    ok = pointwise <= 1e-6 and abs(mean - 4.0) <= 1e-4
    report(5, "plane curvature constant 4 pointwise; blow-up mean curvature 4", ok)


def test_criterion_06_affine_eigenfunctions(cp2_ctx, cp2_grid, blowup_ctx, blowup_grid):
    worst = 0.0
    for ctx, grid in ((cp2_ctx, cp2_grid), (blowup_ctx, blowup_grid)):
        for i in range(2):
            f = profile_coordinate(i, 2)
            values = np.array([x[i] for x in grid])
            lhs = np.array([apply_weighted_laplacian(ctx, f, x).real for x in grid])
            worst = max(worst, np.max(np.abs(lhs - 2.0 * values)) / np.max(np.abs(values)))
    report(6, f"weighted Laplacian doubles both coordinates (max rel err {worst:.2e})", worst <= 1e-6)


def test_criterion_07_soliton_equation(blowup, blowup_ctx, blowup_grid):
    worst = max(abs(soliton_residual(blowup_ctx, x, 4.0)) for x in blowup_grid)
    halved = OperatorContext(polytope=blowup, potential=blowup_ctx.potential, a=blowup_ctx.a / 2.0)
    control = max(abs(soliton_residual(halved, x, 4.0)) for x in blowup_grid)
    ok = worst <= 1e-6 and control > 1e-2
    report(7, f"soliton equation holds ({worst:.2e}); halved coefficient fails ({control:.2e})", ok)


def test_criterion_08_eigenfunctions(cp2, cp2_ctx, cp2_grid, blowup_ctx, blowup_grid):
    ok = True
    for ctx, grid in ((cp2_ctx, cp2_grid), (blowup_ctx, blowup_grid)):
        for root in enumerate_roots(ctx.polytope).roots:
            rf = select_mode_sign(ctx, root, grid)
            stats = eigen_residual(ctx, rf, grid)
            ok = ok and stats["max_rel_residual"] <= 1e-6
            ok = ok and abs(stats["fitted_eigenvalue"] - 2.0) <= 1e-6
    for root in enumerate_roots(cp2).roots:
        rf = build_root_function(cp2_ctx, root, mode_sign=1)
        closed = CP2_CLOSED_FORMS[root.alpha]
        for x in cp2_grid[::7]:
            ok = ok and abs(rf.profile.value(x) - float(closed(cp2.facet_values(x)))) <= 1e-10
    report(8, "all root functions have eigenvalue two; plane profiles match the closed forms", ok)


def test_criterion_09_operator_identities(cp2_ctx, blowup_ctx):
    ok = True
    for ctx in (cp2_ctx, blowup_ctx):
        pts = ctx.polytope.interior_grid(9, 0.1)
        for root in enumerate_roots(ctx.polytope).roots[:3]:
            alpha = np.array(root.alpha, dtype=float)
            pure = profile_constant(1.0, 2, mode=root.alpha)
            radial = profile_exp_pairing(ctx.potential, alpha)
            null = profile_exp_pairing(ctx.potential, alpha, mode=root.alpha)
            for x in pts[::4]:
                g = ctx.potential.hessian(x)
                coeff = float(alpha @ g @ alpha) - 2.0 * float(ctx.a @ alpha)
                ok = ok and abs(apply_complex_weighted_laplacian(ctx, pure, x, 1).real - coeff) <= 1e-8
                ok = ok and abs(
                    apply_complex_weighted_laplacian(ctx, radial, x, 1).real + coeff * radial.value(x)
                ) <= 1e-8
                ok = ok and abs(apply_complex_weighted_laplacian(ctx, null, x, 1).real) <= 1e-8
                ok = ok and abs(product_rule_check(ctx, profile_coordinate(0, 2), radial, x)) <= 1e-8
    # finite-difference oracle against the analytic stack (closed-form potential)
    x0 = np.array([0.2, -0.15])
    rootset = enumerate_roots(cp2_ctx.polytope)
    rf = build_root_function(cp2_ctx, rootset.roots[0], mode_sign=1)
    analytic = apply_complex_weighted_laplacian(cp2_ctx, rf.profile, x0, 1).real
    oracle = finite_difference_oracle(cp2_ctx, rf.profile, x0, "complex+").real
    ok = ok and abs(oracle - analytic) / max(1.0, abs(analytic)) <= 1e-4
    abreu_fd = finite_difference_oracle(cp2_ctx, rf.profile, x0, "abreu").real
    ok = ok and abs(abreu_fd - abreu_scalar_curvature(cp2_ctx, x0)) / 4.0 <= 1e-3
    report(9, "mode identities, product rule, and FD-oracle agreement", ok)


def test_criterion_10_decomposition(cp2_ctx, blowup_ctx, blowup_soliton):
    cp2_dec = assemble_decomposition(cp2_ctx, enumerate_roots(cp2_ctx.polytope))
    ok = cp2_dec.gamma_values == (0.0,) and cp2_dec.blocks[0]["complex_dimension"] == 8
    blowup_rootset = enumerate_roots(blowup_ctx.polytope)
    blowup_dec = assemble_decomposition(blowup_ctx, blowup_rootset)
    dims = {round(b["gamma"], 12): b["complex_dimension"] for b in blowup_dec.blocks}
    expected_gamma = round(-2.0 * blowup_soliton.a[0], 12)
    ok = ok and dims == {0.0: 4, expected_gamma: 2} and expected_gamma > 0
    ok = ok and min(blowup_dec.gamma_values) >= -1e-9
    ok = ok and all(
        abs(float(np.array(r.alpha) @ blowup_ctx.a)) <= 1e-9 for r in blowup_rootset.semisimple
    )
    report(10, "blocks {8 at 0} and {4 at 0, 2 at -2a1}; spectrum non-negative", ok)


def test_criterion_11_anti_holomorphic_eigenvalues(blowup_ctx, blowup_grid):
    ok = True
    for root in enumerate_roots(blowup_ctx.polytope).roots:
        rf = select_mode_sign(blowup_ctx, root, blowup_grid)
        gamma, fit = anti_holomorphic_fit(blowup_ctx, rf, blowup_grid)
        expected = 4.0 * abs(float(np.array(root.alpha) @ blowup_ctx.a))
        ok = ok and fit <= 1e-6 and abs(abs(gamma) - expected) <= 1e-6
    report(11, "orientation-reversed eigenvalues match 4|<alpha, a>| per root", ok)


def test_criterion_12_boundary_extension(cp2, cp2_ctx, cp2_grid):
    ok = True
    ring = cp2.vertices
    edge_midpoints = [(ring[i] + ring[(i + 1) % len(ring)]) / 2.0 for i in range(len(ring))]
    for root in enumerate_roots(cp2).roots:
        form = boundary_product_form(cp2, root)
        rf = build_root_function(cp2_ctx, root, mode_sign=1)
        for x in cp2_grid[::5]:
            ok = ok and abs(form.value(x) - rf.profile.value(x)) <= 1e-10
        for point in list(ring) + edge_midpoints:
            ok = ok and np.isfinite(form.value(point))
        for idx in form.vanishing_facets():
            # midpoint of the facet's edge lies on it; the form vanishes there
            normal = np.array(cp2.facets[idx].normal, dtype=float)
            on_facet = [m for m in edge_midpoints if abs(normal @ m + float(cp2.facets[idx].offset)) <= 1e-12]
            ok = ok and all(form.value(m) == 0.0 for m in on_facet)
    report(12, "boundary form finite on the closed polytope, vanishing exactly on predicted facets", ok)
