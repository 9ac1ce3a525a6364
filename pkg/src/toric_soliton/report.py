"""Report assembly for the command-line pipeline.

Reports are plain dictionaries with deterministic ordering; floats are
rounded to 15 significant digits at serialization time so that the
machine-readable form is reproducible and pinnable by golden files.
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from . import __version__
from .calabi import (
    CalabiPotential,
    CalabiSoliton,
    blowup_trapezoid,
    boundary_residuals,
    ode_residual,
)
from .eigenbasis import (
    affine_block,
    anti_holomorphic_fit,
    assemble_decomposition,
    boundary_product_form,
    eigen_residual,
    select_mode_sign,
)
from .errors import MalformedInputError
from .futaki import SolitonData, solve_soliton_vector
from .operators import (
    OperatorContext,
    apply_complex_weighted_laplacian,
    abreu_scalar_curvature,
    finite_difference_oracle,
    product_rule_check,
    profile_coordinate,
    profile_exp_pairing,
    profile_constant,
    soliton_residual,
)
from .polytope import DelzantPolytope, delzant_check, normalize_algebraic, privileged_center
from .potentials import guillemin
from .quadrature import integrate
from .roots import RootSet, automorphism_dimensions, enumerate_roots


def format_float(x: float) -> float:
    """Round-trip a float through 15 significant digits."""
    return float(f"{float(x):.15g}")


def _round_floats(obj: Any) -> Any:
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    if isinstance(obj, np.floating):
        return format_float(float(obj))
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def to_json(report: dict) -> str:
    return json.dumps(_round_floats(report), indent=2)


def _polytope_section(p: DelzantPolytope, normalized: DelzantPolytope) -> dict:
    center = privileged_center(p)
    verdict = delzant_check(p)
    return {
        "input": p.to_dict(),
        "normalized": normalized.to_dict(),
        "privileged_center": {
            "point": list(center.point),
            "common_value": center.common_value,
            "residual": center.residual,
        },
        "delzant": {
            "passed": verdict.passed,
            "vertex_determinants": [
                {"vertex": list(v), "det": d} for v, d in verdict.vertex_determinants
            ],
        },
        "vertices": [list(v) for v in normalized.vertices.tolist()],
    }


def _roots_section(rootset: RootSet, n: int) -> dict:
    dims = automorphism_dimensions(rootset, n)
    return {
        "roots": [
            {
                "alpha": list(r.alpha),
                "distinguished_facet": r.distinguished_facet,
                "pairings": list(r.pairings),
            }
            for r in rootset.roots
        ],
        "semisimple": [list(r.alpha) for r in rootset.semisimple],
        "unipotent": [list(r.alpha) for r in rootset.unipotent],
        "dimensions": {
            "dim_eta": dims.dim_eta,
            "dim_reductive": dims.dim_reductive,
            "dim_unipotent": dims.dim_unipotent,
        },
    }


def _soliton_section(soliton: SolitonData) -> dict:
    return {
        "a": list(soliton.a),
        "einstein_constant": soliton.lam,
        "futaki_residual": soliton.futaki_residual,
        "residuals_affine_basis": list(soliton.residuals),
        "newton_iterations": len(soliton.iterations),
        "quadrature_order": soliton.quadrature_order,
        "iterations": [
            {"iteration": t["iteration"], "order": t["order"], "grad_norm": t["grad_norm"]}
            for t in soliton.iterations
        ],
    }


def roots_report(p: DelzantPolytope) -> dict:
    normalized = normalize_algebraic(p)
    rootset = enumerate_roots(normalized)
    return {
        "command": "roots",
        "polytope": _polytope_section(p, normalized),
        **_roots_section(rootset, p.dim),
    }


def soliton_report(p: DelzantPolytope, tol: float = 1e-10, order: int = 10) -> dict:
    normalized = normalize_algebraic(p)
    soliton = solve_soliton_vector(normalized, tol=tol, order=order)
    return {
        "command": "soliton",
        "config": {"tol": tol, "order": order},
        "polytope": _polytope_section(p, normalized),
        "soliton": _soliton_section(soliton),
    }


def make_context(normalized: DelzantPolytope, potential_kind: str,
                 soliton: SolitonData) -> OperatorContext:
    if potential_kind == "guillemin":
        potential = guillemin(normalized)
    elif potential_kind == "calabi":
        if frozenset(normalized.facets) != frozenset(blowup_trapezoid().facets):
            raise MalformedInputError(
                "the closed-form soliton potential is only available for the blow-up trapezoid"
            )
        potential = CalabiPotential()
    else:
        raise MalformedInputError(f"unknown potential kind {potential_kind!r}")
    return OperatorContext(polytope=normalized, potential=potential, a=soliton.a_array)


def _scal_mean(ctx: OperatorContext, order: int) -> float:
    area = integrate(ctx.polytope, lambda pt: 1.0, order=order)
    total = integrate(ctx.polytope, lambda pt: abreu_scalar_curvature(ctx, pt), order=order)
    return total / area


def verify_report(p: DelzantPolytope, potential_kind: str = "guillemin", tol: float = 1e-10,
                  grid_n: int = 21, margin: float = 0.05, order: int = 10) -> dict:
    """Run the full verification suite and assemble the report.

    The report carries one record per check, each with a value, threshold
    and pass flag; the overall outcome is the conjunction.
    """
    normalized = normalize_algebraic(p)
    rootset = enumerate_roots(normalized)
    soliton = solve_soliton_vector(normalized, tol=tol, order=order)
    ctx = make_context(normalized, potential_kind, soliton)
    grid = normalized.interior_grid(grid_n, margin)
    n = normalized.dim

    checks: list[dict] = []

    def add_check(name: str, value: float, threshold: float) -> None:
        checks.append({
            "name": name,
            "value": float(value),
            "threshold": threshold,
            "passed": bool(abs(value) <= threshold),
        })

    # eigenvalue-two identity for the affine block
    affine = affine_block(ctx, grid)
    add_check("affine_eigenfunctions_max_rel_residual",
              max(rec["max_rel_residual"] for rec in affine), 1e-6)

    # mean scalar curvature against the Einstein-constant normalization
    scal_mean = _scal_mean(ctx, order)
    add_check("abreu_mean_minus_2n_lambda", scal_mean - 2.0 * n * soliton.lam, 1e-4)

    # soliton equation pointwise
    pde = max(abs(soliton_residual(ctx, x, scal_mean)) for x in grid)
    add_check("soliton_pde_max_residual", pde, 1e-6)

    # per-root eigenfunction verification
    root_records = []
    root_functions = {}
    for root in rootset.roots:
        rf = select_mode_sign(ctx, root, grid)
        root_functions[root.alpha] = rf
        stats = eigen_residual(ctx, rf, grid)
        gamma_hat, gamma_fit = anti_holomorphic_fit(ctx, rf, grid)
        record = {
            "alpha": list(root.alpha),
            "rho_alpha": root.distinguished_facet,
            "mode_sign": rf.mode_sign,
            "lambda_hat": stats["fitted_eigenvalue"],
            "max_rel_residual": stats["max_rel_residual"],
            "gamma_hat": gamma_hat,
            "gamma": 2.0 * float(np.array(root.alpha) @ ctx.a),
        }
        root_records.append(record)
        tag = "_".join(str(c) for c in root.alpha)
        add_check(f"eigen_residual_root_{tag}", stats["max_rel_residual"], 1e-6)
        add_check(f"eigen_value_root_{tag}", stats["fitted_eigenvalue"] - 2.0, 1e-6)
        add_check(f"anti_holomorphic_fit_root_{tag}", gamma_fit, 1e-6)
        add_check(f"anti_holomorphic_root_{tag}",
                  abs(gamma_hat) - 4.0 * abs(float(np.array(root.alpha) @ ctx.a)), 1e-6)

    # mode-diagonal identities and the product rule on a sample of grid points
    sample = grid[:: max(1, len(grid) // 16)]
    identity_defect = 0.0
    product_defect = 0.0
    for root in rootset.roots[: min(3, len(rootset.roots))]:
        alpha = np.array(root.alpha, dtype=float)
        mode = tuple(int(c) for c in root.alpha)
        pure_mode = profile_constant(1.0, n, mode=mode)
        radial = profile_exp_pairing(ctx.potential, alpha)
        null = profile_exp_pairing(ctx.potential, alpha, mode=mode)
        for x in sample:
            g = ctx.potential.hessian(x)
            t_expected = float(alpha @ g @ alpha) - 2.0 * float(ctx.a @ alpha)
            lhs_t = apply_complex_weighted_laplacian(ctx, pure_mode, x, orientation=1).real
            lhs_x = apply_complex_weighted_laplacian(ctx, radial, x, orientation=1).real
            lhs_null = apply_complex_weighted_laplacian(ctx, null, x, orientation=1).real
            identity_defect = max(
                identity_defect,
                abs(lhs_t - t_expected),
                abs(lhs_x + t_expected * radial.value(x)),
                abs(lhs_null),
            )
            product_defect = max(
                product_defect,
                abs(product_rule_check(ctx, profile_coordinate(0, n), radial, x)),
            )
    add_check("mode_identity_max_defect", identity_defect, 1e-8)
    add_check("product_rule_max_defect", product_defect, 1e-8)

    # finite-difference oracle (only meaningful when phi values are closed-form)
    if potential_kind == "guillemin":
        x0 = grid[len(grid) // 2]
        rf = root_functions[rootset.roots[0].alpha]
        analytic = apply_complex_weighted_laplacian(ctx, rf.profile, x0, orientation=1).real
        oracle = finite_difference_oracle(ctx, rf.profile, x0, "complex+").real
        add_check("fd_oracle_weighted_rel", (oracle - analytic) / max(1.0, abs(analytic)), 1e-4)
        abreu_an = abreu_scalar_curvature(ctx, x0)
        abreu_fd = finite_difference_oracle(ctx, rf.profile, x0, "abreu").real
        add_check("fd_oracle_abreu_rel", (abreu_fd - abreu_an) / max(1.0, abs(abreu_an)), 1e-3)

    # decomposition structure
    decomposition = assemble_decomposition(ctx, rootset)
    add_check("gamma_positivity_min", min(0.0, min(decomposition.gamma_values)), 1e-9)
    semisimple_pairing = max(
        (abs(float(np.array(r.alpha) @ ctx.a)) for r in rootset.semisimple), default=0.0
    )
    add_check("semisimple_pairings_max", semisimple_pairing, 1e-9)

    boundary = None
    if potential_kind == "guillemin":
        boundary_defect = 0.0
        for root in rootset.roots:
            form = boundary_product_form(normalized, root)
            rf = root_functions[root.alpha]
            for x in sample:
                boundary_defect = max(boundary_defect, abs(form.value(x) - rf.profile.value(x)))
        add_check("boundary_form_interior_match", boundary_defect, 1e-10)
        boundary = boundary_defect

    report = {
        "command": "verify",
        "config": {
            "potential": potential_kind,
            "tol": tol,
            "grid": grid_n,
            "margin": margin,
            "order": order,
            "version": __version__,
        },
        "polytope": _polytope_section(p, normalized),
        **_roots_section(rootset, n),
        "soliton": _soliton_section(soliton),
        "scal_mean": scal_mean,
        "grid_points": int(len(grid)),
        "root_records": root_records,
        "decomposition": _decomposition_section(decomposition),
        "checks": checks,
        "all_passed": all(c["passed"] for c in checks),
        "first_failed": next((c["name"] for c in checks if not c["passed"]), None),
    }
    if boundary is not None:
        report["boundary_form_max_defect"] = boundary
    return report


def _decomposition_section(decomposition) -> dict:
    return {
        "gamma_values": list(decomposition.gamma_values),
        "blocks": [
            {
                "gamma": b["gamma"],
                "complex_dimension": b["complex_dimension"],
                "includes_affine": b["includes_affine"],
                "roots": [list(r.alpha) for r in b["roots"]],
            }
            for b in decomposition.blocks
        ],
        "total_complex_dimension": decomposition.total_complex_dimension,
    }


def decompose_report(p: DelzantPolytope, potential_kind: str = "guillemin", tol: float = 1e-10,
                     grid_n: int = 21, margin: float = 0.05, order: int = 10) -> dict:
    normalized = normalize_algebraic(p)
    rootset = enumerate_roots(normalized)
    soliton = solve_soliton_vector(normalized, tol=tol, order=order)
    ctx = make_context(normalized, potential_kind, soliton)
    decomposition = assemble_decomposition(ctx, rootset)
    semisimple = {r.alpha for r in rootset.semisimple}
    blocks = _decomposition_section(decomposition)
    for block, raw in zip(blocks["blocks"], decomposition.blocks):
        block["semisimple_roots"] = [list(r.alpha) for r in raw["roots"] if r.alpha in semisimple]
        block["unipotent_roots"] = [list(r.alpha) for r in raw["roots"] if r.alpha not in semisimple]
    return {
        "command": "decompose",
        "config": {"potential": potential_kind, "tol": tol, "grid": grid_n, "margin": margin, "order": order},
        "polytope": _polytope_section(p, normalized),
        **_roots_section(rootset, p.dim),
        "soliton": _soliton_section(soliton),
        "decomposition": blocks,
    }


def calabi_report(params=None, grid_points: int = 50) -> dict:
    """Solve the blow-up closed forms and report residual diagnostics."""
    soliton = CalabiSoliton.solve(params)
    xs = np.linspace(soliton.params.alpha1, soliton.params.alpha2, grid_points)
    ode = max(abs(ode_residual(soliton, float(x))) for x in xs)
    return {
        "command": "calabi",
        "parameters": {
            "alpha1": soliton.params.alpha1,
            "alpha2": soliton.params.alpha2,
            "beta1": soliton.params.beta1,
            "beta2": soliton.params.beta2,
            "c_alpha1": soliton.params.c_alpha1,
            "c_alpha2": soliton.params.c_alpha2,
            "c_beta1": soliton.params.c_beta1,
            "c_beta2": soliton.params.c_beta2,
        },
        "a1": soliton.a1,
        "m": soliton.m,
        "scal_mean": soliton.scal_mean,
        "scal_mean_note": (
            "scal_mean is fixed to +4 by the Einstein normalization (lambda = 1, n = 2); "
            "the value -4 sometimes quoted for this family is inconsistent with that "
            "normalization and is not used"
        ),
        "ode_max_residual": ode,
        "boundary_residuals": boundary_residuals(soliton),
    }


# -- text rendering -----------------------------------------------------------


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{format_float(x):.15g}"
    return str(x)


def _vec(v) -> str:
    return "(" + ", ".join(_fmt(c) for c in v) + ")"


def _text_polytope(lines: list[str], section: dict) -> None:
    facets = section["input"]["facets"]
    lines.append(f"polytope: dim {section['input']['dim']}, {len(facets)} facets")
    for f in facets:
        lines.append(f"  normal {_vec(f['normal'])}  offset {f['offset']}")
    center = section["privileged_center"]
    lines.append(
        f"privileged center: {_vec(center['point'])}  common value {_fmt(center['common_value'])}"
    )
    lines.append(f"delzant check: {'pass' if section['delzant']['passed'] else 'FAIL'}")
    lines.append("vertices (normalized): " + "  ".join(_vec(v) for v in section["vertices"]))


def _text_roots(lines: list[str], report: dict) -> None:
    lines.append(f"demazure roots ({len(report['roots'])}):")
    for r in report["roots"]:
        lines.append(f"  alpha {_vec(r['alpha'])}  facet {r['distinguished_facet']}  pairings {_vec(r['pairings'])}")
    lines.append("semisimple: " + (" ".join(_vec(a) for a in report["semisimple"]) or "(none)"))
    lines.append("unipotent:  " + (" ".join(_vec(a) for a in report["unipotent"]) or "(none)"))
    dims = report["dimensions"]
    lines.append(
        f"complex dimensions: eta {dims['dim_eta']}, reductive {dims['dim_reductive']}, "
        f"unipotent {dims['dim_unipotent']}"
    )


def _text_soliton(lines: list[str], section: dict) -> None:
    lines.append(f"soliton vector a = {_vec(section['a'])}  (einstein constant {_fmt(section['einstein_constant'])})")
    lines.append(
        f"futaki residual {_fmt(section['futaki_residual'])} over affine basis "
        + _vec(section["residuals_affine_basis"])
    )
    lines.append(
        f"newton iterations {section['newton_iterations']}, quadrature order {section['quadrature_order']}"
    )


def _text_decomposition(lines: list[str], section: dict) -> None:
    lines.append("solitonic decomposition (complex dimensions):")
    for block in section["blocks"]:
        members = " ".join(_vec(a) for a in block["roots"]) or "-"
        affine = " + affine block" if block["includes_affine"] else ""
        lines.append(
            f"  gamma {_fmt(block['gamma'])}: dim {block['complex_dimension']}{affine}; roots {members}"
        )
        if "semisimple_roots" in block:
            lines.append(
                "    semisimple: " + (" ".join(_vec(a) for a in block["semisimple_roots"]) or "-")
                + "; unipotent: " + (" ".join(_vec(a) for a in block["unipotent_roots"]) or "-")
            )
    lines.append(f"total complex dimension {section['total_complex_dimension']}")


def render_text(report: dict) -> str:
    """Human-readable rendering; the JSON form is the machine contract."""
    command = report["command"]
    lines = [f"# {command}"]
    if command == "calabi":
        pars = report["parameters"]
        lines.append("parameters: " + ", ".join(f"{k} {_fmt(v)}" for k, v in pars.items()))
        lines.append(f"a1 = {_fmt(report['a1'])}")
        lines.append(f"m = {_fmt(report['m'])}, scal_mean = {_fmt(report['scal_mean'])}")
        lines.append(f"note: {report['scal_mean_note']}")
        lines.append(f"ode max residual {_fmt(report['ode_max_residual'])}")
        lines.append("boundary residuals:")
        for key, val in report["boundary_residuals"].items():
            lines.append(f"  {key}: {_fmt(val)}")
        return "\n".join(lines) + "\n"

    _text_polytope(lines, report["polytope"])
    if "roots" in report:
        _text_roots(lines, report)
    if "soliton" in report:
        _text_soliton(lines, report["soliton"])
    if "scal_mean" in report:
        lines.append(f"mean scalar curvature {_fmt(report['scal_mean'])} on {report['grid_points']} grid points")
    for record in report.get("root_records", []):
        lines.append(
            f"root {_vec(record['alpha'])}: mode_sign {record['mode_sign']:+d}, "
            f"lambda_hat {_fmt(record['lambda_hat'])}, max rel residual {_fmt(record['max_rel_residual'])}, "
            f"gamma_hat {_fmt(record['gamma_hat'])}"
        )
    if "decomposition" in report:
        _text_decomposition(lines, report["decomposition"])
    for check in report.get("checks", []):
        flag = "PASS" if check["passed"] else "FAIL"
        lines.append(f"[{flag}] {check['name']}: {_fmt(check['value'])} (threshold {_fmt(check['threshold'])})")
    if "all_passed" in report:
        lines.append("result: " + ("all checks passed" if report["all_passed"] else f"FAILED at {report['first_failed']}"))
    return "\n".join(lines) + "\n"
