"""Execute a parsed scenario and assemble its report."""

from __future__ import annotations

import cmath
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .combine import (
    CombinationSpec,
    Mode,
    combine,
    combine_multi,
    combined_dilatation,
    eta_bound,
    herglotz_decomposition_check,
    lemma_identity_check,
    sharpness_witness,
)
from .criteria import (
    RZ_TOLERANCE,
    check_local_univalence,
    convexity_upgrade,
    css_direction_check,
    default_candidates,
    royster_zeigler_check,
)
from .errors import HarmshearError, UsageError
from .geometry import (
    BOUNDARY_TAIL_TOL,
    boundary_polyline,
    direction_convexity_oracle,
    full_convexity_oracle,
    injectivity_winding_check,
    interior_probes,
    starlike_oracle,
)
from .kernels import BlendParams, KernelParams, blend_p, blend_target, p_positive_real, phi_series, psi_series
from .report import CheckReport, Grid, Verdict, _jsonable
from .scenario import CheckDecl, MapDecl, Scenario, parse_number, parse_real
from .series import R_MAX, PowerSeries
from .shear import DilatationSpec, HarmonicMapping, ShearSpec, dilatation_of, shear_construct

SUBJECT_CHECKS = {
    "univalence", "direction", "convexity_sweep", "royster", "injectivity",
    "geometric_direction", "full_convexity", "starlike", "lemma",
    "combined_dilatation", "herglotz", "boundary_csv",
}
SCENARIO_CHECKS = {"eta_bound", "sharpness", "positive_real", "weight_condition"}


def thread_cap() -> int:
    raw = os.environ.get("HARMSHEAR_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n < 1:
        raise UsageError(f"HARMSHEAR_THREADS must be a positive integer, got {raw!r}")
    return n


def _fmt(x: complex) -> str:
    x = complex(x)
    if x.imag == 0:
        return f"{x.real:.6g}"
    return f"{x.real:.6g}{x.imag:+.6g}j"


# building maps


def build_target(decl: MapDecl, order: int) -> tuple[PowerSeries, BlendParams | None]:
    kind, p = decl.target
    if kind == "kernel":
        kp = KernelParams(parse_real(p.get("mu", "0")), parse_real(p.get("nu", "0")))
        return phi_series(kp, order), None
    if kind == "blend":
        b = BlendParams(
            A=parse_real(p.get("A", "1")),
            B=parse_real(p.get("B", "0")),
            mu=parse_real(p.get("mu", "0")),
            nu1=parse_real(p.get("nu1", "0")),
            nu2=parse_real(p.get("nu2", "0")),
            family=p.get("family", "half-plane-blend"),
        )
        return blend_target(b, order), b
    raise UsageError(f"map {decl.name!r}: unknown target kind {kind!r}")


def build_dilatation(decl: MapDecl) -> DilatationSpec:
    kind, p = decl.omega
    alpha = complex(parse_number(p.get("alpha", "0")))
    if kind == "monomial":
        return DilatationSpec.monomial(alpha, int(p.get("power", "1")))
    if kind == "constant":
        return DilatationSpec.constant(alpha)
    if kind == "blaschke":
        return DilatationSpec.blaschke(alpha, complex(parse_number(p.get("a", "0"))))
    raise UsageError(f"map {decl.name!r}: unknown dilatation form {kind!r}")


def shear_constant(decl: MapDecl) -> complex:
    kind, p = decl.shear
    if kind == "direction":
        return -cmath.exp(2j * parse_real(p.get("phi", "0")))
    if kind == "kernel":
        return cmath.exp(-2j * parse_real(p.get("mu", "0")))
    if kind == "constant":
        return complex(parse_number(p.get("c", "1")))
    raise UsageError(f"map {decl.name!r}: unknown shear convention {kind!r}")


def build_map(decl: MapDecl, order: int) -> tuple[HarmonicMapping, BlendParams | None, DilatationSpec]:
    target, blend = build_target(decl, order)
    omega = build_dilatation(decl)
    spec = ShearSpec(target, shear_constant(decl), omega)
    f = shear_construct(spec, allow_scaled_target=blend is not None)
    if decl.scale != 1.0:
        f = f.scaled(decl.scale)
    return f, blend, omega


@dataclass
class Subject:
    label: str
    pre: HarmonicMapping
    post: HarmonicMapping | None = None
    eta: complex | None = None
    _polygons: dict = field(default_factory=dict)

    def stage(self, which: str | None) -> HarmonicMapping:
        if which == "pre" or self.post is None:
            return self.pre
        if which not in (None, "post"):
            raise UsageError(f"stage must be pre or post, got {which!r}")
        return self.post


@dataclass
class Context:
    scenario: Scenario
    grid: Grid
    maps: dict[str, HarmonicMapping]
    blends: dict[str, BlendParams | None]
    out_dir: Path | None


# per-subject checks


def _polygon(ctx: Context, subj: Subject, f: HarmonicMapping, stage: str):
    r, m = ctx.scenario.polygon
    key = (stage, r, m)
    if key not in subj._polygons:
        subj._polygons[key] = boundary_polyline(f, r, m)
    return subj._polygons[key]


def _pair(ctx: Context) -> tuple[HarmonicMapping, HarmonicMapping]:
    comb = ctx.scenario.combination
    if comb is None or comb.mode == "multi":
        raise UsageError("this check needs a two-map combination")
    return ctx.maps[comb.maps[0]], ctx.maps[comb.maps[1]]


def _candidates(p: dict[str, str]) -> list[tuple[float, float]]:
    if "candidates" not in p:
        return []
    out = []
    for pair in p["candidates"].split(";"):
        m, nu = pair.split(":")
        out.append((parse_real(m), parse_real(nu)))
    return out


def run_subject_check(ctx: Context, subj: Subject, ck: CheckDecl) -> CheckReport:
    p = ck.params
    stage = p.get("stage")
    f = ctx.maps[p["on"]] if "on" in p else subj.stage(stage)
    stage_key = p.get("on", stage or "default")
    grid = ctx.grid
    kind = ck.kind
    if kind == "univalence":
        return check_local_univalence(f, grid)
    if kind == "direction":
        return css_direction_check(f, parse_real(p.get("phi", "0")), grid, _candidates(p))
    if kind == "convexity_sweep":
        n = int(p.get("directions", "12"))
        reports = [css_direction_check(f, math.pi * k / n, grid) for k in range(n)]
        worst = min(reports, key=lambda r: (r.passed, r.extremal_value))
        if any(r.verdict is Verdict.FAIL for r in reports):
            verdict = Verdict.FAIL
        elif all(r.passed for r in reports):
            verdict = Verdict.PASS
        else:
            verdict = Verdict.INCONCLUSIVE
        return CheckReport(
            "convexity_sweep", verdict, worst.extremal_value, worst.witness, worst.tolerance,
            max(r.tail_bound or 0.0 for r in reports),
            {"directions": n, "verdicts": [r.verdict.value for r in reports],
             "weakest_direction": worst.details["direction"]},
        )
    if kind == "royster":
        gamma = parse_real(p.get("gamma", "0"))
        shear_dir = parse_real(p["shear"]) if "shear" in p else gamma
        target = f.analytic_combination(-cmath.exp(2j * shear_dir))
        return royster_zeigler_check(target, gamma, grid, _candidates(p) + default_candidates())
    if kind == "injectivity":
        poly = _polygon(ctx, subj, f, stage_key)
        return injectivity_winding_check(poly, interior_probes(f))
    if kind == "geometric_direction":
        return direction_convexity_oracle(_polygon(ctx, subj, f, stage_key), parse_real(p.get("gamma", "0")))
    if kind == "full_convexity":
        return full_convexity_oracle(_polygon(ctx, subj, f, stage_key))
    if kind == "starlike":
        return starlike_oracle(_polygon(ctx, subj, f, stage_key))
    if kind == "boundary_csv":
        poly = _polygon(ctx, subj, f, stage_key)
        name = f"{ctx.scenario.name}__{subj.label}.csv".replace("=", "_")
        if ctx.out_dir is not None:
            poly.write_csv(ctx.out_dir / name)
        return CheckReport("boundary_csv", Verdict.PASS, float(poly.m), details={"file": name})
    if subj.eta is None:
        raise UsageError(f"check {kind!r} needs an eta combination")
    f1, f2 = _pair(ctx)
    if kind == "lemma":
        return lemma_identity_check(
            f1, f2, subj.eta, parse_real(p.get("mu", "0")), parse_real(p.get("nu", "0")), grid
        )
    if kind == "combined_dilatation":
        lam, phi = parse_real(p.get("lam", "1")), parse_real(p.get("phi", "0"))
        if ctx.scenario.combination.mode != "same":
            raise UsageError("combined_dilatation applies to same-parameter combinations")
        formula = combined_dilatation(dilatation_of(f1), dilatation_of(f2), subj.eta, lam, phi)
        direct = dilatation_of(subj.pre)
        gap = np.abs(grid.evaluate(formula) - grid.evaluate(direct))
        i = np.unravel_index(int(np.argmax(gap)), gap.shape)
        tol = parse_real(p.get("tolerance", "1e-10"))
        return CheckReport(
            "combined_dilatation",
            Verdict.PASS if gap[i] <= tol else Verdict.FAIL,
            float(gap[i]),
            complex(grid.points()[i]),
            tol,
            grid.tail_bound(formula, direct),
            {"lam": lam, "phi": phi},
        )
    if kind == "herglotz":
        lam, phi = parse_real(p.get("lam", "1")), parse_real(p.get("phi", "0"))
        if subj.eta.imag != 0:
            raise UsageError("the Herglotz decomposition check needs a real eta")
        rot = cmath.exp(2j * phi)
        return herglotz_decomposition_check(
            dilatation_of(f1) * rot, dilatation_of(f2) * rot, subj.eta.real, lam, grid
        )
    raise UsageError(f"unknown check {kind!r}")


# scenario-level checks


def run_scenario_check(ctx: Context, ck: CheckDecl) -> CheckReport:
    p = ck.params
    if ck.kind == "eta_bound":
        a1, a2 = parse_number(p["alpha1"]), parse_number(p["alpha2"])
        b = eta_bound(a1, a2).bound
        want = parse_real(p["value"])
        tol = parse_real(p.get("tolerance", "0"))
        ok = abs(b - want) <= tol
        return CheckReport("eta_bound", Verdict.PASS if ok else Verdict.FAIL, b,
                           witness=None if ok else complex(b), tolerance=tol, details={"expected": want})
    if ck.kind == "sharpness":
        alpha = parse_number(p["alpha"])
        b = eta_bound(alpha, alpha).bound
        beyond = parse_real(p.get("beyond", str(-(b + 0.05))))
        zs = np.arange(100, 1000) / 1000.0
        at_bound = np.array([sharpness_witness(float(alpha), -b, z) for z in zs])
        past = np.array([sharpness_witness(float(alpha), beyond, z) for z in zs])
        holds = float(at_bound.min()) >= -1e-12
        near_edge = zs >= 0.99
        k = int(np.argmin(np.where(near_edge, past, np.inf)))
        breaks = past[k] < 0
        return CheckReport(
            "sharpness",
            Verdict.PASS if holds and breaks else Verdict.FAIL,
            float(past[k]),
            witness=complex(zs[k]),
            tolerance=1e-12,
            details={"bound": b, "min_at_bound": float(at_bound.min()), "beyond": beyond,
                     "holds_at_bound": holds, "breaks_beyond": bool(breaks)},
        )
    if ck.kind == "positive_real":
        name = p.get("map")
        if name not in ctx.blends or ctx.blends[name] is None:
            raise UsageError("positive_real needs map=<name> of a blend-target map")
        b = ctx.blends[name]
        order = ctx.scenario.order
        pser = blend_p(b, order - 1)
        rep = p_positive_real(pser, ctx.grid)
        # the target derivative should factor as kernel * p
        t = blend_target(b, order).differentiate()
        gap = float(np.max(np.abs(ctx.grid.evaluate(t) - ctx.grid.evaluate(psi_series(b.kernel, order - 1) * pser))))
        rep.details["factorization_gap"] = gap
        return rep
    if ck.kind == "weight_condition":
        comb = ctx.scenario.combination
        if comb is None or comb.mode != "multi":
            raise UsageError("weight_condition needs a multi combination")
        ts = comb.weights
        b = eta_bound(parse_number(p["alpha1"]), parse_number(p["alpha2"])).bound
        tn = ts[-1]
        lead = ts[:-1] + [1 - tn]
        same_sign = all(x >= 0 for x in lead) or all(x <= 0 for x in lead)
        # the two-map eta-disk bound constrains |t_n|; the narrower 0 <= t_n form is reported alongside
        ok = same_sign and abs(tn) <= b
        return CheckReport("weight_condition", Verdict.PASS if ok else Verdict.FAIL, tn,
                           witness=None if ok else complex(tn),
                           details={"bound": b, "same_sign": same_sign, "weights": ts,
                                    "nonnegative_form_holds": 0 <= tn <= b})
    raise UsageError(f"unknown check {ck.kind!r}")


# assembly


def build_subjects(ctx: Context) -> list[Subject]:
    sc = ctx.scenario
    comb = sc.combination
    if comb is None:
        return [Subject(f"map={n}", f) for n, f in ctx.maps.items()]
    fs = [ctx.maps[n] for n in comb.maps]
    out = []
    if comb.mode == "multi":
        f = combine_multi(fs, comb.weights)
        label = "weights=" + ",".join(_fmt(t) for t in comb.weights)
        out.append(Subject(label, f))
    else:
        mode = Mode.SAME if comb.mode == "same" else Mode.CONJUGATE
        for eta in comb.etas:
            f = combine(CombinationSpec(fs[0], fs[1], eta, mode))
            out.append(Subject(f"eta={_fmt(eta)}", f, eta=eta))
    if comb.upgrade:
        for s in out:
            s.post = convexity_upgrade(s.pre, comb.upgrade)
    return out


def environment(sc: Scenario) -> dict[str, Any]:
    n_r, r_max, angles = sc.grid
    return {
        "order": sc.order,
        "r_max_evaluation": R_MAX,
        "grid": {"radii": n_r, "r_max": r_max, "angles_per_circle": angles},
        "polygon": {"r": sc.polygon[0], "vertices": sc.polygon[1]},
        "tolerances": {"royster_zeigler": RZ_TOLERANCE, "boundary_tail": BOUNDARY_TAIL_TOL},
        "seed": sc.seed,
    }


def _record(subject: str, ck: CheckDecl, rep: CheckReport) -> dict[str, Any]:
    return {
        "subject": subject,
        "check": ck.kind,
        "params": dict(ck.params),
        "expect": ck.expect,
        "meets_expectation": rep.verdict.value == ck.expect,
        "report": rep.to_dict(),
    }


def run_scenario(sc: Scenario, out_dir: str | Path | None = None) -> dict[str, Any]:
    """Run every construction and check of ``sc``; returns the structured report.

    Module errors are caught per check and listed under ``errors`` with the
    subject and check they came from; the remaining checks still run.
    """
    out = Path(out_dir) if out_dir is not None else None
    report: dict[str, Any] = {
        "schema": 1,
        "scenario": sc.name,
        "exercises": sc.exercises,
        "environment": environment(sc),
        "checks": [],
        "errors": [],
    }
    for ck in sc.checks:
        if ck.kind not in SUBJECT_CHECKS | SCENARIO_CHECKS:
            raise UsageError(f"{sc.source}: unknown check {ck.kind!r}")
    if not sc.checks:
        report["overall"] = Verdict.PASS.value
        return report

    n_r, r_max, angles = sc.grid
    grid = Grid.standard(n_r, r_max, angles)
    maps, blends = {}, {}
    for name, decl in sc.maps.items():
        try:
            maps[name], blends[name], _ = build_map(decl, sc.order)
        except HarmshearError as exc:
            report["errors"].append({"subject": f"map={name}", "check": "construct", "error": type(exc).__name__,
                                     "message": str(exc)})
    ctx = Context(sc, grid, maps, blends, out)
    if report["errors"]:
        report["overall"] = Verdict.FAIL.value
        return report

    scenario_checks = [ck for ck in sc.checks if ck.kind in SCENARIO_CHECKS]
    subject_checks = [ck for ck in sc.checks if ck.kind in SUBJECT_CHECKS]
    for ck in scenario_checks:
        try:
            report["checks"].append(_record("scenario", ck, run_scenario_check(ctx, ck)))
        except HarmshearError as exc:
            report["errors"].append({"subject": "scenario", "check": ck.kind, "error": type(exc).__name__,
                                     "message": str(exc)})

    subjects: list[Subject] = []
    if subject_checks:
        try:
            subjects = build_subjects(ctx)
        except HarmshearError as exc:
            report["errors"].append({"subject": "combination", "check": "construct",
                                     "error": type(exc).__name__, "message": str(exc)})

    def applies(ck: CheckDecl, subj: Subject) -> bool:
        if "eta" not in ck.params:
            return True
        want = complex(parse_number(ck.params["eta"]))
        return subj.eta is not None and abs(subj.eta - want) <= 1e-12

    def work(subj: Subject) -> tuple[list, list]:
        recs, errs = [], []
        for ck in subject_checks:
            if not applies(ck, subj):
                continue
            try:
                recs.append(_record(subj.label, ck, run_subject_check(ctx, subj, ck)))
            except HarmshearError as exc:
                errs.append({"subject": subj.label, "check": ck.kind, "error": type(exc).__name__,
                             "message": str(exc)})
        subj._polygons.clear()
        return recs, errs

    with ThreadPoolExecutor(max_workers=thread_cap()) as pool:
        # map() yields in submission order, so the report order is fixed
        for recs, errs in pool.map(work, subjects):
            report["checks"] += recs
            report["errors"] += errs

    report["overall"] = overall_verdict(report).value
    return report


def overall_verdict(report: dict[str, Any]) -> Verdict:
    if report["errors"]:
        return Verdict.FAIL
    misses = [c for c in report["checks"] if not c["meets_expectation"]]
    if not misses:
        return Verdict.PASS
    if any(c["report"]["verdict"] == Verdict.FAIL.value or c["expect"] == Verdict.FAIL.value for c in misses):
        return Verdict.FAIL
    return Verdict.INCONCLUSIVE


def report_json(report: dict[str, Any]) -> str:
    return json.dumps(_jsonable(report), indent=2) + "\n"


def report_text(report: dict[str, Any]) -> str:
    env = report["environment"]
    lines = [
        f"scenario: {report['scenario']}",
        f"exercises: {report['exercises']}",
        f"order={env['order']} grid={env['grid']['radii']}x{env['grid']['angles_per_circle']}"
        f"@r<={env['grid']['r_max']} polygon={env['polygon']['vertices']}@r={env['polygon']['r']}"
        f" seed={env['seed']}",
    ]
    for c in report["checks"]:
        r = c["report"]
        mark = "ok " if c["meets_expectation"] else "BAD"
        note = "" if c["expect"] == "pass" else f" (expected {c['expect']})"
        lines.append(
            f"  [{mark}] {c['subject']:<22} {c['check']:<20} {r['verdict']:<12} "
            f"extremal={_short(r['extremal_value'])}{note}"
        )
    for e in report["errors"]:
        lines.append(f"  [ERR] {e['subject']:<22} {e['check']:<20} {e['error']}: {e['message']}")
    lines.append(f"overall: {report['overall']}")
    return "\n".join(lines) + "\n"


def _short(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)
