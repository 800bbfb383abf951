"""End-to-end acceptance checks, one test per criterion.

Each test records its outcome with ``record_criterion`` before asserting, so
the terminal summary prints one PASS/FAIL line per criterion even when a test
fails.
"""

import cmath
import json
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from conftest import record_criterion
from harmshear.cli import EXIT_OK, cli_main
from harmshear.combine import (
    CombinationSpec,
    Mode,
    combine,
    combined_dilatation,
    eta_bound,
    lemma_identity_check,
    sharpness_witness,
)
from harmshear.criteria import check_local_univalence, convexity_upgrade, css_direction_check
from harmshear.geometry import (
    boundary_polyline,
    direction_convexity_oracle,
    full_convexity_oracle,
    injectivity_winding_check,
    interior_probes,
    starlike_oracle,
)
from harmshear.kernels import BlendFamily, BlendParams, KernelParams, blend_p, blend_target, p_positive_real, phi_series
from harmshear.report import Grid, Verdict
from harmshear.scenario import bundled_scenarios
from harmshear.series import PowerSeries
from harmshear.shear import DilatationSpec, ShearSpec, dilatation_of, shear_construct

ORDER = 4096
HALF_PI = math.pi / 2


@pytest.fixture(scope="module")
def grid():
    return Grid.standard()


def _record(n, desc, ok, elapsed, limit):
    in_time = limit is None or elapsed < limit
    record_criterion(n, desc, ok and in_time)
    return in_time


# 1. shear round trip


def test_criterion_1_shear_round_trip():
    start = time.perf_counter()
    worst_target = worst_omega = 0.0
    count = 0
    for mu in (0.0, HALF_PI, math.pi):
        for nu in (0.0, math.pi / 3, HALF_PI):
            for power in (1, 2):
                if count == 12:
                    break
                target = phi_series(KernelParams(mu, nu), 256)
                om = DilatationSpec.monomial(0.5, power)
                spec = ShearSpec.kernel_convention(target, mu, om)
                f = shear_construct(spec)
                worst_target = max(worst_target, f.analytic_combination(spec.c).max_abs_diff(target))
                worst_omega = max(worst_omega, dilatation_of(f).max_abs_diff(om.series(255)))
                count += 1
    elapsed = time.perf_counter() - start
    ok = count == 12 and worst_target <= 1e-12 and worst_omega <= 1e-12
    in_time = _record(1, "shear round trip (12 kernel/dilatation pairs)", ok, elapsed, 1.0)
    assert count == 12
    assert worst_target <= 1e-12, worst_target
    assert worst_omega <= 1e-12, worst_omega
    assert in_time, elapsed


# 2. combined dilatation formula against the direct quotient


def _small_dilatation(rng):
    alpha = 0.3 * math.sqrt(rng.uniform()) * cmath.exp(2j * math.pi * rng.uniform())
    if rng.uniform() < 0.5:
        return DilatationSpec.monomial(alpha, int(rng.integers(1, 4)))
    return DilatationSpec.blaschke(alpha, 0.5 * rng.uniform() * cmath.exp(2j * math.pi * rng.uniform()))


def test_criterion_2_combined_dilatation(grid):
    start = time.perf_counter()
    rng = np.random.default_rng(42)
    target = phi_series(KernelParams(0.0, 0.0), ORDER)
    cases = []
    for _ in range(20):
        eta = 0.5 + 0.5 * math.sqrt(rng.uniform()) * cmath.exp(2j * math.pi * rng.uniform())
        cases.append((eta, rng.uniform(0.5, 2), rng.uniform(0, math.pi), _small_dilatation(rng), _small_dilatation(rng)))
    worst = 0.0
    for eta, lam, phi, o1, o2 in cases:
        f1 = shear_construct(ShearSpec(target, -cmath.exp(2j * phi), o1))
        f2 = shear_construct(ShearSpec(target, -cmath.exp(2j * phi), o2)).scaled(lam)
        direct = grid.evaluate(dilatation_of(combine(CombinationSpec(f1, f2, eta))))
        formula = grid.evaluate(combined_dilatation(o1.series(ORDER - 1), o2.series(ORDER - 1), eta, lam, phi))
        worst = max(worst, float(np.max(np.abs(direct - formula))))
    # eta = 1/2, phi = 0, omega1 = z, omega2 = -z  =>  omega = z^2
    z = PowerSeries.monomial(1, 1, 64)
    hand = combined_dilatation(z, -z, 0.5, 1.0, 0.0).max_abs_diff(PowerSeries.monomial(1, 2, 64))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-10 and hand <= 1e-15
    in_time = _record(2, "combined dilatation formula equals the direct quotient", ok, elapsed, 5.0)
    assert hand <= 1e-15
    assert worst <= 1e-10, worst
    assert in_time, elapsed


# 3. eta-disk bound


def _disk_etas(radius=1.0):
    etas = [radius * (i + 1) / 10 * cmath.exp(2j * math.pi * k / 10) for i in range(10) for k in range(10)]
    return etas + [1j * radius, -1j * radius]


def test_criterion_3_eta_bound(grid):
    start = time.perf_counter()
    exact = eta_bound(Fraction(1, 5), Fraction(1, 7)).bound
    mu = math.pi / 4
    target = phi_series(KernelParams(mu, HALF_PI), ORDER)
    f1 = shear_construct(ShearSpec.kernel_convention(target, mu, DilatationSpec.monomial(0.2)))
    f2 = shear_construct(ShearSpec.kernel_convention(target, mu, DilatationSpec.monomial(-1 / 7)))
    etas = _disk_etas()
    worst, failures = 0.0, []
    for eta in etas:
        F = combine(CombinationSpec(f1, f2, eta, Mode.CONJUGATE))
        rep = check_local_univalence(F, grid)
        w = float(np.max(np.abs(grid.evaluate(F.dg()) / grid.evaluate(F.dh()))))
        worst = max(worst, w)
        if not rep.passed or w >= 1:
            failures.append(eta)
    elapsed = time.perf_counter() - start
    ok = exact == 1.0 and not failures and len(etas) >= 100
    in_time = _record(3, "eta bound 1 for (1/5, 1/7) and univalence on the closed disk", ok, elapsed, 30.0)
    assert exact == 1.0
    assert len(etas) >= 100
    assert not failures, failures
    assert worst < 1
    assert in_time, elapsed


# 4. sharpness of the bound


def test_criterion_4_sharpness():
    start = time.perf_counter()
    alpha = Fraction(1, 3)
    bound = eta_bound(alpha, alpha).bound
    zs = np.arange(100, 1000) / 1000
    at_bound = min(sharpness_witness(1 / 3, -1 / 3, z) for z in zs)
    past = [sharpness_witness(1 / 3, -0.385, z) for z in zs]
    breaks = any(v < 0 for z, v in zip(zs, past) if z >= 0.99)
    elapsed = time.perf_counter() - start
    ok = abs(bound - 1 / 3) < 1e-15 and at_bound >= -1e-12 and breaks
    in_time = _record(4, "bound 1/3 is sharp for alpha = 1/3", ok, elapsed, 1.0)
    assert bound == pytest.approx(1 / 3, abs=1e-15)
    assert at_bound >= -1e-12
    assert breaks
    assert in_time, elapsed


# 5. directional convexity, analytic vs geometric


def test_criterion_5_direction_cross_validation(grid):
    start = time.perf_counter()
    target = phi_series(KernelParams(0, 0), ORDER)
    f1 = shear_construct(ShearSpec.along_direction(target, 0, DilatationSpec.monomial(0.4)))
    f2 = shear_construct(ShearSpec.along_direction(target, 0, DilatationSpec.monomial(0.6)))
    rows = []
    for t in (0, 0.25, 0.5, 0.75, 1):
        F = combine(CombinationSpec(f1, f2, t))
        css = css_direction_check(F, 0.0, grid).verdict
        verdicts = {}
        for m in (2048, 1024):
            p = boundary_polyline(F, 0.99, m)
            verdicts[m] = (
                injectivity_winding_check(p, interior_probes(F)).verdict,
                direction_convexity_oracle(p, 0.0).verdict,
            )
        rows.append((t, css, verdicts))
    elapsed = time.perf_counter() - start
    ok = all(
        css is Verdict.PASS and v[2048] == (Verdict.PASS, Verdict.PASS) and v[1024] == v[2048]
        for _, css, v in rows
    )
    in_time = _record(5, "analytic and geometric direction checks agree", ok, elapsed, 30.0)
    assert ok, rows
    assert in_time, elapsed


# 6. D^-n convexity upgrade


def test_criterion_6_convexity_upgrade():
    start = time.perf_counter()
    target = phi_series(KernelParams(0, HALF_PI), ORDER)
    f1 = shear_construct(ShearSpec(target, 1, DilatationSpec.monomial(1)))
    f2 = shear_construct(ShearSpec(target, 1, DilatationSpec.monomial(1, 2)))
    rows = []
    for t in (0, 0.5, 1):
        f = combine(CombinationSpec(f1, f2, t))
        star = starlike_oracle(boundary_polyline(f, 0.99, 2048)).verdict
        for n in (1, 2):
            F = convexity_upgrade(f, n)
            rows.append((t, n, star, full_convexity_oracle(boundary_polyline(F, 0.99, 2048)).verdict))
    elapsed = time.perf_counter() - start
    ok = all(s is Verdict.PASS and c is Verdict.PASS for _, _, s, c in rows)
    in_time = _record(6, "D^-n upgrade of starlike combinations is convex", ok, elapsed, 30.0)
    assert ok, rows
    assert in_time, elapsed


# 7. conjugate-combination identity


def test_criterion_7_conjugate_identity(grid):
    start = time.perf_counter()
    mu, nu = math.pi / 4, HALF_PI
    target = phi_series(KernelParams(mu, nu), ORDER)
    f1 = shear_construct(ShearSpec.kernel_convention(target, mu, DilatationSpec.monomial(0.2)))
    f2 = shear_construct(ShearSpec.kernel_convention(target, mu, DilatationSpec.monomial(-1 / 7, 2)))
    rng = np.random.default_rng(7)
    etas = [complex(a, b) for a, b in zip(rng.uniform(-1, 1, 10), rng.uniform(-1, 1, 10))]
    residual = max(lemma_identity_check(f1, f2, eta, mu, nu, grid).details["residual"] for eta in etas)
    small = [lemma_identity_check(f1, f2, complex(-1, b), mu, nu, grid) for b in (0.0, 0.5, -0.9)]
    min_re = min(r.extremal_value for r in small)
    elapsed = time.perf_counter() - start
    ok = residual <= 1e-9 and min_re >= -1e-6 and all(r.details["small_dilatation_case"] for r in small)
    in_time = _record(7, "conjugate-combination identity and its small-dilatation case", ok, elapsed, 10.0)
    assert residual <= 1e-9, residual
    assert min_re >= -1e-6, min_re
    assert in_time, elapsed


# 8. blend targets


def _blend_shear(b: BlendParams, om: DilatationSpec):
    target = blend_target(b, ORDER)
    if b.family is BlendFamily.HALF_PLANE:
        spec = ShearSpec.kernel_convention(target, b.mu, om)
    else:
        # the log blend fixes h - e^{-2i mu} g
        spec = ShearSpec(target, -cmath.exp(-2j * b.mu), om)
    return shear_construct(spec, allow_scaled_target=True)


def _blend_cases():
    for family in (BlendFamily.HALF_PLANE, BlendFamily.LOG):
        for A, B in ((1, 0), (0, 1), (1, 1)):
            for mu in (0.0, math.pi):
                yield BlendParams(A=A, B=B, mu=mu, nu1=math.pi / 3, nu2=HALF_PI, family=family)


def _blend_rows(grid, direction):
    rows = []
    for b in _blend_cases():
        pos = p_positive_real(blend_p(b, ORDER), grid).verdict
        f1 = _blend_shear(b, DilatationSpec.monomial(0.5))
        f2 = _blend_shear(b, DilatationSpec.monomial(-0.3))
        for f in (f1, combine(CombinationSpec(f1, f2, 0.5))):
            rows.append((b, pos, css_direction_check(f, direction(b.mu), grid).verdict))
    return rows


def test_criterion_8_blend_corollaries(grid):
    start = time.perf_counter()
    rows = _blend_rows(grid, lambda mu: -(mu + HALF_PI))
    elapsed = time.perf_counter() - start
    bad = [
        (b.family.value, b.A, b.B, b.mu, pos.value, css.value)
        for b, pos, css in rows
        if pos is not Verdict.PASS or css is not Verdict.PASS
    ]
    in_time = _record(8, "blend targets: positive p and convexity in direction -(mu + pi/2)", not bad, elapsed, 30.0)
    assert not bad, bad
    assert in_time, elapsed


def test_log_blend_is_convex_in_direction_minus_mu(grid):
    # the log blend certifies in the direction -mu for every (A, B)
    rows = [r for r in _blend_rows(grid, lambda mu: -mu) if r[0].family is BlendFamily.LOG]
    assert all(pos is Verdict.PASS and css is Verdict.PASS for _, pos, css in rows)


# 9. determinism


def test_criterion_9_determinism(tmp_path, capsys):
    names = [p.stem for p in bundled_scenarios()]
    codes, differing = [], []
    for name in names:
        outs = []
        for k in (1, 2):
            d = tmp_path / f"run{k}"
            codes.append(cli_main(["run", name, "--out", str(d)]))
            outs.append((d / f"{name}.json").read_bytes())
        capsys.readouterr()
        if outs[0] != outs[1]:
            differing.append(name)
        json.loads(outs[0])
    ok = not differing and len(names) > 0
    record_criterion(9, "repeated runs give byte-identical reports", ok)
    assert not differing, differing
    assert all(c == EXIT_OK for c in codes)
