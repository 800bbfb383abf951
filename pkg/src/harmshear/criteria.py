"""Analytic verdicts on sampled grids.

* local univalence: Jacobian ``|h'|^2 - |g'|^2 > 0`` and ``|g'/h'| < 1``;
* Royster-Zeigler: an analytic ``phi`` is convex in the direction ``gamma``
  iff for some kernel ``(m, nu)`` the real part of
  ``e^{-i(m+gamma)} phi'(z) / psi_{m,nu}(z)`` is non-negative on the disk;
* the shear reduction: a locally univalent ``h + conj(g)`` is univalent and
  convex in the direction ``phi`` iff ``h - e^{2i phi} g`` is;
* the operator ``D a = z a'`` and its inverse, which turn starlike harmonic
  maps into convex ones.

Candidates for the Royster-Zeigler search are written in kernel
parameters: ``(m, nu)`` stands for the polynomial ``1/psi_{m,nu}``.
"""

from __future__ import annotations

import cmath
import math
from typing import Iterable, Sequence

import numpy as np

from .errors import UsageError
from .geometry import BOUNDARY_TAIL_TOL
from .report import CheckReport, Grid, Verdict, argmax_point, argmin_point
from .series import PowerSeries
from .shear import HarmonicMapping

RZ_TOLERANCE = 1e-9


def default_candidates(n_mu: int = 24, n_nu: int = 12) -> list[tuple[float, float]]:
    mus = [2 * math.pi * i / n_mu for i in range(n_mu)]
    nus = [math.pi * j / n_nu for j in range(n_nu)]
    return [(m, n) for m in mus for n in nus]


def check_local_univalence(f: HarmonicMapping, grid: Grid, tolerance: float = 1e-9) -> CheckReport:
    dh_s, dg_s = f.dh(), f.dg()
    pts = grid.points()
    dh, dg = grid.evaluate(dh_s), grid.evaluate(dg_s)
    jac = np.abs(dh) ** 2 - np.abs(dg) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        om = np.where(dh != 0, np.abs(dg) / np.abs(dh), np.inf)
    j_min, j_at = argmin_point(jac, pts)
    w_max, w_at = argmax_point(om, pts)
    h0, g0 = dh_s.coeffs[0], dg_s.coeffs[0]
    j0 = abs(h0) ** 2 - abs(g0) ** 2
    if j0 < j_min:
        j_min, j_at = float(j0), 0j
    tail = grid.tail_bound(dh_s, dg_s)
    details = {"min_jacobian": j_min, "max_abs_dilatation": w_max}
    if tail > BOUNDARY_TAIL_TOL:
        return CheckReport(
            "local_univalence", Verdict.INCONCLUSIVE, w_max, w_at, tolerance, tail,
            {**details, "reason": "series truncation tail too large at the outer radius"},
        )
    if j_min <= 0:
        return CheckReport("local_univalence", Verdict.FAIL, w_max, j_at, tolerance, tail, details)
    verdict = Verdict.PASS if w_max < 1 - tolerance else Verdict.FAIL
    return CheckReport("local_univalence", verdict, w_max, w_at, tolerance, tail, details)


def royster_zeigler_values(
    dphi: np.ndarray, pts: np.ndarray, gamma: float, m: float, nu: float
) -> np.ndarray:
    w = np.exp(1j * m)
    quad = 1.0 - 2.0 * pts * w * math.cos(nu) + pts * pts * w * w
    return (cmath.exp(-1j * (m + gamma)) * dphi * quad).real


def royster_zeigler_check(
    phi: PowerSeries,
    gamma: float,
    grid: Grid,
    candidates: Iterable[tuple[float, float]] | None = None,
    tolerance: float = RZ_TOLERANCE,
) -> CheckReport:
    """Search candidate kernels for one that certifies convexity in direction ``gamma``.

    Only a certificate is conclusive: when no candidate works the verdict is
    ``inconclusive``, since the search covers finitely many kernels.
    """
    dphi_s = phi.differentiate()
    if not np.any(dphi_s.coeffs):
        raise UsageError("Royster-Zeigler check needs a non-constant map")
    cands = list(candidates) if candidates is not None else default_candidates()
    pts = grid.points()
    dphi = grid.evaluate(dphi_s)
    tail = grid.tail_bound(dphi_s)
    best = (-math.inf, None, None)
    for m, nu in cands:
        vals = royster_zeigler_values(dphi, pts, gamma, m, nu)
        lo, at = argmin_point(vals, pts)
        if lo > best[0]:
            best = (lo, at, (m, nu))
        if lo >= -tolerance:
            break
    lo, at, pair = best
    certified = lo >= -tolerance
    if certified and tail > BOUNDARY_TAIL_TOL:
        verdict = Verdict.INCONCLUSIVE
    else:
        verdict = Verdict.PASS if certified else Verdict.INCONCLUSIVE
    return CheckReport(
        "royster_zeigler",
        verdict,
        extremal_value=lo,
        witness=at,
        tolerance=tolerance,
        tail_bound=tail,
        details={
            "gamma": gamma,
            "best_candidate": list(pair) if pair else None,
            "certified": certified,
            "candidates_tried": len(cands),
        },
    )


def css_direction_check(
    f: HarmonicMapping,
    phi: float,
    grid: Grid,
    extra_candidates: Sequence[tuple[float, float]] = (),
) -> CheckReport:
    """Univalent and convex in the direction ``phi`` via the shear reduction."""
    loc = check_local_univalence(f, grid)
    target = f.analytic_combination(-cmath.exp(2j * phi))
    cands = list(extra_candidates) + default_candidates()
    rz = royster_zeigler_check(target, phi, grid, cands)
    if loc.verdict is Verdict.FAIL:
        verdict = Verdict.FAIL
    elif loc.passed and rz.passed:
        verdict = Verdict.PASS
    else:
        verdict = Verdict.INCONCLUSIVE
    return CheckReport(
        "css_direction",
        verdict,
        extremal_value=rz.extremal_value,
        witness=loc.witness if verdict is Verdict.FAIL else rz.witness,
        tolerance=rz.tolerance,
        tail_bound=max(loc.tail_bound or 0.0, rz.tail_bound or 0.0),
        details={"direction": phi, "local_univalence": loc.to_dict(), "royster_zeigler": rz.to_dict()},
    )


def D_operator(a: PowerSeries, n: int = 1) -> PowerSeries:
    """``D^n a`` with ``D a = z a'``: the k-th coefficient times ``k**n``."""
    if n < 0:
        raise UsageError("D^n needs n >= 0")
    k = np.arange(a.order, dtype=float)
    return PowerSeries(a.coeffs * k**n)


def D_inverse(a: PowerSeries, n: int = 1) -> PowerSeries:
    if n < 0:
        raise UsageError("D^-n needs n >= 0")
    if n == 0:
        return a
    if a.coeffs[0] != 0:
        raise UsageError("D is not invertible on series with a nonzero constant term")
    c = np.zeros(a.order, dtype=complex)
    k = np.arange(1, a.order, dtype=float)
    c[1:] = a.coeffs[1:] / k**n
    return PowerSeries(c)


def convexity_upgrade(f: HarmonicMapping, n: int) -> HarmonicMapping:
    """``H + conj(G)`` with ``D^n H = h`` and ``D^n G = (-1)^n g``.

    Convex whenever ``f`` is starlike; the caller checks that separately.
    """
    if n < 0:
        raise UsageError("upgrade order must be non-negative")
    if not f.is_normalized:
        raise UsageError("convexity upgrade needs a normalized map")
    return HarmonicMapping(D_inverse(f.h, n), D_inverse(f.g, n) * (-1) ** n)
