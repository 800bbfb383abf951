"""Linear combinations of harmonic maps and the eta-disk bound.

Two ways of combining ``f1 = h1 + conj(g1)`` and ``f2 = h2 + conj(g2)``:

* same-parameter:  ``h = eta h1 + (1-eta) h2``, ``g = eta g1 + (1-eta) g2``
* conjugate-parameter (the harmonic map ``eta f1 + (1-eta) f2``):
  the co-analytic part carries ``conj(eta)`` instead.

For real ``eta`` they coincide.
"""

from __future__ import annotations

import cmath
import enum
import math
import numbers
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import SingularCombinationError, UsageError
from .kernels import KernelParams, phi_series, psi
from .report import CheckReport, Grid, Verdict, argmin_point
from .series import PowerSeries
from .shear import HarmonicMapping


class Mode(str, enum.Enum):
    SAME = "same-parameter"
    CONJUGATE = "conjugate-parameter"


@dataclass(frozen=True, eq=False)
class CombinationSpec:
    f1: HarmonicMapping
    f2: HarmonicMapping
    eta: complex
    mode: Mode = Mode.SAME
    lam: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        object.__setattr__(self, "eta", complex(self.eta))

    @property
    def coanalytic_weight(self) -> complex:
        return self.eta.conjugate() if self.mode is Mode.CONJUGATE else self.eta


def combine(spec: CombinationSpec) -> HarmonicMapping:
    eta, eg = spec.eta, spec.coanalytic_weight
    f1, f2 = spec.f1, spec.f2
    return HarmonicMapping(f1.h * eta + f2.h * (1 - eta), f1.g * eg + f2.g * (1 - eg))


def combine_multi(fs: Sequence[HarmonicMapping], ts: Sequence[float]) -> HarmonicMapping:
    """``sum_k t_k f_k`` with real weights summing to one."""
    if len(fs) != len(ts) or not fs:
        raise UsageError("need one weight per mapping")
    if abs(math.fsum(ts) - 1.0) > 1e-12:
        raise UsageError(f"weights must sum to 1, got {math.fsum(ts)!r}")
    h = fs[0].h * ts[0]
    g = fs[0].g * ts[0]
    for f, t in zip(fs[1:], ts[1:]):
        h = h + f.h * t
        g = g + f.g * t
    return HarmonicMapping(h, g)


def combined_dilatation(
    omega1: PowerSeries, omega2: PowerSeries, eta: complex, lam: float = 1.0, phi: float = 0.0
) -> PowerSeries:
    """Dilatation of the same-parameter combination of two shears sharing a target.

    Assumes ``lam (h1 - e^{2i phi} g1) = h2 - e^{2i phi} g2 = lam psi``, so that
    ``h1' = psi'/(1 - e^{2i phi} w1)`` and ``h2' = lam psi'/(1 - e^{2i phi} w2)``.
    """
    rot = cmath.exp(2j * phi)
    eta = complex(eta)
    if eta + lam * (1 - eta) == 0:
        raise SingularCombinationError("eta + lam (1 - eta) = 0")
    u1 = 1.0 - omega1 * rot
    u2 = 1.0 - omega2 * rot
    num = (omega1 * u2) * eta + (omega2 * u1) * (lam * (1 - eta))
    den = u2 * eta + u1 * (lam * (1 - eta))
    if den.coeffs[0] == 0:
        raise SingularCombinationError("combined dilatation has a pole at the origin")
    return num * den.recip()


def herglotz_weights(eta: float, lam: float) -> tuple[float, float]:
    s = eta + lam * (1 - eta)
    if s == 0:
        raise SingularCombinationError("eta + lam (1 - eta) = 0")
    return eta / s, lam * (1 - eta) / s


def herglotz_decomposition_check(
    omega1: PowerSeries,
    omega2: PowerSeries,
    eta: float,
    lam: float,
    grid: Grid,
    tolerance: float = 1e-9,
) -> CheckReport:
    """Check ``Re (1+w)/(1-w) = a Re (1+w1)/(1-w1) + b Re (1+w2)/(1-w2)`` on the grid.

    ``omega1, omega2`` are taken in the rotated frame (``phi = 0``).  The
    verdict passes only if the identity holds and both weights ``a, b`` are
    non-negative, i.e. the combined dilatation is forced below one in modulus.
    """
    a, b = herglotz_weights(eta, lam)
    w1, w2 = grid.evaluate(omega1), grid.evaluate(omega2)
    num = eta * w1 * (1 - w2) + lam * (1 - eta) * w2 * (1 - w1)
    den = eta * (1 - w2) + lam * (1 - eta) * (1 - w1)
    w = num / den
    lhs = ((1 + w) / (1 - w)).real
    rhs = a * ((1 + w1) / (1 - w1)).real + b * ((1 + w2) / (1 - w2)).real
    gap = np.abs(lhs - rhs)
    i = np.unravel_index(int(np.argmax(gap)), gap.shape)
    residual = float(gap[i])
    nonneg = a >= 0 and b >= 0 and (a > 0 or b > 0)
    ok = residual <= tolerance and nonneg
    return CheckReport(
        "herglotz_decomposition",
        Verdict.PASS if ok else Verdict.FAIL,
        extremal_value=residual,
        witness=complex(grid.points()[i]),
        tolerance=tolerance,
        tail_bound=grid.tail_bound(omega1, omega2),
        details={"weights": [a, b], "weights_nonnegative": nonneg, "identity_holds": residual <= tolerance},
    )


@dataclass(frozen=True)
class EtaBound:
    alpha1: float
    alpha2: float
    bound: float


def eta_bound(alpha1, alpha2) -> EtaBound:
    """``(1-a1)(1-a2) / (2 (a1+a2))``, the radius of the admissible eta-disk.

    Rational inputs (``Fraction``, ``int``) are evaluated exactly before the
    final conversion to float.
    """
    for a in (alpha1, alpha2):
        if not (1e-6 <= a < 1):
            raise UsageError(f"dilatation bound must lie in [1e-6, 1), got {a!r}")
    if isinstance(alpha1, numbers.Rational) and isinstance(alpha2, numbers.Rational):
        a1, a2 = Fraction(alpha1), Fraction(alpha2)
    else:
        a1, a2 = float(alpha1), float(alpha2)
    bound = (1 - a1) * (1 - a2) / (2 * (a1 + a2))
    return EtaBound(float(alpha1), float(alpha2), float(bound))


def sharpness_witness(alpha: float, eta: float, z: float) -> float:
    """Left side of the ``|omega| < 1`` criterion with ``w1 = alpha z``, ``w2 = -alpha z``.

    A negative value means the combined dilatation reaches modulus one.
    """
    w1, w2 = alpha * z, -alpha * z
    first = abs(1 - w1) ** 2 * (1 - abs(w2) ** 2)
    cross = eta * (w1 - w2) * (1 - np.conj(w1)) * (1 - np.conj(w2))
    return float(first + 2 * np.real(cross))


def lemma_identity_check(
    f1: HarmonicMapping,
    f2: HarmonicMapping,
    eta: complex,
    mu: float,
    nu: float,
    grid: Grid,
    tolerance: float = 1e-9,
    re_tolerance: float = 1e-6,
) -> CheckReport:
    """Check the decomposition of ``(h' - e^{-2i mu} g')/psi`` for ``eta f1 + (1-eta) f2``.

    Both inputs must be shears with ``h_k + e^{-2i mu} g_k = phi(mu, nu)``.  The
    right-hand side is ``Re(eta) q1 + (1 - Re eta) q2`` with
    ``q_k = (h_k' - e^{-2i mu} g_k')/(h_k' + e^{-2i mu} g_k')``.  Passes when the
    identity holds to ``tolerance`` and ``min Re`` of the right side is at
    least ``-re_tolerance``.
    """
    e = cmath.exp(-2j * mu)
    kp = KernelParams(mu, nu)
    target = phi_series(kp, f1.order)
    for name, f in (("f1", f1), ("f2", f2)):
        if f.order != f1.order:
            raise UsageError("f1 and f2 must share a truncation order")
        gap = f.analytic_combination(e).max_abs_diff(target)
        if gap > 1e-10:
            raise UsageError(f"{name} is not a shear with h + e^(-2i mu) g = phi(mu, nu) (gap {gap:.3g})")
    eta = complex(eta)
    F = combine(CombinationSpec(f1, f2, eta, Mode.CONJUGATE))
    pts = grid.points()
    ps = psi(kp, pts)

    def ev(s: PowerSeries) -> np.ndarray:
        return grid.evaluate(s)

    dh, dg = ev(F.dh()), ev(F.dg())
    dh1, dg1, dh2, dg2 = ev(f1.dh()), ev(f1.dg()), ev(f2.dh()), ev(f2.dg())
    lhs = (dh - e * dg) / ps
    q1 = (dh1 - e * dg1) / (dh1 + e * dg1)
    q2 = (dh2 - e * dg2) / (dh2 + e * dg2)
    rhs = eta.real * q1 + (1 - eta.real) * q2
    residual = float(np.max(np.abs(lhs - rhs)))
    min_re, at = argmin_point(rhs.real, pts)
    max_w1 = float(np.max(np.abs(dg1 / dh1)))
    max_w2 = float(np.max(np.abs(dg2 / dh2)))
    small = max_w1 < 1 / 5 and max_w2 < 1 / 7
    details = {
        "residual": residual,
        "min_re_rhs": min_re,
        "max_abs_omega1": max_w1,
        "max_abs_omega2": max_w2,
        "small_dilatation_case": small,
    }
    if small:
        # |w| < a  =>  Re (1-w)/(1+w) lies in ((1-a)/(1+a), (1+a)/(1-a))
        t = eta.real
        lo1, hi1 = 2 / 3, 3 / 2
        lo2, hi2 = 3 / 4, 4 / 3
        details["small_dilatation_lower_bound"] = (lo1 if t >= 0 else hi1) * t + (lo2 if t <= 1 else hi2) * (1 - t)
    ok = residual <= tolerance and min_re >= -re_tolerance
    return CheckReport(
        "lemma_identity",
        Verdict.PASS if ok else Verdict.FAIL,
        extremal_value=min_re,
        witness=at,
        tolerance=tolerance,
        tail_bound=grid.tail_bound(F.dh(), F.dg()),
        details=details,
    )
