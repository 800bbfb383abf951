"""The analytic targets that get sheared.

``psi(mu, nu)`` is the reciprocal of ``1 - 2 z e^{i mu} cos(nu) + z^2 e^{2 i mu}``,
whose two roots ``e^{-i(mu +- nu)}`` sit on the unit circle, and
``phi(mu, nu)`` is its antiderivative vanishing at the origin: a convex
univalent map onto a half-plane or a strip.  Two blended families mix
these with weights ``A, B >= 0``.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidBlendError
from .report import CheckReport, Grid, Verdict, argmin_point
from .series import DEFAULT_ORDER, PowerSeries

_SIN_EPS = 1e-8


@dataclass(frozen=True)
class KernelParams:
    mu: float
    nu: float

    def quadratic(self, order: int = DEFAULT_ORDER) -> PowerSeries:
        """``1 - 2 z e^{i mu} cos nu + z^2 e^{2 i mu}`` as a series."""
        w = cmath.exp(1j * self.mu)
        return PowerSeries.polynomial([1.0, -2.0 * w * math.cos(self.nu), w * w], order)


def psi(k: KernelParams, z):
    w = np.exp(1j * k.mu)
    z = np.asarray(z, dtype=complex)
    out = 1.0 / (1.0 - 2.0 * z * w * math.cos(k.nu) + z * z * w * w)
    return complex(out) if out.ndim == 0 else out


def psi_series(k: KernelParams, order: int = DEFAULT_ORDER) -> PowerSeries:
    return k.quadratic(order).recip()


def phi_antiderivative(k: KernelParams, z):
    """Closed form of ``int_0^z psi``; principal logarithms throughout.

    ``nu`` is reduced mod ``2 pi``; when ``|sin nu| < 1e-8`` the kernel is a
    perfect square and the rational antiderivative is used instead of the
    logarithmic one (which divides by ``sin nu``).
    """
    z = np.asarray(z, dtype=complex)
    nu = math.fmod(k.nu, 2 * math.pi)
    if nu < 0:
        nu += 2 * math.pi
    s = math.sin(nu)
    w = np.exp(1j * k.mu)
    if abs(s) < _SIN_EPS:
        sign = 1.0 if math.cos(nu) > 0 else -1.0
        out = z / (1.0 - sign * z * w)
    else:
        a = np.exp(1j * (k.mu + nu))
        b = np.exp(1j * (k.mu - nu))
        # each factor has positive real part on the disk, so the principal
        # branches can be split
        out = -np.conj(w) / (2j * s) * (np.log(1.0 - z * a) - np.log(1.0 - z * b))
    return complex(out) if out.ndim == 0 else out


def phi_series(k: KernelParams, order: int = DEFAULT_ORDER) -> PowerSeries:
    return psi_series(k, order - 1).integrate()


class BlendFamily(str, enum.Enum):
    HALF_PLANE = "half-plane-blend"
    LOG = "log-blend"


@dataclass(frozen=True)
class BlendParams:
    """Weights and angles of a blended target.

    ``half-plane-blend``::

        A z (1 - z e^{i mu} cos nu1) / (1 - z^2 e^{2 i mu}) + B phi(mu, nu2)

    ``log-blend`` (``nu1`` unused)::

        A e^{-i mu} artanh(z e^{i mu}) + B z psi(mu, nu2)
    """

    A: float
    B: float
    mu: float
    nu1: float = 0.0
    nu2: float = 0.0
    family: BlendFamily = BlendFamily.HALF_PLANE

    def __post_init__(self):
        object.__setattr__(self, "family", BlendFamily(self.family))
        if self.A < 0 or self.B < 0 or not (self.A + self.B > 0):
            raise InvalidBlendError(f"need A, B >= 0 with A + B > 0, got A={self.A}, B={self.B}")

    @property
    def kernel(self) -> KernelParams:
        """Kernel ``psi`` with ``target' = psi * p``, ``p`` from :func:`blend_p`."""
        if self.family is BlendFamily.HALF_PLANE:
            return KernelParams(self.mu + math.pi / 2, math.pi / 2)
        return KernelParams(self.mu, self.nu2)


def _one_minus_w2z2(mu: float, order: int) -> PowerSeries:
    w = cmath.exp(1j * mu)
    return PowerSeries.polynomial([1.0, 0.0, -w * w], order)


def blend_target(b: BlendParams, order: int = DEFAULT_ORDER) -> PowerSeries:
    w = cmath.exp(1j * b.mu)
    out = PowerSeries.zeros(order)
    if b.family is BlendFamily.HALF_PLANE:
        if b.A:
            num = PowerSeries.polynomial([0.0, 1.0, -w * math.cos(b.nu1)], order)
            out = out + b.A * (num * _one_minus_w2z2(b.mu, order).recip())
        if b.B:
            out = out + b.B * phi_series(KernelParams(b.mu, b.nu2), order)
    else:
        if b.A:
            out = out + b.A * _one_minus_w2z2(b.mu, order - 1).recip().integrate()
        if b.B:
            z = PowerSeries.monomial(1.0, 1, order)
            out = out + b.B * (z * psi_series(KernelParams(b.mu, b.nu2), order))
    return out


def blend_p(b: BlendParams, order: int = DEFAULT_ORDER) -> PowerSeries:
    """The positive-real-part factor ``p`` with ``target' = psi_kernel * p``."""
    nu_a = b.nu1 if b.family is BlendFamily.HALF_PLANE else b.nu2
    sq = _one_minus_w2z2(b.mu, order)
    out = PowerSeries.zeros(order)
    if b.A:
        out = out + b.A * (KernelParams(b.mu, nu_a).quadratic(order) * sq.recip())
    if b.B:
        out = out + b.B * (sq * psi_series(KernelParams(b.mu, b.nu2), order))
    return out


def p_positive_real(p: PowerSeries, grid: Grid, tolerance: float = 0.0) -> CheckReport:
    """Pass iff ``min Re p`` over the grid (and at the origin) exceeds ``tolerance``."""
    vals = grid.evaluate(p).real
    pts = grid.points()
    lo, at = argmin_point(vals, pts)
    if p.coeffs[0].real < lo:
        lo, at = float(p.coeffs[0].real), 0j
    verdict = Verdict.PASS if lo > tolerance else Verdict.FAIL
    return CheckReport(
        "positive_real_part",
        verdict,
        extremal_value=lo,
        witness=at,
        tolerance=tolerance,
        tail_bound=grid.tail_bound(p),
    )
