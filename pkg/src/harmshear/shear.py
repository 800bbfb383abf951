"""Shear construction of harmonic maps ``f = h + conj(g)``.

Given an analytic target ``T`` with ``h + c g = T`` (``|c| = 1``) and a
dilatation ``omega = g'/h'``, the parts are recovered in series space::

    h' = T' / (1 + c omega),    g' = omega h'

Both conventions in use reduce to a single ``c``: shearing along the
direction ``phi`` means ``h - e^{2i phi} g = T`` (``c = -e^{2i phi}``), while
the kernel convention ``h + e^{-2i mu} g = T`` is ``c = e^{-2i mu}``.
"""

from __future__ import annotations

import cmath
import enum
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateError, InvalidDilatationError, UsageError
from .series import DEFAULT_ORDER, PowerSeries

_NORM_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class HarmonicMapping:
    h: PowerSeries
    g: PowerSeries

    def __post_init__(self):
        if self.h.order != self.g.order:
            raise UsageError(f"h and g orders differ: {self.h.order} vs {self.g.order}")

    @property
    def order(self) -> int:
        return self.h.order

    @property
    def is_normalized(self) -> bool:
        """``h(0) = 0, h'(0) = 1, g(0) = 0``."""
        h, g = self.h.coeffs, self.g.coeffs
        return (
            self.order >= 2
            and abs(h[0]) <= _NORM_TOL
            and abs(h[1] - 1) <= _NORM_TOL
            and abs(g[0]) <= _NORM_TOL
        )

    @property
    def g_prime_zero_vanishes(self) -> bool:
        return self.order >= 2 and abs(self.g.coeffs[1]) <= _NORM_TOL

    def dh(self) -> PowerSeries:
        return self.h.differentiate()

    def dg(self) -> PowerSeries:
        return self.g.differentiate()

    def __call__(self, z):
        return self.h(z) + np.conj(self.g(z))

    def scaled(self, s: float) -> "HarmonicMapping":
        """The harmonic map ``s * f`` for real ``s``."""
        return HarmonicMapping(self.h * s, self.g * s)

    def analytic_combination(self, c: complex) -> PowerSeries:
        return self.h + self.g * c


def identity_mapping(order: int = DEFAULT_ORDER) -> HarmonicMapping:
    return HarmonicMapping(PowerSeries.monomial(1.0, 1, order), PowerSeries.zeros(order))


class DilatationForm(str, enum.Enum):
    MONOMIAL = "monomial"
    CONSTANT = "constant"
    BLASCHKE = "blaschke"


@dataclass(frozen=True)
class DilatationSpec:
    """``alpha z^power``, constant ``alpha``, or ``alpha (z + a)/(1 + conj(a) z)``.

    A monomial or Blaschke factor may have ``|alpha| = 1``: it still has
    modulus below one on the open disk.  A constant needs ``|alpha| < 1``.
    """

    form: DilatationForm
    alpha: complex
    power: int = 1
    a: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, "form", DilatationForm(self.form))
        object.__setattr__(self, "alpha", complex(self.alpha))
        amp = abs(self.alpha)
        if self.form is DilatationForm.CONSTANT:
            if amp >= 1:
                raise InvalidDilatationError(f"constant dilatation needs |alpha| < 1, got {amp}")
        elif self.form is DilatationForm.MONOMIAL:
            if self.power < 1 or amp > 1:
                raise InvalidDilatationError("monomial dilatation needs power >= 1 and |alpha| <= 1")
        else:
            if amp > 1 or abs(self.a) >= 1:
                raise InvalidDilatationError("Blaschke dilatation needs |alpha| <= 1 and |a| < 1")

    @classmethod
    def monomial(cls, alpha: complex, power: int = 1) -> "DilatationSpec":
        return cls(DilatationForm.MONOMIAL, alpha, power)

    @classmethod
    def constant(cls, alpha: complex) -> "DilatationSpec":
        return cls(DilatationForm.CONSTANT, alpha, 0)

    @classmethod
    def blaschke(cls, alpha: complex, a: complex) -> "DilatationSpec":
        return cls(DilatationForm.BLASCHKE, alpha, 1, complex(a))

    @property
    def sup_modulus(self) -> float:
        return abs(self.alpha)

    def series(self, order: int = DEFAULT_ORDER) -> PowerSeries:
        if self.form is DilatationForm.CONSTANT:
            return PowerSeries.constant(self.alpha, order)
        if self.form is DilatationForm.MONOMIAL:
            return PowerSeries.monomial(self.alpha, self.power, order)
        num = PowerSeries.polynomial([self.a, 1.0], order)
        den = PowerSeries.polynomial([1.0, np.conj(self.a)], order)
        return (num * den.recip()) * self.alpha

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        if self.form is DilatationForm.CONSTANT:
            out = np.full_like(z, self.alpha)
        elif self.form is DilatationForm.MONOMIAL:
            out = self.alpha * z**self.power
        else:
            out = self.alpha * (z + self.a) / (1 + np.conj(self.a) * z)
        return complex(out) if out.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class ShearSpec:
    target: PowerSeries
    c: complex
    omega: DilatationSpec

    def __post_init__(self):
        object.__setattr__(self, "c", complex(self.c))
        if abs(abs(self.c) - 1) > _NORM_TOL:
            raise UsageError(f"shear constant must be unimodular, got |c|={abs(self.c)}")

    @classmethod
    def along_direction(cls, target: PowerSeries, phi: float, omega: DilatationSpec) -> "ShearSpec":
        """``h - e^{2i phi} g = target``."""
        return cls(target, -cmath.exp(2j * phi), omega)

    @classmethod
    def kernel_convention(cls, target: PowerSeries, mu: float, omega: DilatationSpec) -> "ShearSpec":
        """``h + e^{-2i mu} g = target``."""
        return cls(target, cmath.exp(-2j * mu), omega)


def shear_construct(
    s: ShearSpec, order: int | None = None, allow_scaled_target: bool = False
) -> HarmonicMapping:
    """Recover ``(h, g)`` from ``h + c g = target`` and ``g' = omega h'``.

    The target must vanish at the origin with unit derivative there, unless
    ``allow_scaled_target`` is set, in which case any nonzero derivative is
    accepted and ``h, g`` scale along with it.
    """
    target = s.target if order is None else s.target.truncate(order)
    n = target.order
    t = target.coeffs
    if n < 2 or abs(t[0]) > _NORM_TOL:
        raise UsageError("shear target must vanish at the origin")
    if allow_scaled_target:
        if t[1] == 0:
            raise UsageError("shear target has vanishing derivative at the origin")
    elif abs(t[1] - 1) > _NORM_TOL:
        raise UsageError(f"shear target must have unit derivative at 0, got {t[1]}")
    omega = s.omega.series(n - 1)
    dh = target.differentiate() * (1.0 + s.c * omega).recip()
    dg = omega * dh
    return HarmonicMapping(dh.integrate(), dg.integrate())


def dilatation_of(f: HarmonicMapping, order: int | None = None) -> PowerSeries:
    """Series of ``g'/h'``, of order ``f.order - 1`` unless a smaller one is asked for."""
    dh, dg = f.dh(), f.dg()
    if order is not None:
        dh, dg = dh.truncate(order), dg.truncate(order)
    if dh.coeffs[0] == 0:
        raise DegenerateError("h'(0) = 0: dilatation undefined at the origin")
    return dg * dh.recip()
