"""Truncated complex Taylor series on the unit disk.

A :class:`PowerSeries` of order ``N`` stores the coefficients of
``z**0 .. z**(N-1)``; anything beyond is unknown (not zero).  Orders
follow what is actually known:

* ``differentiate`` loses the top coefficient, so an order-``N`` input
  yields an order ``N-1`` result;
* ``integrate`` gains one, so an order-``N`` input yields order ``N+1``.

Hence ``integrate(differentiate(a))`` has the order of ``a`` and equals ``a``
minus its constant term, exactly.

Values are immutable; the coefficient array is flagged read-only and may be
shared freely between threads.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .errors import AccuracyError, SingularInputError, UsageError

DEFAULT_ORDER = 256
R_MAX = 0.995


class PowerSeries:
    """Immutable truncated power series ``sum_k coeffs[k] z**k``."""

    __slots__ = ("_c",)

    def __init__(self, coeffs: Sequence[complex] | np.ndarray):
        c = np.array(coeffs, dtype=complex).ravel()
        if c.size == 0:
            raise UsageError("a power series needs at least one coefficient")
        if not np.all(np.isfinite(c)):
            raise UsageError("power series coefficients must be finite")
        c.setflags(write=False)
        self._c = c

    # -- constructors ------------------------------------------------------

    @classmethod
    def zeros(cls, order: int = DEFAULT_ORDER) -> "PowerSeries":
        return cls(np.zeros(_check_order(order), dtype=complex))

    @classmethod
    def constant(cls, value: complex, order: int = DEFAULT_ORDER) -> "PowerSeries":
        c = np.zeros(_check_order(order), dtype=complex)
        c[0] = value
        return cls(c)

    @classmethod
    def monomial(cls, coeff: complex, power: int, order: int = DEFAULT_ORDER) -> "PowerSeries":
        c = np.zeros(_check_order(order), dtype=complex)
        if power < 0:
            raise UsageError("monomial power must be non-negative")
        if power < order:
            c[power] = coeff
        return cls(c)

    @classmethod
    def polynomial(cls, coeffs: Sequence[complex], order: int = DEFAULT_ORDER) -> "PowerSeries":
        """Pad (or truncate) a coefficient list to ``order`` terms."""
        c = np.zeros(_check_order(order), dtype=complex)
        p = np.asarray(coeffs, dtype=complex).ravel()[:order]
        c[: p.size] = p
        return cls(c)

    # -- basic protocol ----------------------------------------------------

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def order(self) -> int:
        return self._c.size

    def __len__(self) -> int:
        return self._c.size

    def __getitem__(self, k):
        return self._c[k]

    def __repr__(self) -> str:
        head = ", ".join(f"{v:.6g}" for v in self._c[:6])
        more = ", ..." if self.order > 6 else ""
        return f"PowerSeries([{head}{more}], order={self.order})"

    def allclose(self, other: "PowerSeries", atol: float = 1e-12) -> bool:
        return self.order == other.order and bool(np.max(np.abs(self._c - other._c)) <= atol)

    def max_abs_diff(self, other: "PowerSeries") -> float:
        _same_order(self, other)
        return float(np.max(np.abs(self._c - other._c)))

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, PowerSeries):
            _same_order(self, other)
            return PowerSeries(self._c + other._c)
        c = self._c.copy()
        c[0] += other
        return PowerSeries(c)

    __radd__ = __add__

    def __neg__(self):
        return PowerSeries(-self._c)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, PowerSeries):
            return series_mul(self, other)
        return PowerSeries(self._c * complex(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, PowerSeries):
            return series_mul(self, series_recip(other))
        return PowerSeries(self._c / complex(other))

    def scaled_argument(self, w: complex) -> "PowerSeries":
        """Series of ``z -> a(w z)``."""
        return PowerSeries(self._c * complex(w) ** np.arange(self.order))

    def truncate(self, order: int) -> "PowerSeries":
        if order > self.order:
            raise UsageError(f"cannot extend order {self.order} to {order}: higher terms are unknown")
        return PowerSeries(self._c[: _check_order(order)])

    def recip(self) -> "PowerSeries":
        return series_recip(self)

    def differentiate(self) -> "PowerSeries":
        return series_differentiate(self)

    def integrate(self) -> "PowerSeries":
        return series_integrate(self)

    # -- evaluation --------------------------------------------------------

    def tail_bound(self, r: float) -> float:
        """Heuristic size of the discarded tail ``sum_{k>=N} |a_k| r**k``.

        The unknown coefficients are extrapolated from the envelope of the
        last eighth of the stored ones (geometric growth fitted between the
        last two windows).  Returns ``inf`` when the extrapolated series does
        not converge at ``r``.
        """
        r = abs(float(r))
        n = self.order
        if r == 0.0:
            return 0.0
        mags = np.abs(self._c)
        w = max(1, n // 8)
        last = float(mags[-w:].max())
        if last == 0.0:
            return 0.0
        prev = float(mags[-2 * w : -w].max()) if n >= 2 * w else 0.0
        growth = (last / prev) ** (1.0 / w) if prev > 0.0 else 1.0
        q = r * growth
        if q >= 1.0:
            return math.inf
        scale = last * max(growth, 1.0) ** w
        return scale * math.exp(n * math.log(r)) / (1.0 - q)

    def __call__(self, z, tail_tol: float | None = None):
        return evaluate(self, z, tail_tol=tail_tol)

    def evaluate_circle(self, r: float, m: int) -> np.ndarray:
        """Values at ``r * exp(2j*pi*k/m)`` for ``k = 0..m-1`` via one FFT."""
        if m < 1:
            raise UsageError("need at least one sample on the circle")
        if abs(r) > R_MAX:
            raise AccuracyError(f"radius {r} exceeds r_max={R_MAX}")
        n = self.order
        weighted = self._c * (float(r) ** np.arange(n))
        rows = -(-n // m)
        folded = np.zeros(rows * m, dtype=complex)
        folded[:n] = weighted
        folded = folded.reshape(rows, m).sum(axis=0)
        return np.fft.ifft(folded) * m


def _check_order(order: int) -> int:
    if int(order) != order or order < 1:
        raise UsageError(f"order must be a positive integer, got {order!r}")
    return int(order)


def _same_order(a: PowerSeries, b: PowerSeries) -> None:
    if a.order != b.order:
        raise UsageError(f"order mismatch: {a.order} vs {b.order}")


def series_mul(a: PowerSeries, b: PowerSeries) -> PowerSeries:
    """Cauchy product truncated to the common order."""
    _same_order(a, b)
    n = a.order
    return PowerSeries(np.convolve(a.coeffs, b.coeffs)[:n])


def series_recip(a: PowerSeries) -> PowerSeries:
    """``1/a`` by the coefficient recursion ``r_n = -(1/a_0) sum_{k>=1} a_k r_{n-k}``."""
    c = a.coeffs
    if c[0] == 0:
        raise SingularInputError("series has zero constant term; no reciprocal")
    n = a.order
    inv0 = 1.0 / c[0]
    r = np.zeros(n, dtype=complex)
    r[0] = inv0
    # sparse polynomials (the usual case: 1 + c*omega) only touch nonzero a_k
    nz = np.flatnonzero(c[1:]) + 1
    if nz.size and nz[-1] < 64:
        d = int(nz[-1])
        cn = c[nz]
        for k in range(1, min(d, n)):
            idx = nz[nz <= k]
            r[k] = -inv0 * np.dot(c[idx], r[k - idx])
        for k in range(d, n):
            r[k] = -inv0 * np.dot(cn, r[k - nz])
    else:
        for k in range(1, n):
            r[k] = -inv0 * np.dot(c[1 : k + 1], r[k - 1 :: -1])
    return PowerSeries(r)


def series_differentiate(a: PowerSeries) -> PowerSeries:
    if a.order < 2:
        raise UsageError("derivative of an order-1 series carries no information")
    k = np.arange(1, a.order)
    return PowerSeries(a.coeffs[1:] * k)


def series_integrate(a: PowerSeries) -> PowerSeries:
    c = np.zeros(a.order + 1, dtype=complex)
    c[1:] = a.coeffs / np.arange(1, a.order + 1)
    return PowerSeries(c)


def evaluate(a: PowerSeries, z, tail_tol: float | None = None):
    """Horner evaluation at a point or array of points with ``|z| <= R_MAX``.

    With ``tail_tol`` set, raise :class:`AccuracyError` when the estimated
    truncation tail at ``max |z|`` exceeds it.
    """
    zz = np.asarray(z, dtype=complex)
    rmax = float(np.max(np.abs(zz))) if zz.size else 0.0
    if rmax > R_MAX:
        raise AccuracyError(f"|z|={rmax:.6g} exceeds r_max={R_MAX}")
    if tail_tol is not None:
        tail = a.tail_bound(rmax)
        if tail > tail_tol:
            raise AccuracyError(f"truncation tail {tail:.3g} at |z|={rmax:.6g} exceeds {tail_tol:.3g}")
    acc = np.zeros_like(zz)
    for coef in a.coeffs[::-1]:
        acc = acc * zz + coef
    if np.ndim(z) == 0:
        return complex(acc)
    return acc
