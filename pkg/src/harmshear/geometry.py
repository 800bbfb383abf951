"""Brute-force geometry on the image of a circle ``|z| = r``.

Nothing here knows how the map was built: the oracles only look at the
closed polygon ``f(r e^{2 pi i k/M})`` and answer simplicity, winding,
directional convexity, convexity and starlikeness questions about it.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import UsageError
from .report import CheckReport, Verdict
from .shear import HarmonicMapping

BOUNDARY_TAIL_TOL = 1e-4
_BLOCK = 256


@dataclass(frozen=True, eq=False)
class BoundaryPolygon:
    vertices: np.ndarray
    r: float

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=complex)
        if v.ndim != 1 or v.size < 16:
            raise UsageError("a boundary polygon needs at least 16 vertices")
        if not np.all(np.isfinite(v)):
            raise UsageError("polygon vertices must be finite")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @property
    def m(self) -> int:
        return self.vertices.size

    @property
    def diameter(self) -> float:
        v = self.vertices
        return float(max(np.ptp(v.real), np.ptp(v.imag)) * math.sqrt(2))

    def edges(self) -> np.ndarray:
        return np.roll(self.vertices, -1) - self.vertices

    def rotated(self, beta: float) -> "BoundaryPolygon":
        return BoundaryPolygon(self.vertices * np.exp(1j * beta), self.r)

    def shifted_index(self, k: int) -> "BoundaryPolygon":
        return BoundaryPolygon(np.roll(self.vertices, k), self.r)

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["re", "im"])
            for v in self.vertices:
                w.writerow([repr(float(v.real)), repr(float(v.imag))])


def boundary_polyline(f: HarmonicMapping, r: float = 0.99, m: int = 2048) -> BoundaryPolygon:
    tail = max(f.h.tail_bound(r), f.g.tail_bound(r))
    if tail > BOUNDARY_TAIL_TOL:
        from .errors import AccuracyError

        raise AccuracyError(
            f"truncation tail {tail:.3g} at r={r} exceeds {BOUNDARY_TAIL_TOL}; raise the series order"
        )
    verts = f.h.evaluate_circle(r, m) + np.conj(f.g.evaluate_circle(r, m))
    return BoundaryPolygon(verts, r)


def _cross(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a.real * b.imag - a.imag * b.real


def find_self_intersection(p: BoundaryPolygon) -> tuple[int, int] | None:
    """First pair of non-adjacent edges that cross properly, or ``None``."""
    v = p.vertices
    m = v.size
    a, d = v, p.edges()
    eps = 1e-12 * p.diameter**2
    idx = np.arange(m)
    lo_x, hi_x = np.minimum(a.real, a.real + d.real), np.maximum(a.real, a.real + d.real)
    lo_y, hi_y = np.minimum(a.imag, a.imag + d.imag), np.maximum(a.imag, a.imag + d.imag)
    for start in range(0, m, _BLOCK):
        i = idx[start : start + _BLOCK, None]
        ai, di = a[i], d[i]
        # bounding-box prefilter, then orientation tests
        box = (
            (lo_x[i] <= hi_x[None, :])
            & (lo_x[None, :] <= hi_x[i])
            & (lo_y[i] <= hi_y[None, :])
            & (lo_y[None, :] <= hi_y[i])
        )
        gap = (idx[None, :] - i) % m
        box &= (gap > 1) & (gap < m - 1)
        if not box.any():
            continue
        ii, jj = np.nonzero(box)
        ii = ii + start
        aj, dj = a[jj], d[jj]
        ai, di = a[ii], d[ii]
        o1 = _cross(di, aj - ai)
        o2 = _cross(di, aj + dj - ai)
        o3 = _cross(dj, ai - aj)
        o4 = _cross(dj, ai + di - aj)
        hit = (
            (((o1 > eps) & (o2 < -eps)) | ((o1 < -eps) & (o2 > eps)))
            & (((o3 > eps) & (o4 < -eps)) | ((o3 < -eps) & (o4 > eps)))
        )
        if hit.any():
            k = int(np.argmax(hit))
            return int(ii[k]), int(jj[k])
    return None


def winding_number(p: BoundaryPolygon, w: complex) -> float:
    rel = p.vertices - w
    steps = np.angle(np.roll(rel, -1) / rel)
    return float(np.sum(steps) / (2 * math.pi))


def injectivity_winding_check(p: BoundaryPolygon, probes: Iterable[complex]) -> CheckReport:
    v = p.vertices
    scale = p.diameter
    if np.min(np.abs(p.edges())) <= 1e-14 * max(scale, 1.0):
        return CheckReport("injectivity", Verdict.INCONCLUSIVE, 0.0, details={"reason": "repeated vertices"})
    hit = find_self_intersection(p)
    if hit is not None:
        i, j = hit
        return CheckReport(
            "injectivity",
            Verdict.FAIL,
            extremal_value=0.0,
            witness=complex(v[i]),
            details={"reason": "self-intersection", "edges": [i, j]},
        )
    worst, worst_at = 1.0, None
    for w in probes:
        wn = winding_number(p, complex(w))
        if worst_at is None or abs(wn - 1) > abs(worst - 1):
            worst, worst_at = wn, complex(w)
    ok = worst_at is None or abs(worst - 1) < 1e-6
    return CheckReport(
        "injectivity",
        Verdict.PASS if ok else Verdict.FAIL,
        extremal_value=worst,
        witness=worst_at,
        tolerance=1e-6,
        details={"reason": "simple polygon" if ok else "winding number != 1"},
    )


def _sign_runs(values: np.ndarray, tol: float) -> tuple[int, np.ndarray]:
    """Number of sign changes of the cyclic difference sequence, ignoring plateaus."""
    d = np.roll(values, -1) - values
    s = np.sign(d)
    s[np.abs(d) <= tol] = 0
    nz = np.flatnonzero(s)
    if nz.size == 0:
        return 0, nz
    seq = s[nz]
    change = seq != np.roll(seq, -1)
    return int(np.count_nonzero(change)), nz[change]


def direction_convexity_oracle(p: BoundaryPolygon, gamma: float) -> CheckReport:
    """Lines parallel to ``e^{i gamma}`` meet the enclosed region in one interval.

    After rotating by ``e^{-i gamma}`` the lines are horizontal; that holds
    exactly when the imaginary parts along the boundary form one rising and
    one falling run.
    """
    y = (p.vertices * np.exp(-1j * gamma)).imag
    tol = 1e-9 * p.diameter
    changes, where = _sign_runs(y, tol)
    ok = changes == 2
    details = {"monotone_runs": changes, "gamma": gamma}
    witness = None
    if not ok:
        if where.size:
            k = int(where[min(2, where.size - 1)])
            witness = complex(p.vertices[(k + 1) % p.m])
            # a horizontal line through a surplus extremum meets the boundary 4+ times
            details["witness_line_im"] = float(y[(k + 1) % p.m])
        else:
            witness = complex(p.vertices[0])
    return CheckReport(
        "direction_convexity",
        Verdict.PASS if ok else Verdict.FAIL,
        extremal_value=float(changes),
        witness=witness,
        tolerance=tol,
        details=details,
    )


def full_convexity_oracle(p: BoundaryPolygon) -> CheckReport:
    e = p.edges()
    turn = _cross(e, np.roll(e, -1))
    tol = 1e-12 * p.diameter**2
    total = float(np.sum(np.angle(np.roll(e, -1) / e)))
    orient = 1.0 if total > 0 else -1.0
    bad = orient * turn < -tol
    ok = not bad.any() and abs(abs(total) - 2 * math.pi) < 1e-6
    worst = int(np.argmin(orient * turn))
    return CheckReport(
        "full_convexity",
        Verdict.PASS if ok else Verdict.FAIL,
        extremal_value=float(orient * turn[worst]),
        witness=None if ok else complex(p.vertices[(worst + 1) % p.m]),
        tolerance=tol,
        details={"total_turning": total, "reflex_vertices": int(np.count_nonzero(bad))},
    )


def starlike_oracle(p: BoundaryPolygon) -> CheckReport:
    """Every ray from the origin leaves the region through a single boundary point."""
    v = p.vertices
    if np.min(np.abs(v)) <= 1e-14 * max(p.diameter, 1.0):
        return CheckReport("starlike", Verdict.FAIL, 0.0, witness=0j, details={"reason": "origin on boundary"})
    steps = np.angle(np.roll(v, -1) / v)
    total = float(np.sum(steps))
    orient = 1.0 if total > 0 else -1.0
    worst = int(np.argmin(orient * steps))
    ok = abs(abs(total) - 2 * math.pi) < 1e-6 and orient * steps[worst] > 0
    return CheckReport(
        "starlike",
        Verdict.PASS if ok else Verdict.FAIL,
        extremal_value=float(orient * steps[worst]),
        witness=None if ok else complex(v[worst]),
        details={"total_angle": total},
    )


def interior_probes(f: HarmonicMapping, radii=(0.0, 0.25, 0.5), per_circle: int = 8) -> list[complex]:
    pts = [0j]
    for r in radii:
        if r > 0:
            pts.extend(r * np.exp(2j * np.pi * np.arange(per_circle) / per_circle))
    return [complex(x) for x in f(np.asarray(pts))]
