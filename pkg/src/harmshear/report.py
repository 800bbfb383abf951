"""Sample grids on the disk and the verdict record every check returns."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import UsageError
from .series import R_MAX, PowerSeries


class Verdict(str, enum.Enum):
    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Grid:
    """Concentric circles ``radii[i] * exp(2j*pi*k/angles_per_circle)``."""

    radii: tuple[float, ...]
    angles_per_circle: int

    def __post_init__(self):
        r = np.asarray(self.radii, dtype=float)
        if r.size == 0 or np.any(r <= 0) or np.any(r > R_MAX) or np.any(np.diff(r) <= 0):
            raise UsageError("grid radii must be strictly increasing in (0, r_max]")
        if self.angles_per_circle < 1:
            raise UsageError("angles_per_circle must be positive")

    @classmethod
    def standard(cls, n_radii: int = 64, r_max: float = 0.99, angles: int = 720) -> "Grid":
        radii = np.linspace(r_max / n_radii, r_max, n_radii)
        return cls(tuple(float(x) for x in radii), int(angles))

    @property
    def r_max(self) -> float:
        return self.radii[-1]

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.radii), self.angles_per_circle)

    def points(self) -> np.ndarray:
        theta = 2 * np.pi * np.arange(self.angles_per_circle) / self.angles_per_circle
        return np.asarray(self.radii)[:, None] * np.exp(1j * theta)[None, :]

    def evaluate(self, a: PowerSeries) -> np.ndarray:
        """Values of ``a`` on the grid, shape ``(len(radii), angles_per_circle)``."""
        return np.stack([a.evaluate_circle(r, self.angles_per_circle) for r in self.radii])

    def tail_bound(self, *series: PowerSeries) -> float:
        return max((s.tail_bound(self.r_max) for s in series), default=0.0)


@dataclass
class CheckReport:
    name: str
    verdict: Verdict
    extremal_value: float
    witness: complex | None = None
    tolerance: float = 0.0
    tail_bound: float | None = None
    details: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.verdict = Verdict(self.verdict)
        if self.verdict is Verdict.FAIL and self.witness is None:
            raise UsageError(f"{self.name}: a failing check must carry a witness")

    @property
    def passed(self) -> bool:
        return self.verdict is Verdict.PASS

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "verdict": self.verdict.value,
            "extremal_value": _jsonable(self.extremal_value),
            "witness": _jsonable(self.witness),
            "tolerance": self.tolerance,
            "tail_bound": _jsonable(self.tail_bound),
            "details": _jsonable(self.details),
        }


def _jsonable(v: Any) -> Any:
    if isinstance(v, enum.Enum):
        return v.value
    if isinstance(v, (complex, np.complexfloating)):
        return [_jsonable(float(v.real)), _jsonable(float(v.imag))]
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v) or math.isinf(v):
            return str(v)
        return v
    if isinstance(v, (np.integer, np.bool_)):
        return v.item()
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_jsonable(x) for x in v]
    return v


def argmin_point(values: np.ndarray, points: np.ndarray) -> tuple[float, complex]:
    i = np.unravel_index(int(np.argmin(values)), values.shape)
    return float(values[i]), complex(points[i])


def argmax_point(values: np.ndarray, points: np.ndarray) -> tuple[float, complex]:
    i = np.unravel_index(int(np.argmax(values)), values.shape)
    return float(values[i]), complex(points[i])
