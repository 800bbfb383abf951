"""Line-based scenario files.

Format (``#`` starts a comment)::

    schema=1
    name=wang-real-direction
    exercises=free text naming the result under test
    order=4096                 # series truncation
    seed=42
    grid=64 0.99 720           # radii, outer radius, angles per circle
    polygon=0.99 2048          # boundary radius, vertices

    [map f1]
    target=kernel mu=0 nu=0
    shear=direction phi=0      # or: kernel mu=..., or: constant c=...
    omega=monomial alpha=0.4 power=1
    scale=1

    [combination]
    mode=same                  # same | conjugate | multi
    maps=f1 f2
    eta=0 0.5 1                # or eta_disk=..., eta_random=...
    upgrade=1

    [checks]
    univalence
    direction phi=0 expect=pass

Numbers are decimals, fractions ``a/b``, complex literals ``0.5+0.5j`` or
angles ``pi*0.25`` or ``pi/4`` (also ``-pi*0.25`` and bare ``pi``).
A check line may carry ``expect=fail`` when failure is the predicted
outcome, and ``eta=<value>`` to restrict it to one combination.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

from .errors import UsageError

SCHEMA_VERSION = 1
BUNDLED_DIR = Path(__file__).with_name("scenarios")

_PI = re.compile(r"^([+-]?)pi(?:([*/])(.+))?$")


def parse_number(text: str):
    s = text.strip()
    m = _PI.match(s)
    if m:
        sign = -1 if m.group(1) == "-" else 1
        if not m.group(2):
            return sign * math.pi
        x = float(parse_number(m.group(3)))
        return sign * (math.pi * x if m.group(2) == "*" else math.pi / x)
    if s.endswith("j"):
        try:
            return complex(s)
        except ValueError as exc:
            raise UsageError(f"bad complex number {text!r}") from exc
    if "/" in s:
        try:
            return Fraction(s)
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"bad fraction {text!r}") from exc
    try:
        return int(s) if re.fullmatch(r"[+-]?\d+", s) else float(s)
    except ValueError as exc:
        raise UsageError(f"bad number {text!r}") from exc


def parse_real(text: str) -> float:
    v = parse_number(text)
    if isinstance(v, complex):
        raise UsageError(f"expected a real number, got {text!r}")
    return float(v)


def parse_directive(text: str) -> tuple[str, dict[str, str]]:
    """``kind k1=v1 k2=v2`` -> ``("kind", {"k1": "v1", ...})``."""
    parts = text.split()
    if not parts:
        raise UsageError("empty directive")
    kind, params = parts[0], {}
    for tok in parts[1:]:
        if "=" not in tok:
            raise UsageError(f"expected key=value in {text!r}, got {tok!r}")
        k, v = tok.split("=", 1)
        params[k] = v
    return kind, params


@dataclass
class MapDecl:
    name: str
    target: tuple[str, dict[str, str]]
    shear: tuple[str, dict[str, str]] = ("direction", {"phi": "0"})
    omega: tuple[str, dict[str, str]] = ("constant", {"alpha": "0"})
    scale: float = 1.0


@dataclass
class CombinationDecl:
    mode: str = "same"
    maps: list[str] = field(default_factory=list)
    etas: list[complex] = field(default_factory=list)
    weights: list[float] = field(default_factory=list)
    upgrade: int = 0


@dataclass
class CheckDecl:
    kind: str
    params: dict[str, str]
    expect: str = "pass"


@dataclass
class Scenario:
    name: str
    exercises: str = ""
    order: int = 4096
    seed: int = 42
    grid: tuple[int, float, int] = (64, 0.99, 720)
    polygon: tuple[float, int] = (0.99, 2048)
    maps: dict[str, MapDecl] = field(default_factory=dict)
    combination: CombinationDecl | None = None
    checks: list[CheckDecl] = field(default_factory=list)
    source: str = ""


def _eta_disk(params: dict[str, str]) -> list[complex]:
    radius = parse_real(params.get("radius", "1"))
    n_r = int(params.get("radii", "10"))
    n_a = int(params.get("angles", "10"))
    etas = [
        complex(radius * (i + 1) / n_r * math.cos(2 * math.pi * k / n_a),
                radius * (i + 1) / n_r * math.sin(2 * math.pi * k / n_a))
        for i in range(n_r)
        for k in range(n_a)
    ]
    if params.get("cardinal", "yes") == "yes":
        for c in (radius, 1j * radius, -radius, -1j * radius):
            if not any(abs(c - e) < 1e-12 for e in etas):
                etas.append(complex(c))
    return etas


def _eta_random(params: dict[str, str], seed: int) -> list[complex]:
    import numpy as np

    rng = np.random.default_rng(int(params.get("seed", seed)))
    n = int(params.get("count", "10"))
    re_lo, re_hi = parse_real(params.get("re_min", "0")), parse_real(params.get("re_max", "1"))
    im_lo, im_hi = parse_real(params.get("im_min", "0")), parse_real(params.get("im_max", "0"))
    re_part = rng.uniform(re_lo, re_hi, n)
    im_part = rng.uniform(im_lo, im_hi, n)
    return [complex(a, b) for a, b in zip(re_part, im_part)]


def parse_scenario(text: str, source: str = "<string>") -> Scenario:
    header: dict[str, str] = {}
    maps: dict[str, MapDecl] = {}
    comb_raw: dict[str, str] | None = None
    checks: list[CheckDecl] = []
    section: tuple[str, str | None] = ("header", None)
    map_raw: dict[str, dict[str, str]] = {}

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"{source}:{lineno}"
        if line.startswith("["):
            if not line.endswith("]"):
                raise UsageError(f"{where}: unterminated section header")
            words = line[1:-1].split()
            if words == ["combination"]:
                comb_raw = {}
                section = ("combination", None)
            elif words == ["checks"]:
                section = ("checks", None)
            elif len(words) == 2 and words[0] == "map":
                if words[1] in map_raw:
                    raise UsageError(f"{where}: duplicate map {words[1]!r}")
                map_raw[words[1]] = {}
                section = ("map", words[1])
            else:
                raise UsageError(f"{where}: unknown section {line!r}")
            continue
        kind = section[0]
        if kind == "checks":
            ck, params = parse_directive(line)
            expect = params.pop("expect", "pass")
            if expect not in ("pass", "fail", "inconclusive"):
                raise UsageError(f"{where}: expect must be pass, fail or inconclusive")
            checks.append(CheckDecl(ck, params, expect))
            continue
        if "=" not in line:
            raise UsageError(f"{where}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        if kind == "header":
            header[key] = value
        elif kind == "combination":
            comb_raw[key] = value
        else:
            map_raw[section[1]][key] = value

    if header.get("schema") != str(SCHEMA_VERSION):
        raise UsageError(f"{source}: missing or unsupported schema (need schema={SCHEMA_VERSION})")
    if "name" not in header:
        raise UsageError(f"{source}: scenario needs a name")
    sc = Scenario(name=header["name"], exercises=header.get("exercises", ""), source=source)
    sc.order = int(header.get("order", sc.order))
    sc.seed = int(header.get("seed", sc.seed))
    if "grid" in header:
        a, b, c = header["grid"].split()
        sc.grid = (int(a), parse_real(b), int(c))
    if "polygon" in header:
        a, b = header["polygon"].split()
        sc.polygon = (parse_real(a), int(b))

    for name, kv in map_raw.items():
        if "target" not in kv:
            raise UsageError(f"{source}: map {name!r} needs a target")
        decl = MapDecl(name, parse_directive(kv["target"]))
        if "shear" in kv:
            decl.shear = parse_directive(kv["shear"])
        if "omega" in kv:
            decl.omega = parse_directive(kv["omega"])
        if "scale" in kv:
            decl.scale = parse_real(kv["scale"])
        maps[name] = decl
    sc.maps = maps

    if comb_raw is not None:
        cd = CombinationDecl(mode=comb_raw.get("mode", "same"))
        if cd.mode not in ("same", "conjugate", "multi"):
            raise UsageError(f"{source}: unknown combination mode {cd.mode!r}")
        cd.maps = comb_raw.get("maps", "").split()
        for m in cd.maps:
            if m not in maps:
                raise UsageError(f"{source}: combination refers to unknown map {m!r}")
        if "eta" in comb_raw:
            cd.etas += [complex(parse_number(t)) for t in comb_raw["eta"].split()]
        if "eta_disk" in comb_raw:
            cd.etas += _eta_disk(parse_directive("disk " + comb_raw["eta_disk"])[1])
        if "eta_random" in comb_raw:
            cd.etas += _eta_random(parse_directive("rand " + comb_raw["eta_random"])[1], sc.seed)
        if "weights" in comb_raw:
            cd.weights = [float(parse_number(t)) for t in comb_raw["weights"].split()]
        cd.upgrade = int(comb_raw.get("upgrade", "0"))
        if cd.mode == "multi":
            if len(cd.weights) != len(cd.maps):
                raise UsageError(f"{source}: multi combination needs one weight per map")
        elif len(cd.maps) != 2 or not cd.etas:
            raise UsageError(f"{source}: a two-map combination needs maps=f1 f2 and eta values")
        sc.combination = cd
    sc.checks = checks
    return sc


def load_scenario(path_or_name: str) -> Scenario:
    """Load a scenario file, or a bundled scenario by name."""
    p = Path(path_or_name)
    if not p.is_file():
        bundled = BUNDLED_DIR / f"{path_or_name}.scn"
        if bundled.is_file():
            p = bundled
        else:
            raise UsageError(f"no such scenario file or bundled scenario: {path_or_name}")
    return parse_scenario(p.read_text(), source=str(p.name))


def bundled_scenarios() -> list[Path]:
    return sorted(BUNDLED_DIR.glob("*.scn"))


def params_get(params: dict[str, str], key: str, default: Any = None, real: bool = True):
    if key not in params:
        if default is None:
            raise UsageError(f"missing parameter {key!r}")
        return default
    return parse_real(params[key]) if real else parse_number(params[key])
