"""Scenario files: ``[field]``, ``[extension]`` and ``[run]`` sections.

Example::

    [field]
    characteristic = 0
    p = 2
    eisenstein1 = -2 0 1

    [extension]
    layer1 = kummer 1,1@0
    layer2 = kummer 1,0,0,1@0

    [run]
    seed = 7
    trials = 100

Tower polynomials list coefficients constant term first; each coefficient
is an integer or a digit string over the field below.  A layer datum
``d0,d1,...@v`` means ``sum d_j pi^(v+j)``.
"""

from __future__ import annotations

import configparser
import os
import re
from dataclasses import dataclass, field, replace
from pathlib import Path

from .galois import ARTIN_SCHREIER, KUMMER, ExtensionField, LayerSpec, build_extension
from .localfield import GroundField, GroundFieldSpec, make_ground_field, parse_digits

DEFAULT_PRECISION_CAP = 1024
BUILTIN_DIR = Path(__file__).parent / "scenarios"


class ScenarioError(ValueError):
    """Malformed or inconsistent scenario file."""


def default_precision_cap() -> int:
    raw = os.environ.get("NBCRIT_PRECISION_CAP")
    if raw is None:
        return DEFAULT_PRECISION_CAP
    try:
        cap = int(raw)
    except ValueError:
        raise ScenarioError(f"NBCRIT_PRECISION_CAP={raw!r} is not an integer") from None
    if cap < 1:
        raise ScenarioError("NBCRIT_PRECISION_CAP must be positive")
    return cap


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    trials: int = 100
    digits: int = 8
    precision: int = 64
    precision_cap: int = field(default_factory=default_precision_cap)


@dataclass(frozen=True)
class Scenario:
    characteristic: int
    p: int
    tower: tuple[tuple[str, ...], ...] = ()
    layers: tuple[tuple[str, str], ...] = ()
    run: RunConfig = field(default_factory=RunConfig)
    name: str = ""

    def field_spec(self) -> GroundFieldSpec:
        return GroundFieldSpec(self.characteristic, self.p, self.tower, self.run.precision, self.run.precision_cap)

    def ground(self) -> GroundField:
        return make_ground_field(self.field_spec())

    def build(self, validate: bool = True) -> ExtensionField:
        K = self.ground()
        return build_extension(K, [LayerSpec(kind, K.parse(datum)) for kind, datum in self.layers], validate)

    def with_run(self, **changes) -> "Scenario":
        return replace(self, run=replace(self.run, **changes))

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "field": {
                "characteristic": self.characteristic,
                "p": self.p,
                "tower": [list(t) for t in self.tower],
            },
            "extension": [{"kind": k, "datum": d} for k, d in self.layers],
            "run": dict(self.run.__dict__),
        }


_FIELD_KEYS = {"characteristic", "p"}
_RUN_KEYS = set(RunConfig.__dataclass_fields__)
_NUMBERED = re.compile(r"^(eisenstein|layer)(\d+)$")


def _int(section: str, key: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ScenarioError(f"[{section}] {key} = {raw!r} is not an integer") from None


def _numbered(section, prefix: str) -> list[str]:
    found = {}
    for key, value in section.items():
        m = _NUMBERED.match(key)
        if not m or m.group(1) != prefix:
            raise ScenarioError(f"unknown key {key!r} in [{section.name}]")
        found[int(m.group(2))] = value
    if sorted(found) != list(range(1, len(found) + 1)):
        raise ScenarioError(f"[{section.name}] {prefix} keys must be numbered 1..k without gaps")
    return [found[i] for i in sorted(found)]


def parse_scenario(text: str, name: str = "") -> Scenario:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ScenarioError(f"unreadable scenario: {exc}") from None
    unknown = set(cp.sections()) - {"field", "extension", "run"}
    if unknown:
        raise ScenarioError(f"unknown section(s): {sorted(unknown)}")
    if "field" not in cp:
        raise ScenarioError("missing [field] section")
    fs = cp["field"]
    for key in ("characteristic", "p"):
        if key not in fs:
            raise ScenarioError(f"[field] is missing {key}")
    characteristic = _int("field", "characteristic", fs["characteristic"])
    p = _int("field", "p", fs["p"])
    tower_section = {k: v for k, v in fs.items() if k not in _FIELD_KEYS}
    tower_raw = _numbered(_Section("field", tower_section), "eisenstein")
    tower = tuple(tuple(raw.split()) for raw in tower_raw)
    for i, coeffs in enumerate(tower, start=1):
        if len(coeffs) < 2:
            raise ScenarioError(f"[field] eisenstein{i} needs at least two coefficients")
        for tok in coeffs:
            _check_coefficient(tok, f"eisenstein{i}")
    layers = []
    if "extension" in cp:
        for i, raw in enumerate(_numbered(_Section("extension", dict(cp["extension"])), "layer"), start=1):
            parts = raw.split()
            if len(parts) != 2 or parts[0] not in (KUMMER, ARTIN_SCHREIER):
                raise ScenarioError(f"[extension] layer{i} must read '<kummer|artin_schreier> <digits>'")
            _check_coefficient(parts[1], f"layer{i}")
            layers.append((parts[0], parts[1]))
    run = RunConfig()
    if "run" in cp:
        values = {}
        for key, raw in cp["run"].items():
            if key not in _RUN_KEYS:
                raise ScenarioError(f"unknown key {key!r} in [run]")
            values[key] = _int("run", key, raw)
        run = replace(run, **values)
    if run.trials < 0 or run.digits < 1 or run.precision < 1 or run.precision_cap < run.precision:
        raise ScenarioError("[run] needs trials >= 0, digits >= 1 and 1 <= precision <= precision_cap")
    return Scenario(characteristic, p, tower, tuple(layers), run, name)


class _Section(dict):
    def __init__(self, name, items):
        super().__init__(items)
        self.name = name


def _check_coefficient(tok: str, where: str) -> None:
    try:
        int(tok)
        return
    except ValueError:
        pass
    try:
        parse_digits(tok)
    except ValueError as exc:
        raise ScenarioError(f"{where}: {exc}") from None


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read {path}: {exc}") from None
    return parse_scenario(text, path.stem)


def builtin_scenarios() -> list[str]:
    return sorted(p.stem for p in BUILTIN_DIR.glob("*.ini"))


def builtin_scenario(name: str) -> Scenario:
    """One of the scenario files shipped with the package."""
    path = BUILTIN_DIR / f"{name}.ini"
    if not path.exists():
        raise ScenarioError(f"no built-in scenario {name!r}; have {builtin_scenarios()}")
    return load_scenario(path)


def dump_scenario(sc: Scenario) -> str:
    lines = ["[field]", f"characteristic = {sc.characteristic}", f"p = {sc.p}"]
    lines += [f"eisenstein{i} = {' '.join(t)}" for i, t in enumerate(sc.tower, start=1)]
    lines += ["", "[extension]"]
    lines += [f"layer{i} = {kind} {datum}" for i, (kind, datum) in enumerate(sc.layers, start=1)]
    lines += ["", "[run]"]
    lines += [f"{k} = {v}" for k, v in sc.run.__dict__.items()]
    return "\n".join(lines) + "\n"
