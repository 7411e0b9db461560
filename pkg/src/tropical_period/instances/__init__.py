"""Instance documents: JSON description of a fan, PL function and run options."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

from ..errors import InvalidInstance, TropicalPeriodError
from ..lattice_core import Fan, PLFunction

GOLDEN = ("cubic", "quartic", "cube")

DEFAULT_OPTIONS = {"y_sweep": [5.0, 10.0, 20.0], "tolerance": 1e-9, "format": "json"}


@dataclass
class InstanceSpec:
    name: str
    fan: Fan
    h: PLFunction
    sigma: Fan | None = None
    options: dict[str, Any] = field(default_factory=lambda: dict(DEFAULT_OPTIONS))


def _int_rows(value, what: str) -> tuple[tuple[int, ...], ...]:
    if not isinstance(value, list) or not all(isinstance(r, list) for r in value):
        raise InvalidInstance(f"{what} must be an array of integer arrays")
    for r in value:
        if not all(isinstance(x, int) and not isinstance(x, bool) for x in r):
            raise InvalidInstance(f"{what} must contain integers only")
    return tuple(tuple(r) for r in value)


def _fan(doc: dict, rank: int, what: str) -> Fan:
    try:
        rays = _int_rows(doc["rays"], f"{what}.rays")
        cones = _int_rows(doc["max_cones"], f"{what}.max_cones")
    except KeyError as exc:
        raise InvalidInstance(f"missing field {what}.{exc.args[0]}") from None
    try:
        return Fan(rank, rays, cones)
    except TropicalPeriodError as exc:
        raise InvalidInstance(f"{what}: {exc}") from exc


def parse_instance(doc: dict, name: str = "instance") -> InstanceSpec:
    if not isinstance(doc, dict):
        raise InvalidInstance("instance document must be a JSON object")
    for key in ("rank", "rays", "max_cones", "h"):
        if key not in doc:
            raise InvalidInstance(f"missing field {key}")
    rank = doc["rank"]
    if not isinstance(rank, int) or rank < 1:
        raise InvalidInstance("rank must be a positive integer")
    fan = _fan(doc, rank, "fan")
    h = doc["h"]
    if not isinstance(h, list) or len(h) != fan.n_rays or not all(isinstance(x, int) for x in h):
        raise InvalidInstance("h must be an integer array aligned with rays")
    sigma = _fan(doc["sigma"], rank, "sigma") if doc.get("sigma") else None
    options = dict(DEFAULT_OPTIONS)
    options.update(doc.get("options") or {})
    options["y_sweep"] = [float(y) for y in options["y_sweep"]]
    options["tolerance"] = float(options["tolerance"])
    return InstanceSpec(doc.get("name", name), fan, PLFunction(tuple(h)), sigma, options)


def load_instance(source: str | Path) -> InstanceSpec:
    """Load a golden instance by name or any instance file by path."""
    if str(source) in GOLDEN:
        text = resources.files(__name__).joinpath(f"{source}.json").read_text()
        name = str(source)
    else:
        path = Path(source)
        try:
            text = path.read_text()
        except OSError as exc:
            raise InvalidInstance(f"cannot read {path}: {exc.strerror}") from None
        name = path.stem
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInstance(f"not valid JSON: {exc}") from None
    return parse_instance(doc, name)
