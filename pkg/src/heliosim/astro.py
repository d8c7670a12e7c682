"""Mission cost, revenue and resource depletion calculations.

Costs are in the energy units of the delta-v table (km/s), added linearly
by default.  ``quadratic=True`` converts each delta-v to specific kinetic
energy, 0.5 * dv**2, before summing.
"""

from __future__ import annotations

import json
import math
import statistics
from dataclasses import asdict, dataclass
from functools import lru_cache
from importlib import resources
from typing import Iterable, Mapping, Union


@lru_cache(maxsize=None)
def _load(name: str) -> dict:
    return json.loads(resources.files("heliosim").joinpath("data", name).read_text(encoding="utf-8"))


def delta_v_table() -> dict[str, float]:
    """The twelve published transfers, in table order."""
    return {row["name"]: row["delta_v"] for row in _load("delta_v.json")["transfers"]}


def transfer_aliases() -> dict[str, str]:
    return dict(_load("delta_v.json")["aliases"])


def delta_v(name: str) -> float:
    table = delta_v_table()
    if name in table:
        return table[name]
    aliases = transfer_aliases()
    if name in aliases:
        return table[aliases[name]]
    lowered = {k.lower(): v for k, v in table.items()}
    if name.lower() in lowered:
        return lowered[name.lower()]
    raise KeyError(f"unknown transfer {name!r}; known: {sorted(table) + sorted(aliases)}")


Transfer = Union[str, float]


@dataclass(frozen=True)
class MissionProfile:
    launch: Transfer
    rendezvous: Transfer
    e0: float = 0.0
    grade: float = 1.0
    eta1: float = 1.0
    eta2: float = 1.0
    enthalpy: float = 0.0
    mass: float = 1.0
    velocity: float = 0.0
    price_vector: tuple[float, float] = (1.0, 1.0)
    quadratic: bool = False
    price_scaling: bool = False

    def __post_init__(self):
        checks = {
            "grade": 0 < self.grade <= 1,
            "eta1": 0 < self.eta1 <= 1,
            "eta2": 0 < self.eta2 <= 1,
            "enthalpy": self.enthalpy >= 0,
            "e0": self.e0 >= 0,
            "mass": self.mass > 0,
            "velocity": self.velocity >= 0,
            "price_vector": len(self.price_vector) == 2 and all(p > 0 for p in self.price_vector),
        }
        for name, ok in checks.items():
            if not ok:
                raise ValueError(f"invalid mission parameter {name}={getattr(self, name)!r}")

    @property
    def u_launch(self) -> float:
        return _energy(self.launch, self.quadratic)

    @property
    def u_rendezvous(self) -> float:
        return _energy(self.rendezvous, self.quadratic)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["price_vector"] = list(self.price_vector)
        return d


def _energy(t: Transfer, quadratic: bool) -> float:
    dv = delta_v(t) if isinstance(t, str) else float(t)
    return 0.5 * dv * dv if quadratic else dv


@dataclass(frozen=True)
class MissionCost:
    transport: float   # one-way transport, launch plus rendezvous
    refinement: float
    total: float       # round trip transport plus refinement


def mission_cost(p: MissionProfile) -> MissionCost:
    transport = p.u_launch + p.u_rendezvous
    refinement = p.e0 / (p.grade * p.eta1) + p.enthalpy / p.eta2
    return MissionCost(transport, refinement, 2.0 * transport + refinement)


@dataclass(frozen=True)
class MissionProfit:
    revenue: float
    profit: float


def mission_profit(p: MissionProfile) -> MissionProfit:
    revenue = 0.5 * p.mass * p.velocity ** 2
    if p.price_scaling:
        earth, helio = p.price_vector
        revenue *= (earth - helio) / earth
    return MissionProfit(revenue, revenue - mission_cost(p).total)


def depletion_years(static_index: float, growth: float) -> float:
    """Years until a resource base is exhausted under compounding consumption.

    ``static_index`` is the base divided by current annual consumption.
    """
    if not static_index > 0:
        raise ValueError("static index must be positive")
    if growth < 0:
        raise ValueError("growth must be non-negative")
    if growth == 0:
        return float(static_index)
    return math.log1p(growth * static_index) / math.log1p(growth)


def depletion_table() -> list[dict]:
    return [dict(row) for row in _load("depletion.json")["elements"]]


def element_static_index(name: str) -> float:
    for row in _load("depletion.json")["elements"]:
        if row["element"].lower() == name.lower():
            return row["static_index"]
    names = ", ".join(r["element"] for r in _load("depletion.json")["elements"])
    raise KeyError(f"unknown element {name!r}; valid: {names}")


def platinum_series() -> dict[int, float]:
    """Yearly percent change in platinum consumption, 2001-2013."""
    return {row["year"]: row["change"] for row in _load("platinum.json")["series"]}


def growth_stats(series: Mapping[int, float] | Iterable[float], exclusions: Iterable[int] = (),
                 percent: bool = True) -> tuple[float, float]:
    """Mean and sample variance of a growth series, as decimal fractions.

    ``series`` is either a year -> change mapping (so years can be excluded)
    or a plain sequence.  Values are read as percentages unless
    ``percent=False``.
    """
    skip = set(exclusions)
    if isinstance(series, Mapping):
        values = [v for year, v in sorted(series.items()) if year not in skip]
    else:
        values = list(series)
    if not values:
        raise ValueError("no values left after exclusions")
    scale = 0.01 if percent else 1.0
    data = [v * scale for v in values]
    variance = statistics.variance(data) if len(data) > 1 else 0.0
    return statistics.fmean(data), variance
