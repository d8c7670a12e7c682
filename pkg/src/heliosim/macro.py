"""Economy-level feedback, trajectory measurements and phase classification."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import IndeterminateError
from .wealth import BasisScale


@dataclass(frozen=True)
class MacroParams:
    alpha_r: float = 0.1
    alpha_w: float = 0.1
    alpha_rho: float = 0.1
    earth_growth: float = 0.03
    rho_min: float = 0.5
    rho_max: float = 2.0

    def __post_init__(self):
        if not 0 < self.rho_min <= 1.0 <= self.rho_max:
            raise ValueError("need 0 < rho_min <= 1 <= rho_max")


@dataclass(frozen=True)
class MacroState:
    round: int = 0
    gdp: float = 0.0
    delta_gdp: float = 0.0
    r: float = 0.0            # interest growth after feedback
    w: float = 0.0            # wage growth after feedback
    rho: float = 1.0          # inflation index
    r_observed: float = 0.0   # relative change in capital spending
    w_observed: float = 0.0   # relative change in labour spending
    spend_k: float = 0.0
    spend_l: float = 0.0

    def __post_init__(self):
        if not self.rho > 0:
            raise ValueError("inflation index must be positive")


def gdp_of(payouts: Iterable[float], growth_magnitudes: Iterable[float]) -> float:
    return float(math.fsum(payouts) + math.fsum(growth_magnitudes))


def chain_gdp(spanning: Iterable[float], adoption: Iterable[float]) -> float:
    """Cost-side GDP: chain cost of every owned tech set plus this round's adoptions.

    Exported next to :func:`gdp_of` as a secondary measure; the payout form
    drives the feedback loop.
    """
    return float(math.fsum(spanning) + math.fsum(adoption))


def _relative(new: float, old: float) -> float:
    return 0.0 if old == 0 else (new - old) / old


def _clamp(x: float, lo: float, hi: float) -> float:
    return min(max(x, lo), hi)


def macro_update(prev: MacroState, gdp: float, spend_k: float, spend_l: float,
                 params: MacroParams = MacroParams()) -> tuple[MacroState, BasisScale]:
    """Advance the macro state one round and return the next basis scale.

    Earth enters as an exogenous growth rate: domestic growth above it
    raises rates and the inflation index, growth below it lowers them.
    Every scale factor is clamped to ``[rho_min, rho_max]``.
    """
    r_obs = _relative(spend_k, prev.spend_k)
    w_obs = _relative(spend_l, prev.spend_l)
    delta = _relative(gdp, prev.gdp)
    gap = delta - params.earth_growth
    lo, hi = params.rho_min, params.rho_max
    rho = _clamp(1.0 + params.alpha_rho * gap, lo, hi)
    r_next = r_obs + params.alpha_r * gap
    w_next = w_obs + params.alpha_w * gap
    state = MacroState(prev.round + 1, gdp, delta, r_next, w_next, rho, r_obs, w_obs, spend_k, spend_l)
    scale = BasisScale(_clamp(1.0 + r_next, lo, hi), _clamp(1.0 + w_next, lo, hi), rho)
    return state, scale


@dataclass(frozen=True)
class RoundAggregate:
    """Whole-economy totals recorded once per round."""

    round: int
    gdp: float
    spend_k: float
    spend_l: float
    r: float
    w: float
    coop_fraction: float
    mean_frontier: float
    ordinary_wealth: float
    space_wealth: float
    mean_degree: float


@dataclass(frozen=True)
class TrajectoryMetrics:
    """Latest finite-difference measurements; ``None`` marks indeterminate."""

    grad_h: float | None
    kappa_h: float | None
    spend_k: float
    spend_l: float
    d_r: float | None
    d_w: float | None
    strategy_drift: float | None
    market_drift: float | None
    kappa_t: float | None
    potential: float


def _diff1(xs: Sequence[float]) -> float | None:
    return xs[-1] - xs[-2] if len(xs) >= 2 else None


def _diff2(xs: Sequence[float]) -> float | None:
    return xs[-1] - 2 * xs[-2] + xs[-3] if len(xs) >= 3 else None


def trajectory_metrics(history: Sequence[RoundAggregate],
                       price_vector: tuple[float, float] = (1.0, 1.0)) -> TrajectoryMetrics:
    if not history:
        raise IndeterminateError("empty history")
    earth, helio = price_vector
    if earth <= 0 or helio <= 0:
        raise ValueError("prices must be positive")
    gdp = [h.gdp for h in history]
    k2 = _diff2(gdp)
    return TrajectoryMetrics(
        grad_h=_diff1(gdp),
        kappa_h=None if k2 is None else k2 * earth / helio,
        spend_k=math.fsum(h.spend_k for h in history),
        spend_l=math.fsum(h.spend_l for h in history),
        d_r=_diff1([h.r for h in history]),
        d_w=_diff1([h.w for h in history]),
        strategy_drift=_diff1([h.coop_fraction for h in history]),
        market_drift=_diff1([h.ordinary_wealth + h.space_wealth for h in history]),
        kappa_t=_diff1([h.mean_frontier for h in history]),
        potential=math.fsum(gdp),
    )


UP, FLAT = "↑", "↔"

PHASE_TABLE: Mapping[tuple[str, ...], str] = {
    (FLAT, "0", "+", "D", "0", "0"): "I",
    (UP, "+", "+", "C", "+", "0"): "II",
    (FLAT, "0", "+", "D", "-", "+"): "III",
    (UP, "+", "-", "C", FLAT, "-"): "IV",
}
UNCLASSIFIED = "Unclassified"


@dataclass(frozen=True)
class PhaseSignature:
    tech: str
    space_wealth: str
    ordinary_wealth: str
    strategy: str
    game: str
    degree: str

    def as_tuple(self) -> tuple[str, ...]:
        return (self.tech, self.space_wealth, self.ordinary_wealth, self.strategy, self.game, self.degree)


def _sign(x: float, eps: float) -> str:
    if x > eps:
        return "+"
    if x < -eps:
        return "-"
    return "0"


def phase_signature(window: Sequence[RoundAggregate], eps: float = 1e-6) -> PhaseSignature:
    if len(window) < 3:
        raise IndeterminateError("phase classification needs at least 3 rounds")
    first, last = window[0], window[-1]
    tech = UP if last.mean_frontier - first.mean_frontier > eps else FLAT
    steps = np.diff([h.gdp for h in window])
    rising, falling = bool(np.any(steps > eps)), bool(np.any(steps < -eps))
    if rising and falling:
        game = FLAT
    elif rising:
        game = "+"
    elif falling:
        game = "-"
    else:
        game = "0"
    coop = float(np.mean([h.coop_fraction for h in window]))
    return PhaseSignature(
        tech,
        _sign(last.space_wealth - first.space_wealth, eps),
        _sign(last.ordinary_wealth - first.ordinary_wealth, eps),
        "C" if coop >= 0.5 else "D",
        game,
        _sign(last.mean_degree - first.mean_degree, eps),
    )


def classify_signature(sig: PhaseSignature | Sequence[str]) -> str:
    key = sig.as_tuple() if isinstance(sig, PhaseSignature) else tuple(sig)
    key = tuple("-" if s == "−" else s for s in key)
    return PHASE_TABLE.get(key, UNCLASSIFIED)


def classify_phase(window: Sequence[RoundAggregate], eps: float = 1e-6) -> str:
    return classify_signature(phase_signature(window, eps))
