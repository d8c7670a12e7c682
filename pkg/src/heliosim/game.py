"""Evolutionary prisoner's dilemma played over technology and wealth."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, replace
from enum import Enum
from typing import Mapping, Sequence

import numpy as np

from .agents import AgentState, GrowthVectors, adopt, compute_metrics, inner_sets, plan_growth
from .errors import IndeterminateError
from .lattice import TechLattice, TechSet
from .network import NetworkTopology
from .wealth import ZERO, WealthVector


class Decision(str, Enum):
    C = "C"
    D = "D"


@dataclass(frozen=True)
class StrategyWeights:
    w_c: float
    w_d: float
    degenerate: bool = False

    @property
    def decision(self) -> Decision:
        # ties cooperate
        return Decision.C if self.w_c >= self.w_d else Decision.D


UNIFORM = StrategyWeights(0.5, 0.5, degenerate=True)


def strategy_of(agent: AgentState, neighborhood_states: Sequence[AgentState],
                topo: NetworkTopology | None = None) -> StrategyWeights:
    """Degree- and potential-weighted strategy weights for one agent.

    With an empty neighborhood only the growth ratio scales the agent's own
    weights.  A zero growth magnitude or a zero neighbourhood sum falls back
    to uniform weights flagged as degenerate.
    """
    g = agent.growth
    if g.magnitude == 0:
        return UNIFORM
    ratio = g.advance / g.magnitude
    w_c, w_d = agent.weights
    if not neighborhood_states:
        return StrategyWeights(abs(ratio * w_c), abs(ratio * w_d))
    if topo is None:
        raise ValueError("a topology is needed to weigh a non-empty neighborhood")
    pot_sum = sum(topo.degree(nb.id) * nb.potential for nb in neighborhood_states)
    c_sum = sum(nb.weights[0] for nb in neighborhood_states)
    d_sum = sum(nb.weights[1] for nb in neighborhood_states)
    if pot_sum == 0 or c_sum == 0 or d_sum == 0:
        return UNIFORM
    share = ratio * topo.degree(agent.id) * agent.potential / pot_sum
    return StrategyWeights(abs(share * w_c / c_sum), abs(share * w_d / d_sum))


@dataclass(frozen=True)
class PairPayoff:
    tech_i: TechSet
    tech_j: TechSet
    wealth_i: float
    wealth_j: float


def wealth_payoff(own: Decision, other: Decision, growth_potential: float,
                  other_weights: StrategyWeights) -> float:
    """Wealth earned by a player choosing ``own`` against ``other``."""
    if own is Decision.C and other is Decision.D:
        return growth_potential - other_weights.w_d
    if own is Decision.D and other is Decision.C:
        return growth_potential + other_weights.w_c
    return 0.0


def tech_payoff(own: Decision, other: Decision, own_tech: TechSet, other_tech: TechSet) -> TechSet:
    """Technology outcome for a player: collaboration joins, licensing keeps own set."""
    if own is Decision.C and other is Decision.C:
        return TechSet(own_tech.levels, own_tech.nodes | other_tech.nodes)
    if own is Decision.C:
        # own set united with the meet, which is already contained in it
        return TechSet(own_tech.levels, own_tech.nodes | (own_tech.nodes & other_tech.nodes))
    return own_tech


def pair_payoff(i: AgentState, j: AgentState, s_i: StrategyWeights, s_j: StrategyWeights,
                lattice: TechLattice) -> PairPayoff:
    lattice.check(i.tech)
    lattice.check(j.tech)
    di, dj = s_i.decision, s_j.decision
    return PairPayoff(
        tech_payoff(di, dj, i.tech, j.tech),
        tech_payoff(dj, di, j.tech, i.tech),
        wealth_payoff(di, dj, i.growth_potential, s_j),
        wealth_payoff(dj, di, j.growth_potential, s_i),
    )


def credit(amount: float) -> WealthVector:
    """Wealth credited evenly to ordinary capital and labour."""
    return WealthVector(kr=amount / 2.0, lr=amount / 2.0)


@dataclass
class RoundOutcome:
    agents: dict[int, AgentState]
    payouts: dict[int, float]
    strategies: dict[int, StrategyWeights]
    neighborhoods: dict[int, tuple[int, ...]]
    partners: dict[int, tuple[int, ...]]
    growth: dict[int, GrowthVectors]
    growth_potential: dict[int, float]
    spend: dict[int, WealthVector]


def interaction_pairs(neighborhoods: Mapping[int, Sequence[int]]) -> list[tuple[int, int]]:
    """Unordered pairs where at least one side has the other in range."""
    pairs = {(min(i, j), max(i, j)) for i, nbrs in neighborhoods.items() for j in nbrs}
    return sorted(pairs)


def settle(agents: Mapping[int, AgentState], pairs: Sequence[tuple[int, int]],
           strategies: Mapping[int, StrategyWeights], lattice: TechLattice
           ) -> tuple[dict[int, TechSet], dict[int, float]]:
    """Evaluate every pair against the frozen states and accumulate outcomes.

    Same outcomes as calling :func:`pair_payoff` on each pair; only
    mutual cooperation can add technology, since a licensing cooperator
    keeps its own set.
    """
    for s in agents.values():
        lattice.check(s.tech)
    tech = {a: set(s.tech.nodes) for a, s in agents.items()}
    payout = {a: 0.0 for a in agents}
    decision = {a: strategies[a].decision for a in agents}
    for i, j in pairs:
        di, dj = decision[i], decision[j]
        if di is Decision.C and dj is Decision.C:
            tech[i] |= agents[j].tech.nodes
            tech[j] |= agents[i].tech.nodes
        elif di is not dj:
            payout[i] += wealth_payoff(di, dj, agents[i].growth_potential, strategies[j])
            payout[j] += wealth_payoff(dj, di, agents[j].growth_potential, strategies[i])
    return {a: TechSet(lattice.levels, frozenset(t)) for a, t in tech.items()}, payout


def play_round(agents: Mapping[int, AgentState], topo: NetworkTopology,
               lattice: TechLattice) -> RoundOutcome:
    """One round: metrics, neighborhoods, strategies, payoffs, then growth.

    Payoffs are evaluated on a frozen snapshot and applied in agent-id
    order; every agent then takes one growth step.
    """
    ids = sorted(agents)
    current = {a: compute_metrics(agents[a], lattice) for a in ids}
    growth = {a: current[a].growth for a in ids}
    gp = {a: current[a].growth_potential for a in ids}
    hoods = {a: tuple(topo.neighborhood(a, max(current[a].growth_potential, 0.0))) for a in ids}
    strategies = {a: strategy_of(current[a], [current[b] for b in hoods[a]], topo) for a in ids}
    pairs = interaction_pairs(hoods)
    partners: dict[int, list[int]] = {a: [] for a in ids}
    for i, j in pairs:
        partners[i].append(j)
        partners[j].append(i)
    new_tech, payouts = settle(current, pairs, strategies, lattice)
    spend = {}
    for a in ids:
        st = replace(current[a], tech=new_tech[a], endowment=current[a].endowment + credit(payouts[a]))
        st = compute_metrics(st, lattice)
        plan = plan_growth(st, lattice)
        spend[a] = ZERO
        if plan is not None:
            st = adopt(st, lattice, plan)
            spend[a] = plan.cost
        current[a] = st
    return RoundOutcome(current, payouts, strategies, hoods,
                        {a: tuple(p) for a, p in partners.items()}, growth, gp, spend)


def learning_value(agent: AgentState, neighbors: Sequence[AgentState], lattice: TechLattice) -> float:
    """Summed technological difference over summed potential ratios."""
    if not neighbors:
        return 0.0
    # neighbours frequently share a tech set after collaborating; price each set once
    counts = Counter(nb.tech.nodes for nb in neighbors)
    lattice.check(agent.tech)
    for nodes in counts:
        lattice.check(TechSet(lattice.levels, nodes))
    num = sum(k * inner_sets(lattice.levels, agent.tech.nodes, nodes) for nodes, k in counts.items())
    den = sum(agent.potential / nb.potential for nb in neighbors if nb.potential != 0)
    if den == 0:
        return 0.0
    return num / den


def learn_update(agents: Mapping[int, AgentState], outcome: RoundOutcome, lattice: TechLattice,
                 rng: np.random.Generator, gain: float) -> tuple[dict[int, AgentState], dict[int, float]]:
    """Imitate the best-paid neighbour with probability clamp(gain * L, 0, 1).

    One uniform draw is consumed per agent in id order, whether or not it
    is used, so the random stream does not depend on the outcome.
    """
    ids = sorted(agents)
    learned: dict[int, float] = {}
    weights = {}
    for a in ids:
        hood = outcome.neighborhoods.get(a, ())
        value = learning_value(agents[a], [agents[b] for b in hood], lattice)
        learned[a] = value
        p = min(max(value * gain, 0.0), 1.0) if hood else 0.0
        u = rng.random()
        weights[a] = agents[a].weights
        if u < p:
            best = max(hood, key=lambda b: (outcome.payouts.get(b, 0.0), -b))
            weights[a] = agents[best].weights
    return {a: replace(agents[a], weights=weights[a]) for a in ids}, learned


@dataclass(frozen=True)
class PlayRecord:
    """What one agent did in one round, enough to replay its payoffs."""

    decision: Decision
    payout: float
    learning: float
    growth_potential: float
    w_c: float
    w_d: float
    partners: tuple[int, ...] = ()


def eta(rounds: Sequence[Mapping[int, PlayRecord]]) -> float:
    """First difference of the population mean learning value."""
    if len(rounds) < 2:
        raise IndeterminateError("need at least two recorded rounds")
    prev, last = rounds[-2], rounds[-1]
    return float(np.mean([r.learning for r in last.values()]) -
                 np.mean([r.learning for r in prev.values()]))


def profitable_deviation(plays: Mapping[int, PlayRecord], agent: int) -> bool:
    """Would flipping this agent's decision strictly raise its wealth payoff?

    Only decisions some partner actually plays are considered, since
    imitation is the only route to a different strategy.
    """
    me = plays[agent]
    present = {plays[j].decision for j in me.partners}
    flip = Decision.D if me.decision is Decision.C else Decision.C
    if flip not in present:
        return False

    def total(choice: Decision) -> float:
        return sum(wealth_payoff(choice, plays[j].decision, me.growth_potential,
                                 StrategyWeights(plays[j].w_c, plays[j].w_d)) for j in me.partners)

    return total(flip) > total(me.decision) + 1e-12


def ess_check(rounds: Sequence[Mapping[int, PlayRecord]], tolerance: float = 1e-9) -> bool:
    if abs(eta(rounds)) >= tolerance:
        return False
    last = rounds[-1]
    return not any(profitable_deviation(last, a) for a in last)
