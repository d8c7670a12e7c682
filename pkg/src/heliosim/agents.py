"""Per-agent state and derived technology metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .lattice import TechLattice, TechSet, _structure
from .wealth import WealthVector


@dataclass(frozen=True)
class GrowthVectors:
    advance: float = 0.0  # first component of the advancement vector
    master: float = 0.0   # second component of the mastery vector
    magnitude: float = 0.0
    adv_target: int | None = None
    mas_target: int | None = None

    @property
    def direction(self) -> tuple[float, float]:
        norm = math.hypot(self.advance, self.master)
        if norm == 0:
            return (0.0, 0.0)
        return (self.advance / norm, self.master / norm)


ZERO_GROWTH = GrowthVectors()


@dataclass(frozen=True)
class AgentState:
    id: int
    tech: TechSet
    endowment: WealthVector
    weights: tuple[float, float] = (0.5, 0.5)  # (w_C, w_D)
    advancement: float = 0.0
    mastery: float = 0.0
    potential: float = 0.0
    growth_potential: float = 0.0
    growth: GrowthVectors = ZERO_GROWTH

    def snapshot(self) -> dict:
        return {
            "id": self.id,
            "tech": self.tech.ids(),
            "endowment": self.endowment.to_dict(),
            "weights": list(self.weights),
            "A": self.advancement,
            "M": self.mastery,
            "potential": self.potential,
            "growthPotential": self.growth_potential,
        }


def potential_of(advancement: float, mastery: float, endowment: WealthVector) -> float:
    e = endowment
    return mastery * (e.kr + e.lr) + advancement ** 3 * (e.ks + e.ls)


def owned_measures(tech: TechSet, lattice: TechLattice) -> np.ndarray:
    """Edge measure owned at each level (index 0 is unused)."""
    m = lattice.mask(tech)
    own = m[lattice.edge_u] & m[lattice.edge_v]
    return np.bincount(lattice.edge_level[own], weights=lattice.edge_mag[own],
                       minlength=lattice.levels + 1)


def advancement_mastery(tech: TechSet, lattice: TechLattice) -> tuple[float, float]:
    owned = owned_measures(tech, lattice)
    total = owned.sum()
    if total == 0:
        return 0.0, 0.0
    frontier = tech.frontier_level()
    adv = float(owned[frontier] / total)
    mas = float(np.sum(owned[1:] / lattice.level_measure[1:]))
    return adv, mas


def compute_metrics(agent: AgentState, lattice: TechLattice) -> AgentState:
    """Recompute advancement, mastery, potential, growth potential and growth vectors."""
    lattice.check(agent.tech)
    adv, mas = advancement_mastery(agent.tech, lattice)
    pot = potential_of(adv, mas, agent.endowment)
    _, span = lattice.spanning_cost(agent.tech)
    out = replace(agent, advancement=adv, mastery=mas, potential=pot, growth_potential=pot - span)
    a_node, m_node = best_candidates(out, lattice)
    return replace(out, growth=growth_vectors(out, lattice, a_node, m_node))


def candidates(agent: AgentState, lattice: TechLattice) -> tuple[list[int], list[int]]:
    """Admissible next technologies split into (advancement, mastery) axes.

    Advancement candidates sit one level above the frontier; mastery
    candidates are unowned nodes at or below it.
    """
    frontier = agent.tech.frontier_level()
    adv, mas = [], []
    for node in lattice.admissible(agent.tech):
        (adv if lattice.nodes[node].level > frontier else mas).append(node)
    return adv, mas


def _attractiveness(nodes: list[int], lattice: TechLattice, dist: np.ndarray) -> np.ndarray:
    idx = np.asarray(nodes, dtype=np.intp)
    return lattice.norms[idx] / dist[idx] ** 2


def _best(nodes: list[int], lattice: TechLattice, dist: np.ndarray) -> int | None:
    if not nodes:
        return None
    score = _attractiveness(nodes, lattice, dist)
    return nodes[int(np.argmax(score))]


def best_candidates(agent: AgentState, lattice: TechLattice) -> tuple[int | None, int | None]:
    adv, mas = candidates(agent, lattice)
    dist = lattice.set_distance(agent.tech)
    return _best(adv, lattice, dist), _best(mas, lattice, dist)


def growth_vectors(agent: AgentState, lattice: TechLattice,
                   candidate_adv: int | None, candidate_mas: int | None) -> GrowthVectors:
    """Advancement/mastery growth components and their combined magnitude.

    Negative potentials give zero components: an agent in debt has no
    capacity to grow along either axis.
    """
    dist = lattice.set_distance(agent.tech)
    gp = max(agent.growth_potential, 0.0)
    a = m = 0.0
    if candidate_adv is not None:
        d = dist[candidate_adv]
        a = max(agent.potential * lattice.norms[candidate_adv] / d ** 2, 0.0)
    if candidate_mas is not None:
        d = dist[candidate_mas]
        m = max(agent.potential * lattice.norms[candidate_mas] / d ** 2 * gp, 0.0)
    return GrowthVectors(float(a), float(m), float(a * m * gp), candidate_adv, candidate_mas)


@lru_cache(maxsize=200_000)
def _agent_inner(levels: int, pair: frozenset) -> float:
    if len(pair) == 1:
        (a,) = pair
        return float(len(a))  # every node is its own closest counterpart
    # fixed orientation so the floating-point sum does not depend on argument order
    a, b = sorted(pair, key=lambda x: (len(x), sorted(x)))
    inner = _inner_for(levels)
    ia = np.fromiter(a, dtype=np.intp)
    ib = np.fromiter(b, dtype=np.intp)
    only_b = np.fromiter(b - a, dtype=np.intp)
    total = inner[np.ix_(ia, ib)].min(axis=1).sum()
    if only_b.size:
        total += inner[np.ix_(only_b, ia)].min(axis=1).sum()
    return float(total)


@lru_cache(maxsize=None)
def _inner_for(levels: int) -> np.ndarray:
    below = _structure(levels).below.astype(np.int64)
    inter = below @ below.T
    sizes = below.sum(axis=1)
    return (sizes[:, None] + sizes[None, :] - inter) / inter


def agent_inner(a: AgentState, b: AgentState, lattice: TechLattice) -> float:
    """Technological difference: each owned node paired with its closest counterpart."""
    lattice.check(a.tech)
    lattice.check(b.tech)
    return inner_sets(lattice.levels, a.tech.nodes, b.tech.nodes)


def inner_sets(levels: int, x: frozenset, y: frozenset) -> float:
    """Technological difference of two (already validated) node sets."""
    return _agent_inner(levels, frozenset((x, y)))


@dataclass(frozen=True)
class GrowthPlan:
    node: int
    cost: WealthVector
    scalar: float
    axis: str  # "advance" or "master"


def plan_growth(agent: AgentState, lattice: TechLattice) -> GrowthPlan | None:
    """Pick the technology ``grow_step`` would adopt, if any is affordable."""
    adv, mas = candidates(agent, lattice)
    dist = lattice.set_distance(agent.tech)
    budget = agent.growth_potential
    order = [("advance", adv), ("master", mas)]
    if agent.growth.master > agent.growth.advance:
        order.reverse()
    for axis, nodes in order:
        affordable = [x for x in nodes if dist[x] < budget]
        best = _best(affordable, lattice, dist)
        if best is not None:
            source = lattice.nearest_owned(agent.tech, best)
            vec, scalar = lattice.chain_cost(source, best)
            return GrowthPlan(best, vec, scalar, axis)
    return None


def adopt(agent: AgentState, lattice: TechLattice, plan: GrowthPlan) -> AgentState:
    tech = TechSet(lattice.levels, agent.tech.nodes | {plan.node})
    return compute_metrics(replace(agent, tech=tech, endowment=agent.endowment - plan.cost), lattice)


def grow_step(agent: AgentState, lattice: TechLattice) -> AgentState:
    """Adopt at most one affordable technology and pay its chain cost."""
    plan = plan_growth(agent, lattice)
    if plan is None:
        return agent
    return adopt(agent, lattice, plan)


def random_tech_set(lattice: TechLattice, size: int, rng: np.random.Generator) -> TechSet:
    """Grow a closed tech set of ``size`` non-zero nodes by random admissible picks."""
    if size > lattice.n - 1:
        raise ValueError(f"tech set size {size} exceeds the {lattice.n - 1} nodes of the lattice")
    ts = TechSet(lattice.levels, frozenset({0}))
    for _ in range(size):
        options = lattice.admissible(ts)
        pick = options[int(rng.integers(len(options)))]
        ts = TechSet(lattice.levels, ts.nodes | {pick})
    return ts
