"""Simulation driver: initial state, the per-round pipeline and run history.

Random draws come from one ``numpy.random.Generator`` seeded from the
config, consumed in this order:

1. network hubs and their shortcut targets;
2. per agent, in id order: tech-set size, the tech picks, four endowment
   components (kr, lr, ks, ls), then the two strategy weights;
3. each round, one learning draw per agent, economies in order of their
   smallest member and agents in id order within each.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields, replace
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

import jsonschema
import numpy as np

from .agents import AgentState, compute_metrics, random_tech_set
from .game import PlayRecord, ess_check, learn_update, play_round
from .lattice import UNIT_COSTS, LatticeCosts, TechLattice
from .macro import (MacroParams, MacroState, RoundAggregate, chain_gdp, classify_phase, gdp_of,
                    macro_update)
from .network import NetworkTopology, build_network, degree_stats, percolation_split, split_network
from .wealth import WealthVector

VERSION = "0.1.0"
INDETERMINATE = "Indeterminate"
TIMESERIES_COLUMNS = ("round", "gdp", "deltaGdp", "r", "w", "rho", "phi", "components", "phase",
                      "meanLearning")
AGENT_COLUMNS = ("round", "agent", "decision", "payout", "techSize", "A", "M", "potential")


def config_schema() -> dict:
    text = resources.files("heliosim").joinpath("data", "config.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


@dataclass(frozen=True)
class SimConfig:
    levels: int = 3
    lattice_costs: LatticeCosts = UNIT_COSTS
    n: int = 20
    ring_k: int = 2
    j: int = 3
    hub_links: int = 3
    edge_cost: tuple[float, float, float, float] = (1.0, 2.0, 0.0, 0.0)
    endowment_range: tuple[float, float] = (1.0, 10.0)
    tech_size_range: tuple[int, int] = (1, 5)
    gain: float = 0.1
    macro: MacroParams = MacroParams()
    phase_window: int = 10
    phase_eps: float = 1e-6
    price_vector: tuple[float, float] = (1.0, 1.0)
    phi_reading: str = "paren"
    heterogeneity_reading: str = "magnitude"
    percolation: bool = True
    force_split_round: int | None = None
    rounds: int = 100
    seed: int = 0

    def __post_init__(self):
        for name in ("edge_cost", "endowment_range", "tech_size_range", "price_vector"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if self.rounds < 1:
            raise ValueError("rounds must be >= 1")
        lo, hi = self.endowment_range
        if lo > hi:
            raise ValueError(f"empty endowment range {self.endowment_range}")
        lo, hi = self.tech_size_range
        if not 0 <= lo <= hi:
            raise ValueError(f"empty tech size range {self.tech_size_range}")
        if hi > 19 * self.levels:
            raise ValueError(f"tech size {hi} exceeds the {19 * self.levels} technologies of a "
                             f"{self.levels}-level lattice")
        if self.phase_window < 3:
            raise ValueError("phase window must cover at least 3 rounds")
        if self.gain < 0:
            raise ValueError("gain must be non-negative")

    def to_dict(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d["lattice_costs"] = self.lattice_costs.to_dict()
        d["macro"] = asdict(self.macro)
        for name in ("edge_cost", "endowment_range", "tech_size_range", "price_vector"):
            d[name] = list(d[name])
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> SimConfig:
        """Build a config from JSON data, validating it against the bundled schema."""
        jsonschema.validate(dict(d), config_schema())
        kw = dict(d)
        if "lattice_costs" in kw:
            base = UNIT_COSTS.to_dict()
            base.update(kw["lattice_costs"])
            kw["lattice_costs"] = LatticeCosts.from_dict(base)
        if "macro" in kw:
            kw["macro"] = MacroParams(**kw["macro"])
        return cls(**kw)

    def with_overrides(self, **changes) -> SimConfig:
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


@dataclass
class Economy:
    """One independent game: a connected set of agents with its own prices."""

    members: tuple[int, ...]
    topology: NetworkTopology
    lattice: TechLattice
    macro: MacroState = field(default_factory=MacroState)


@dataclass(frozen=True)
class EconomyRecord:
    members: tuple[int, ...]
    gdp: float
    macro: MacroState
    phi: float
    heterogeneity: float
    mean_degree: float
    split: bool
    partition: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class RoundRecord:
    round: int
    plays: dict[int, PlayRecord]
    growth: dict[int, float]
    spend: dict[int, WealthVector]
    snapshots: dict[int, dict]
    economies: tuple[EconomyRecord, ...]
    gdp: float
    delta_gdp: float
    r: float
    w: float
    rho: float
    phi: float
    components: int
    phase: str
    mean_learning: float
    aggregate: RoundAggregate
    chain_gdp: float = 0.0

    def timeseries_row(self) -> list[str]:
        return [str(self.round), _g(self.gdp), _g(self.delta_gdp), _g(self.r), _g(self.w),
                _g(self.rho), _g(self.phi), str(self.components), self.phase, _g(self.mean_learning)]

    def to_dict(self) -> dict:
        return {
            "round": self.round,
            "gdp": _num(self.gdp),
            "deltaGdp": _num(self.delta_gdp),
            "r": _num(self.r), "w": _num(self.w), "rho": _num(self.rho),
            "phi": _num(self.phi),
            "components": self.components,
            "phase": self.phase,
            "meanLearning": _num(self.mean_learning),
            "chainGdp": _num(self.chain_gdp),
            "economies": [{
                "members": list(e.members),
                "gdp": _num(e.gdp),
                "macro": {k: _num(v) for k, v in asdict(e.macro).items()},
                "phi": _num(e.phi),
                "heterogeneity": _num(e.heterogeneity),
                "meanDegree": _num(e.mean_degree),
                "split": e.split,
                "partition": [list(p) for p in e.partition],
            } for e in self.economies],
            "agents": [dict(self.snapshots[a], decision=self.plays[a].decision.value,
                            payout=_num(self.plays[a].payout), learning=_num(self.plays[a].learning),
                            growth=_num(self.growth[a]), spend=self.spend[a].to_dict())
                       for a in sorted(self.snapshots)],
        }


def _g(x: float) -> str:
    return "%.17g" % x


def _num(x: float):
    """JSON-safe float: non-finite values become strings."""
    x = float(x)
    return x if math.isfinite(x) else repr(x)


@dataclass
class SimHistory:
    config: SimConfig
    records: list[RoundRecord] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    def append(self, record: RoundRecord) -> None:
        if self.records and record.round != self.records[-1].round + 1:
            raise ValueError("rounds must be appended in order")
        self.records.append(record)

    @property
    def final_gdp(self) -> float:
        return self.records[-1].gdp

    def ess(self, tolerance: float = 1e-9) -> bool:
        return ess_check([r.plays for r in self.records], tolerance)

    def timeseries_csv(self) -> str:
        lines = [",".join(TIMESERIES_COLUMNS)]
        lines += [",".join(r.timeseries_row()) for r in self.records]
        return "\n".join(lines) + "\n"

    def agents_csv(self) -> str:
        lines = [",".join(AGENT_COLUMNS)]
        for r in self.records:
            for a in sorted(r.plays):
                snap = r.snapshots[a]
                lines.append(",".join([str(r.round), str(a), r.plays[a].decision.value,
                                       _g(r.plays[a].payout), str(len(snap["tech"])),
                                       _g(snap["A"]), _g(snap["M"]), _g(snap["potential"])]))
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        body = {"config": self.config.to_dict(), "rounds": [r.to_dict() for r in self.records]}
        return json.dumps(body, sort_keys=True)


class Simulation:
    """Mutable run state; :meth:`step` advances one round and records it."""

    def __init__(self, config: SimConfig, agents: Mapping[int, AgentState] | None = None,
                 topology: NetworkTopology | None = None):
        self.config = config
        self.rng = np.random.default_rng(config.seed)
        self.round = 0
        lattice = TechLattice(config.levels, config.lattice_costs)
        if topology is None:
            topology = build_network(config.n, config.ring_k, config.j, config.hub_links,
                                     WealthVector(*config.edge_cost), seed=self.rng)
        if agents is None:
            agents = _initial_agents(config, lattice, topology, self.rng)
        if sorted(agents) != sorted(topology.agents):
            raise ValueError("agent ids must match the network")
        self.agents: dict[int, AgentState] = {a: compute_metrics(s, lattice) for a, s in agents.items()}
        self.economies = [Economy(tuple(sorted(topology.agents)), topology, lattice)]
        self.history = SimHistory(config)
        self._aggregates: list[RoundAggregate] = []

    def step(self) -> RoundRecord:
        cfg = self.config
        self.round += 1
        forced = cfg.force_split_round == self.round
        plays: dict[int, PlayRecord] = {}
        growth: dict[int, float] = {}
        spend: dict[int, WealthVector] = {}
        records: list[EconomyRecord] = []
        chain: list[float] = []
        next_economies: list[Economy] = []
        for econ in sorted(self.economies, key=lambda e: e.members[0]):
            sub = {a: self.agents[a] for a in econ.members}
            out = play_round(sub, econ.topology, econ.lattice)
            after, learned = learn_update(out.agents, out, econ.lattice, self.rng, cfg.gain)
            for a in econ.members:
                s = out.strategies[a]
                plays[a] = PlayRecord(s.decision, out.payouts[a], learned[a], out.growth_potential[a],
                                      s.w_c, s.w_d, out.partners[a])
                growth[a] = out.growth[a].magnitude
                spend[a] = out.spend[a]
            self.agents.update(after)
            chain.append(chain_gdp([econ.lattice.spanning_cost(after[a].tech)[1] for a in econ.members],
                                   [math.hypot(spend[a].m, spend[a].t) for a in econ.members]))
            gdp, sk, sl = _economy_totals(econ.members, plays, growth, spend)
            macro, scale = macro_update(econ.macro, gdp, sk, sl, cfg.macro)
            lattice = econ.lattice.rescaled(scale)
            record, children = self._percolate(econ, after, macro, lattice, gdp, forced)
            records.append(record)
            next_economies.extend(children)
        self.economies = next_economies
        record = self._round_record(plays, growth, spend, tuple(records), math.fsum(chain))
        self.history.append(record)
        return record

    def _percolate(self, econ: Economy, agents: Mapping[int, AgentState], macro: MacroState,
                   lattice: TechLattice, gdp: float, forced: bool) -> tuple[EconomyRecord, list[Economy]]:
        cfg = self.config
        topo = econ.topology
        stats = degree_stats(topo, [agents[a].potential for a in topo.agents], cfg.heterogeneity_reading)
        perc = percolation_split(topo, stats, cfg.phi_reading)
        if forced and topo.n >= 2:
            after = split_network(topo)
            partition = tuple(after.components())
        elif cfg.percolation and not perc.connected:
            after, partition = perc.topology, perc.components
        else:
            after, partition = topo, (econ.members,)
        split = len(partition) > 1
        children = [Economy(members, after.subgraph(members) if split else topo, lattice, macro)
                    for members in partition]
        rec = EconomyRecord(econ.members, gdp, macro, perc.phi, stats.heterogeneity,
                            stats.weighted_mean_degree, split, partition)
        return rec, children

    def _round_record(self, plays, growth, spend, econs: tuple[EconomyRecord, ...],
                      chain: float = 0.0) -> RoundRecord:
        cfg = self.config
        ids = sorted(self.agents)
        gdp = math.fsum(e.gdp for e in econs)
        prev_gdp = self.history.records[-1].gdp if self.history.records else 0.0
        delta = 0.0 if prev_gdp == 0 else (gdp - prev_gdp) / prev_gdp
        sizes = np.array([len(e.members) for e in econs], dtype=float)

        def weighted(values):
            return float(np.dot(sizes, values) / sizes.sum())

        r = weighted([e.macro.r for e in econs])
        w = weighted([e.macro.w for e in econs])
        rho = weighted([e.macro.rho for e in econs])
        states = [self.agents[a] for a in ids]
        agg = RoundAggregate(
            round=self.round,
            gdp=gdp,
            spend_k=math.fsum(abs(spend[a].capital) for a in ids),
            spend_l=math.fsum(abs(spend[a].labour) for a in ids),
            r=r, w=w,
            coop_fraction=sum(plays[a].decision.value == "C" for a in ids) / len(ids),
            mean_frontier=float(np.mean([s.tech.frontier_level() for s in states])),
            ordinary_wealth=math.fsum(s.endowment.kr + s.endowment.lr for s in states),
            space_wealth=math.fsum(s.endowment.ks + s.endowment.ls for s in states),
            mean_degree=weighted([e.mean_degree for e in econs]),
        )
        self._aggregates.append(agg)
        window = self._aggregates[-cfg.phase_window:]
        phase = classify_phase(window, cfg.phase_eps) if len(window) >= 3 else INDETERMINATE
        return RoundRecord(
            round=self.round,
            plays=plays, growth=growth, spend=spend,
            snapshots={a: self.agents[a].snapshot() for a in ids},
            economies=econs,
            gdp=gdp, delta_gdp=delta, r=r, w=w, rho=rho,
            phi=min(e.phi for e in econs),
            components=sum(len(e.partition) for e in econs),
            phase=phase,
            mean_learning=float(np.mean([plays[a].learning for a in ids])),
            aggregate=agg,
            chain_gdp=chain,
        )

    def run(self, rounds: int | None = None) -> SimHistory:
        for _ in range(self.config.rounds if rounds is None else rounds):
            self.step()
        return self.history


def _economy_totals(members: Iterable[int], plays, growth, spend) -> tuple[float, float, float]:
    members = list(members)
    gdp = gdp_of([plays[a].payout for a in members], [growth[a] for a in members])
    sk = math.fsum(abs(spend[a].capital) for a in members)
    sl = math.fsum(abs(spend[a].labour) for a in members)
    return gdp, sk, sl


def _initial_agents(config: SimConfig, lattice: TechLattice, topo: NetworkTopology,
                    rng: np.random.Generator) -> dict[int, AgentState]:
    lo, hi = config.tech_size_range
    e_lo, e_hi = config.endowment_range
    drafts = {}
    for a in topo.agents:
        size = int(rng.integers(lo, hi + 1))
        tech = random_tech_set(lattice, size, rng)
        base = WealthVector(*(float(x) for x in rng.uniform(e_lo, e_hi, size=4)))
        weights = tuple(float(x) for x in rng.uniform(0.0, 1.0, size=2))
        span, _ = lattice.spanning_cost(tech)
        drafts[a] = compute_metrics(AgentState(a, tech, base + span, weights), lattice)
    agents = {}
    for a, st in drafts.items():
        # neighbourhood distances credited once, split across kr and lr
        hood = topo.neighborhood(a, max(st.growth_potential, 0.0))
        reach = math.fsum(topo.path_distance(a, b) for b in hood)
        agents[a] = replace(st, endowment=st.endowment + WealthVector(kr=reach / 2.0, lr=reach / 2.0))
    return agents


def init(config: SimConfig, agents: Mapping[int, AgentState] | None = None,
         topology: NetworkTopology | None = None) -> Simulation:
    return Simulation(config, agents, topology)


def step(sim: Simulation) -> RoundRecord:
    return sim.step()


def run(config: SimConfig) -> SimHistory:
    return Simulation(config).run()


def recompute_macro(history: SimHistory) -> list[list[MacroState]]:
    """Rebuild every economy's macro state from the stored per-agent records.

    This replays only the reporting layer (GDP, spending and feedback), so it
    checks that the stored macro trajectory follows from the stored plays.
    """
    params = history.config.macro
    states: dict[tuple[int, ...], MacroState] = {}
    out = []
    for rec in history.records:
        row = []
        for econ in rec.economies:
            prev = states.get(econ.members, MacroState() if not states else None)
            if prev is None:
                raise ValueError(f"economy {econ.members} has no recorded parent")
            gdp, sk, sl = _economy_totals(econ.members, rec.plays, rec.growth, rec.spend)
            macro, _ = macro_update(prev, gdp, sk, sl, params)
            row.append(macro)
            for members in econ.partition:
                states[members] = macro
        out.append(row)
    return out


def write_outputs(history: SimHistory, out_dir, agents_csv: bool = True) -> dict[str, str]:
    """Write timeseries.csv, final.json and manifest.json (plus agents.csv)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    last = history.records[-1]
    files = {"timeseries": "timeseries.csv", "final": "final.json", "manifest": "manifest.json"}
    (out / files["timeseries"]).write_text(history.timeseries_csv(), encoding="utf-8")
    (out / files["final"]).write_text(json.dumps(last.to_dict(), indent=2, sort_keys=True), encoding="utf-8")
    if agents_csv:
        files["agents"] = "agents.csv"
        (out / files["agents"]).write_text(history.agents_csv(), encoding="utf-8")
    manifest = {
        "version": VERSION,
        "seed": history.config.seed,
        "rounds": len(history),
        "config": history.config.to_dict(),
        "files": files,
    }
    (out / files["manifest"]).write_text(json.dumps(manifest, indent=2, sort_keys=True), encoding="utf-8")
    return {k: str(out / v) for k, v in files.items()}


__all__ = [
    "SimConfig", "Economy", "EconomyRecord", "RoundRecord", "SimHistory", "Simulation",
    "init", "step", "run", "recompute_macro", "write_outputs", "config_schema",
    "TIMESERIES_COLUMNS", "AGENT_COLUMNS", "INDETERMINATE", "VERSION",
]
