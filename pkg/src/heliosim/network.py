"""Newman-Watts style agent network with hub shortcuts.

Agents sit on a ring and are joined to their ``ring_k / 2`` nearest
neighbours on each side.  ``j`` hub agents each receive ``hub_links``
long-range edges to non-hub agents they are not already adjacent to.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

from .errors import NotFoundError
from .wealth import WealthVector

EDGE_CSV_COLUMNS = ("from", "to", "kr", "lr", "ks", "ls", "kind")


@dataclass(frozen=True)
class NetEdge:
    u: int
    v: int
    cost: WealthVector
    kind: str  # "ring" or "hub"

    @property
    def magnitude(self) -> float:
        return math.sqrt(self.cost.m ** 2 + self.cost.t ** 2)


@dataclass(frozen=True)
class DegreeStats:
    weighted_mean_degree: float
    heterogeneity: float


@dataclass
class NetworkTopology:
    """Undirected, weighted agent graph.

    ``agents`` lists the agent ids present (a sub-network keeps the global
    ids of its members).  Distance queries are cached; treat instances as
    immutable once built.
    """

    agents: tuple[int, ...]
    edges: tuple[NetEdge, ...]
    ring_k: int = 0
    hubs: tuple[int, ...] = ()
    hub_links: int = 0
    rng_seed: int | None = None
    _dist: np.ndarray | None = field(default=None, repr=False, compare=False)
    _deg: dict | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.agents = tuple(int(a) for a in self.agents)
        self._pos = {a: k for k, a in enumerate(self.agents)}
        seen = set()
        for e in self.edges:
            if e.u == e.v:
                raise ValueError(f"self-loop on agent {e.u}")
            key = (min(e.u, e.v), max(e.u, e.v))
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            if e.u not in self._pos or e.v not in self._pos:
                raise ValueError(f"edge {key} touches an agent outside the network")
            seen.add(key)

    @property
    def n(self) -> int:
        return len(self.agents)

    def index(self, agent: int) -> int:
        try:
            return self._pos[agent]
        except KeyError:
            raise NotFoundError(agent) from None

    def degree(self, agent: int) -> int:
        if self._deg is None:
            self._deg = dict(zip(self.agents, self.degrees().tolist()))
        try:
            return self._deg[agent]
        except KeyError:
            raise NotFoundError(agent) from None

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=np.int64)
        for e in self.edges:
            deg[self._pos[e.u]] += 1
            deg[self._pos[e.v]] += 1
        return deg

    def neighbors(self, agent: int) -> list[int]:
        self.index(agent)
        out = [e.v if e.u == agent else e.u for e in self.edges if agent in (e.u, e.v)]
        return sorted(out)

    def total_cost(self) -> float:
        return float(sum(e.magnitude for e in self.edges))

    def _matrix(self, edges: Sequence[NetEdge]):
        rows = [self._pos[e.u] for e in edges]
        cols = [self._pos[e.v] for e in edges]
        data = [e.magnitude for e in edges]
        return coo_matrix((data, (rows, cols)), shape=(self.n, self.n)).tocsr()

    @property
    def distances(self) -> np.ndarray:
        """All-pairs minimum path cost (``inf`` between components)."""
        if self._dist is None:
            self._dist = shortest_path(self._matrix(self.edges), method="D", directed=False)
        return self._dist

    def path_distance(self, i: int, j: int) -> float:
        return float(self.distances[self.index(i), self.index(j)])

    def neighborhood(self, agent: int, radius: float) -> list[int]:
        """Agents strictly closer than ``radius``, excluding ``agent``."""
        if radius < 0:
            raise ValueError("radius must be non-negative")
        row = self.distances[self.index(agent)]
        return [a for k, a in enumerate(self.agents) if a != agent and row[k] < radius]

    def components(self) -> list[tuple[int, ...]]:
        """Connected components, each sorted, ordered by smallest member."""
        if self.n == 0:
            return []
        _, labels = connected_components(self._matrix(self.edges), directed=False)
        groups: dict[int, list[int]] = {}
        for k, lab in enumerate(labels):
            groups.setdefault(int(lab), []).append(self.agents[k])
        return sorted((tuple(sorted(g)) for g in groups.values()), key=lambda g: g[0])

    def is_connected(self) -> bool:
        return len(self.components()) <= 1

    def without_edges(self, removed: Iterable[NetEdge]) -> NetworkTopology:
        drop = set(removed)
        return NetworkTopology(self.agents, tuple(e for e in self.edges if e not in drop),
                               self.ring_k, self.hubs, self.hub_links, self.rng_seed)

    def subgraph(self, members: Iterable[int]) -> NetworkTopology:
        keep = set(members)
        agents = tuple(a for a in self.agents if a in keep)
        edges = tuple(e for e in self.edges if e.u in keep and e.v in keep)
        hubs = tuple(h for h in self.hubs if h in keep)
        return NetworkTopology(agents, edges, self.ring_k, hubs, self.hub_links, self.rng_seed)

    def edge_rows(self) -> list[dict]:
        return [{"from": e.u, "to": e.v, "kr": e.cost.kr, "lr": e.cost.lr,
                 "ks": e.cost.ks, "ls": e.cost.ls, "kind": e.kind} for e in self.edges]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=EDGE_CSV_COLUMNS, lineterminator="\n")
        w.writeheader()
        for row in self.edge_rows():
            w.writerow({k: (repr(float(v)) if k in ("kr", "lr", "ks", "ls") else v) for k, v in row.items()})
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, agents: Iterable[int]) -> NetworkTopology:
        rows = csv.DictReader(io.StringIO(text))
        edges = tuple(NetEdge(int(r["from"]), int(r["to"]),
                              WealthVector(float(r["kr"]), float(r["lr"]), float(r["ks"]), float(r["ls"])),
                              r["kind"]) for r in rows)
        return cls(tuple(agents), edges)


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def build_network(n: int, ring_k: int = 2, j: int = 0, hub_links: int = 0,
                  edge_cost: WealthVector = WealthVector(1.0, 2.0), seed=0) -> NetworkTopology:
    """Ring of ``n`` agents plus ``j`` hubs with ``hub_links`` shortcuts each.

    ``seed`` may be an int or a shared ``numpy.random.Generator``; the hubs
    are drawn first, then each hub's targets in hub order.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n >= 3 and (ring_k % 2 or not 2 <= ring_k < n):
        raise ValueError(f"ring_k must be even with 2 <= ring_k < n, got {ring_k}")
    if not 0 <= j <= n:
        raise ValueError(f"need 0 <= j <= n, got j={j}")
    if hub_links < 0:
        raise ValueError("hub_links must be non-negative")
    if edge_cost.m == 0 and edge_cost.t == 0:
        raise ValueError("edge cost must be non-zero")
    rng = _as_rng(seed)
    edges: list[NetEdge] = []
    adjacent: set[tuple[int, int]] = set()

    def add(u, v, kind):
        edges.append(NetEdge(min(u, v), max(u, v), edge_cost, kind))
        adjacent.add((min(u, v), max(u, v)))

    if n >= 3:
        for i in range(n):
            for step in range(1, ring_k // 2 + 1):
                v = (i + step) % n
                if (min(i, v), max(i, v)) not in adjacent:
                    add(i, v, "ring")
    elif n == 2:
        add(0, 1, "ring")
    hubs = sorted(int(h) for h in rng.choice(n, size=j, replace=False)) if j else []
    hub_set = set(hubs)
    for h in hubs:
        candidates = [a for a in range(n)
                      if a != h and a not in hub_set and (min(a, h), max(a, h)) not in adjacent]
        if len(candidates) < hub_links:
            raise ValueError(f"hub {h} has only {len(candidates)} eligible targets for {hub_links} links")
        for t in rng.choice(len(candidates), size=hub_links, replace=False):
            add(h, candidates[int(t)], "hub")
    seed_value = seed if isinstance(seed, (int, np.integer)) else None
    return NetworkTopology(tuple(range(n)), tuple(edges), ring_k, tuple(hubs), hub_links, seed_value)


def path_distance(topo: NetworkTopology, i: int, j: int) -> float:
    return topo.path_distance(i, j)


def neighborhood(topo: NetworkTopology, agent: int, radius: float) -> list[int]:
    return topo.neighborhood(agent, radius)


def degree_stats(topo: NetworkTopology, potentials: Sequence[float],
                 reading: str = "magnitude") -> DegreeStats:
    """Potential-weighted mean degree and degree heterogeneity.

    ``reading`` selects how the ``|deg(A)|`` factor is read: ``"magnitude"``
    multiplies by the degree itself (a mean cubed degree), ``"multiplicity"``
    counts the agents sharing each degree value (a mean squared degree).
    """
    if topo.n == 0:
        raise ValueError("degree statistics of an empty network")
    pots = np.asarray(potentials, dtype=float)
    if pots.shape != (topo.n,):
        raise ValueError(f"expected {topo.n} potentials, got {pots.shape}")
    total = topo.total_cost()
    if total == 0:
        return DegreeStats(0.0, 0.0)
    deg = topo.degrees().astype(float)
    mean_deg = float(pots @ deg / total)
    if reading == "magnitude":
        spread = float(np.sum(deg ** 2 * deg) / topo.n)
    elif reading == "multiplicity":
        values, counts = np.unique(deg, return_counts=True)
        spread = float(np.sum(values ** 2 * counts) / topo.n)
    else:
        raise ValueError(f"unknown heterogeneity reading {reading!r}")
    return DegreeStats(mean_deg, spread - mean_deg ** 2)


def percolation_phi(heterogeneity: float, n: int, reading: str = "paren") -> float:
    """Percolation indicator; ``inf`` when the heterogeneity is zero.

    ``reading="paren"`` evaluates (1 - h)^n / (2h); ``"power"`` evaluates
    (1 - h^n) / (2h).  Evaluated in log space so large ``n`` saturates to
    a signed infinity instead of overflowing.
    """
    if reading not in ("paren", "power"):
        raise ValueError(f"unknown phi reading {reading!r}")
    h = float(heterogeneity)
    if h == 0.0:
        return math.inf
    if reading == "paren":
        base = 1.0 - h
        if base == 0.0:
            return 0.0
        sign = -1.0 if (base < 0 and n % 2) else 1.0
        log_num = n * math.log(abs(base))
    else:
        hn_sign = -1.0 if (h < 0 and n % 2) else 1.0
        log_hn = n * math.log(abs(h))
        if log_hn < 700:
            num = 1.0 - hn_sign * math.exp(log_hn)
            return num / (2.0 * h)
        sign, log_num = -hn_sign, log_hn
    log_phi = log_num - math.log(2.0 * abs(h))
    magnitude = math.exp(log_phi) if log_phi < 700 else math.inf
    return sign * math.copysign(1.0, h) * magnitude


@dataclass(frozen=True)
class Percolation:
    phi: float
    connected: int
    components: tuple[tuple[int, ...], ...]
    topology: NetworkTopology
    degenerate: bool = False


def split_network(topo: NetworkTopology) -> NetworkTopology:
    """Remove hub shortcuts, heaviest first, until the graph disconnects.

    Among equal weights the later-drawn shortcut goes first.  If removing
    every shortcut still leaves one component, the attempt fails and the
    original topology is returned unchanged.
    """
    if topo.n < 2 or len(topo.components()) >= 2:
        return topo
    hubs = [(k, e) for k, e in enumerate(topo.edges) if e.kind == "hub"]
    if not hubs or topo.without_edges([e for _, e in hubs]).is_connected():
        return topo
    hubs.sort(key=lambda ke: (-ke[1].magnitude, -ke[0]))
    current = topo
    for _, e in hubs:
        current = current.without_edges([e])
        if len(current.components()) >= 2:
            return current
    return topo


def percolation_split(topo: NetworkTopology, stats: DegreeStats, reading: str = "paren") -> Percolation:
    degenerate = stats.heterogeneity == 0.0
    phi = percolation_phi(stats.heterogeneity, topo.n, reading)
    if phi >= 0.5 or math.isnan(phi):
        return Percolation(phi, 1, tuple(topo.components()), topo, degenerate)
    after = split_network(topo)
    if after is topo:
        # nothing to cut: the ring alone holds the economy together
        return Percolation(phi, 0, (tuple(sorted(topo.agents)),), topo, degenerate)
    return Percolation(phi, 0, tuple(after.components()), after, degenerate)
