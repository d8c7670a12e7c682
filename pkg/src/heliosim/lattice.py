"""Leveled technology lattice.

Every level ``h >= 1`` carries the same 19-node template: one innovative
node, six base nodes and twelve peripheral nodes.  A single zero
technology sits at level 0 below everything.  Directed time edges run from
level ``h`` to ``h + 1`` and define the partial order; undirected trace
edges join nodes inside a level and only matter for costing.

Node ids are dense integers: 0 is the zero technology and the node with
``index`` ``i`` on level ``h`` has id ``1 + 19 * (h - 1) + i``.  Inside a
level, index 0 is innovative, 1-6 are base and 7-18 are peripheral.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Iterable, NamedTuple, Union

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import minimum_spanning_tree, shortest_path

from .errors import InvariantViolation, NotFoundError
from .wealth import IDENTITY_SCALE, ZERO, BasisScale, WealthVector, rescale

NODES_PER_LEVEL = 19
N_BASE = 6
N_PERIPHERAL = 12
# cross-level out-degree by kind
TIME_DEGREE = {"innovative": 7, "base": 4, "peripheral": 3}


class Kind(str, Enum):
    ZERO = "zero"
    INNOVATIVE = "innovative"
    BASE = "base"
    PERIPHERAL = "peripheral"


class TechNode(NamedTuple):
    level: int
    index: int
    kind: Kind


def kind_of_index(index: int) -> Kind:
    if index == 0:
        return Kind.INNOVATIVE
    if 1 <= index <= N_BASE:
        return Kind.BASE
    if N_BASE < index < NODES_PER_LEVEL:
        return Kind.PERIPHERAL
    raise ValueError(f"index {index} outside the 19-node level template")


def node_id(level: int, index: int) -> int:
    if level == 0:
        if index != 0:
            raise ValueError("level 0 only holds the zero technology")
        return 0
    kind_of_index(index)
    return 1 + NODES_PER_LEVEL * (level - 1) + index


def _base(level: int, j: int) -> int:
    return node_id(level, 1 + j % N_BASE)


def _periph(level: int, k: int) -> int:
    return node_id(level, 1 + N_BASE + k % N_PERIPHERAL)


def _level_trace_pairs(h: int) -> list[tuple[int, int]]:
    c = node_id(h, 0)
    pairs = [(c, _base(h, j)) for j in range(N_BASE)]
    pairs += [(_base(h, j), _base(h, j + 1)) for j in range(N_BASE)]
    pairs += [(_periph(h, k), _periph(h, k + 1)) for k in range(N_PERIPHERAL)]
    pairs += [(_base(h, j), _periph(h, k))
              for j in range(N_BASE) for k in range(N_PERIPHERAL) if abs(j - k) <= 4]
    return pairs


def _successors(h: int, index: int) -> list[int]:
    """Level-(h+1) targets of the level-h node at ``index``."""
    nxt = h + 1
    kind = kind_of_index(index)
    if kind is Kind.INNOVATIVE:
        return [node_id(nxt, 0)] + [_base(nxt, j) for j in range(N_BASE)]
    if kind is Kind.BASE:
        j = index - 1
        return [_base(nxt, j), _periph(nxt, 2 * j), _periph(nxt, 2 * j + 1), _periph(nxt, 2 * j + 2)]
    k = index - 1 - N_BASE
    return [_periph(nxt, k), _periph(nxt, k + 1), _base(nxt, k // 2)]


@dataclass(frozen=True)
class _Structure:
    levels: int
    nodes: tuple[TechNode, ...]
    trace: tuple[tuple[int, int, int], ...]  # (u, v, level)
    time: tuple[tuple[int, int, int], ...]   # (parent, child, child level)
    below: np.ndarray                         # below[i, j] <=> node j <= node i

    @property
    def n(self) -> int:
        return len(self.nodes)


@lru_cache(maxsize=None)
def _structure(levels: int) -> _Structure:
    nodes = [TechNode(0, 0, Kind.ZERO)]
    for h in range(1, levels + 1):
        nodes += [TechNode(h, i, kind_of_index(i)) for i in range(NODES_PER_LEVEL)]
    trace, time = [], []
    for h in range(1, levels + 1):
        trace += [(u, v, h) for u, v in _level_trace_pairs(h)]
        time += [(0, node_id(1, i), 1) for i in range(NODES_PER_LEVEL)] if h == 1 else []
        if h < levels:
            for i in range(NODES_PER_LEVEL):
                time += [(node_id(h, i), t, h + 1) for t in _successors(h, i)]
    n = len(nodes)
    below = np.eye(n, dtype=bool)
    # time edges are listed level by level, so one forward pass closes the relation
    for parent, child, _ in time:
        below[child] |= below[parent]
    below.setflags(write=False)
    return _Structure(levels, tuple(nodes), tuple(trace), tuple(time), below)


@dataclass(frozen=True)
class LatticeCosts:
    """Edge costs at level 1 and the per-level growth ratio.

    ``trace`` is the (kr, lr) cost of a same-level edge and ``time`` the
    (ks, ls) cost of an edge into level 1.  Both grow by ``ratio`` per level.
    The default gives unit distance sqrt(5) on level 1.
    """

    trace: tuple[float, float] = (1.0, 2.0)
    time: tuple[float, float] = (1.0, 2.0)
    ratio: float = math.sqrt(2.0)

    def __post_init__(self):
        object.__setattr__(self, "trace", tuple(float(x) for x in self.trace))
        object.__setattr__(self, "time", tuple(float(x) for x in self.time))
        for name, pair in (("trace", self.trace), ("time", self.time)):
            if len(pair) != 2 or not all(x > 0 and math.isfinite(x) for x in pair):
                raise ValueError(f"{name} cost components must be two positive numbers, got {pair}")
        if not (self.ratio > 0 and math.isfinite(self.ratio)):
            raise ValueError(f"ratio must be positive, got {self.ratio}")

    def trace_cost(self, level: int) -> WealthVector:
        f = self.ratio ** (level - 1)
        return WealthVector(kr=self.trace[0] * f, lr=self.trace[1] * f)

    def time_cost(self, level: int) -> WealthVector:
        f = self.ratio ** (level - 1)
        return WealthVector(ks=self.time[0] * f, ls=self.time[1] * f)

    def to_dict(self) -> dict:
        return {"trace": list(self.trace), "time": list(self.time), "ratio": self.ratio}

    @classmethod
    def from_dict(cls, d: dict) -> LatticeCosts:
        return cls(tuple(d["trace"]), tuple(d["time"]), float(d.get("ratio", math.sqrt(2.0))))


UNIT_COSTS = LatticeCosts()


@dataclass(frozen=True)
class Edge:
    u: int
    v: int
    kind: str  # "trace" or "time"
    level: int
    cost: WealthVector

    @property
    def magnitude(self) -> float:
        return self.cost.m if self.kind == "trace" else self.cost.t


NodeRef = Union[int, TechNode]


@lru_cache(maxsize=100_000)
def _frontier(levels: int, nodes: frozenset) -> int:
    return max(_structure(levels).nodes[i].level for i in nodes)


@dataclass(frozen=True)
class TechSet:
    """A downward-closed set of technologies, always holding the zero node."""

    levels: int
    nodes: frozenset

    def __contains__(self, node: int) -> bool:
        return node in self.nodes

    def __len__(self) -> int:
        return len(self.nodes)

    def __iter__(self):
        return iter(sorted(self.nodes))

    def ids(self) -> list[int]:
        return sorted(self.nodes)

    def frontier_level(self) -> int:
        return _frontier(self.levels, self.nodes)


@dataclass(frozen=True)
class _Template:
    """Scale-independent edge arrays for one (levels, costs) pair."""

    edge_u: np.ndarray
    edge_v: np.ndarray
    edge_level: np.ndarray
    is_trace: tuple[bool, ...]
    base_vec: np.ndarray
    edge_index: dict
    children: tuple[tuple[int, ...], ...]
    parents: tuple[tuple[int, ...], ...]


@lru_cache(maxsize=64)
def _template(levels: int, costs: LatticeCosts) -> _Template:
    s = _structure(levels)
    rows = [(u, v, h, True, costs.trace_cost(h)) for u, v, h in s.trace]
    rows += [(u, v, h, False, costs.time_cost(h)) for u, v, h in s.time]
    children = [[] for _ in range(s.n)]
    parents = [[] for _ in range(s.n)]
    for p, c, _ in s.time:
        children[p].append(c)
        parents[c].append(p)
    arrays = []
    for col in (0, 1, 2):
        a = np.array([r[col] for r in rows], dtype=np.intp)
        a.setflags(write=False)
        arrays.append(a)
    base = np.array([r[4].as_array() for r in rows], dtype=float)
    base.setflags(write=False)
    index = {(min(r[0], r[1]), max(r[0], r[1])): k for k, r in enumerate(rows)}
    return _Template(*arrays, tuple(r[3] for r in rows), base, index,
                     tuple(map(tuple, children)), tuple(map(tuple, parents)))


@lru_cache(maxsize=100_000)
def _closure_problem(levels: int, nodes: frozenset) -> str:
    """Empty string for a valid tech set, otherwise what is wrong with it."""
    s = _structure(levels)
    if not nodes or 0 not in nodes or any(not (0 <= i < s.n) for i in nodes):
        return "tech set must contain the zero node and only lattice nodes"
    ids = list(nodes)
    mask = np.zeros(s.n, dtype=bool)
    mask[ids] = True
    if not np.all(mask[s.below[ids].any(axis=0)]):
        return "tech set is not downward closed"
    return ""


@lru_cache(maxsize=None)
def _hood_matrix(levels: int) -> np.ndarray:
    """hood[i, k] is true when k lies in the technology neighbourhood of i."""
    lat = TechLattice(levels)
    hood = np.zeros((lat.n, lat.n), dtype=bool)
    for i in range(1, lat.n):
        hood[i, lat.neighborhood(i)] = True
    hood.setflags(write=False)
    return hood


class TechLattice:
    """Immutable technology lattice with costed edges.

    ``scale`` is the basis rescaling applied on top of ``costs``; use
    :meth:`rescaled` to derive the lattice for a new macro regime.
    """

    def __init__(self, levels: int, costs: LatticeCosts = UNIT_COSTS,
                 scale: BasisScale = IDENTITY_SCALE):
        if not isinstance(levels, (int, np.integer)) or levels < 1:
            raise ValueError(f"levels must be an integer >= 1, got {levels!r}")
        self.levels = int(levels)
        self.costs = costs
        self.scale = scale
        self._s = _structure(self.levels)
        tpl = _template(self.levels, costs)
        self._t = tpl
        self.edge_u, self.edge_v, self.edge_level = tpl.edge_u, tpl.edge_v, tpl.edge_level
        factors = np.array([scale.r_scale, scale.w_scale, scale.rho_scale, scale.rho_scale])
        self.edge_vec = tpl.base_vec * factors
        self.edge_vec.setflags(write=False)
        v = self.edge_vec
        self.edge_mag = np.array([math.hypot(a, b) if tr else math.hypot(c, d)
                                  for (a, b, c, d), tr in zip(v.tolist(), tpl.is_trace)])
        self.level_measure = np.bincount(self.edge_level, weights=self.edge_mag,
                                         minlength=self.levels + 1)
        self._children, self._parents = tpl.children, tpl.parents
        self._edges = None
        self._dist = None
        self._pred = None
        self._norms = None
        self._inner = None
        self._span_cache: dict = {}

    # ---- structure -------------------------------------------------------
    @property
    def n(self) -> int:
        return self._s.n

    @property
    def nodes(self) -> tuple[TechNode, ...]:
        return self._s.nodes

    @property
    def below(self) -> np.ndarray:
        """Boolean order matrix; ``below[i, j]`` is true when node j <= node i."""
        return self._s.below

    def resolve(self, node: NodeRef) -> int:
        if isinstance(node, TechNode):
            if not (0 <= node.level <= self.levels):
                raise NotFoundError(node)
            try:
                nid = node_id(node.level, node.index)
            except ValueError as exc:
                raise NotFoundError(node) from exc
            if self.nodes[nid] != node:
                raise NotFoundError(node)
            return nid
        if isinstance(node, (int, np.integer)) and 0 <= node < self.n:
            return int(node)
        raise NotFoundError(node)

    def node(self, level: int, index: int = 0) -> int:
        return self.resolve(TechNode(level, index, Kind.ZERO if level == 0 else kind_of_index(index)))

    def level_of(self, node: NodeRef) -> int:
        return self.nodes[self.resolve(node)].level

    def kind_of(self, node: NodeRef) -> Kind:
        return self.nodes[self.resolve(node)].kind

    def level_nodes(self, level: int) -> list[int]:
        if level == 0:
            return [0]
        start = node_id(level, 0)
        return list(range(start, start + NODES_PER_LEVEL))

    def children(self, node: NodeRef) -> list[int]:
        return list(self._children[self.resolve(node)])

    def parents(self, node: NodeRef) -> list[int]:
        return list(self._parents[self.resolve(node)])

    def unit_distance(self, level: int) -> float:
        """Magnitude of a time edge entering ``level``."""
        return rescale(self.costs.time_cost(level), self.scale).t

    def edge(self, u: NodeRef, v: NodeRef) -> Edge | None:
        a, b = self.resolve(u), self.resolve(v)
        k = self._t.edge_index.get((min(a, b), max(a, b)))
        return None if k is None else self.edges[k]

    @property
    def edges(self) -> tuple[Edge, ...]:
        if self._edges is None:
            t = self._t
            self._edges = tuple(
                Edge(int(u), int(v), "trace" if tr else "time", int(h), WealthVector(*vec))
                for u, v, h, tr, vec in zip(t.edge_u, t.edge_v, t.edge_level, t.is_trace,
                                            self.edge_vec.tolist()))
        return self._edges

    def rescaled(self, scale: BasisScale) -> TechLattice:
        """Same structure and base costs under a different basis scale."""
        return TechLattice(self.levels, self.costs, scale)

    def same_structure(self, other: TechLattice) -> bool:
        return self.levels == other.levels

    # ---- tech sets -------------------------------------------------------
    def down_set(self, node: NodeRef) -> TechSet:
        i = self.resolve(node)
        return TechSet(self.levels, frozenset(np.flatnonzero(self.below[i]).tolist()))

    def closure(self, nodes: Iterable[NodeRef]) -> TechSet:
        """Downward closure of ``nodes``; the zero node is always included."""
        ids = [self.resolve(x) for x in nodes]
        mask = self.below[ids].any(axis=0) if ids else np.zeros(self.n, dtype=bool)
        mask = mask.copy()
        mask[0] = True
        return TechSet(self.levels, frozenset(np.flatnonzero(mask).tolist()))

    def as_set(self, x: Union[TechSet, NodeRef]) -> TechSet:
        if isinstance(x, TechSet):
            self.check(x)
            return x
        return self.down_set(x)

    def check(self, ts: TechSet) -> None:
        if ts.levels != self.levels:
            raise ValueError(f"tech set from a {ts.levels}-level lattice used with a {self.levels}-level one")
        problem = _closure_problem(self.levels, ts.nodes)
        if problem:
            raise InvariantViolation(problem)

    def is_closed(self, nodes: Iterable[int]) -> bool:
        ids = list(nodes)
        mask = np.zeros(self.n, dtype=bool)
        mask[ids] = True
        return bool(np.all(mask[np.flatnonzero(self.below[ids].any(axis=0))]))

    def mask(self, ts: TechSet) -> np.ndarray:
        m = np.zeros(self.n, dtype=bool)
        m[list(ts.nodes)] = True
        return m

    def admissible(self, ts: TechSet) -> list[int]:
        """Nodes outside ``ts`` whose every predecessor is already owned."""
        owned = ts.nodes
        out = []
        for i in range(1, self.n):
            if i not in owned and all(p in owned for p in self._parents[i]):
                out.append(i)
        return out

    # ---- metric ----------------------------------------------------------
    def _ensure_paths(self):
        if self._dist is None:
            w = coo_matrix((self.edge_mag, (self.edge_u, self.edge_v)), shape=(self.n, self.n)).tocsr()
            self._dist, self._pred = shortest_path(w, method="D", directed=False, return_predecessors=True)

    @property
    def distances(self) -> np.ndarray:
        """All-pairs minimum chain-cost magnitudes."""
        self._ensure_paths()
        return self._dist

    def chain_path(self, a: NodeRef, b: NodeRef) -> list[int]:
        i, j = self.resolve(a), self.resolve(b)
        self._ensure_paths()
        path = [j]
        while path[-1] != i:
            path.append(int(self._pred[i, path[-1]]))
        return path[::-1]

    def chain_cost(self, a: NodeRef, b: NodeRef) -> tuple[WealthVector, float]:
        """Summed edge costs and scalar magnitude along a cheapest chain."""
        path = self.chain_path(a, b)
        idx = [self._t.edge_index[(min(u, v), max(u, v))] for u, v in zip(path, path[1:])]
        if not idx:
            return ZERO, 0.0
        return WealthVector.from_array(self.edge_vec[idx].sum(axis=0)), float(self.edge_mag[idx].sum())

    def set_distance(self, ts: TechSet) -> np.ndarray:
        """Cheapest chain magnitude from any owned node to every node."""
        return self.distances[list(ts.nodes)].min(axis=0)

    def nearest_owned(self, ts: TechSet, target: int) -> int:
        owned = sorted(ts.nodes)
        return owned[int(np.argmin(self.distances[owned, target]))]

    def neighborhood(self, node: NodeRef) -> list[int]:
        """Same-level nodes sharing a direct predecessor, plus direct successors."""
        i = self.resolve(node)
        if i == 0:
            raise ValueError("the zero technology has no neighborhood")
        basis = set(self._parents[i])
        level = self.nodes[i].level
        siblings = [k for k in self.level_nodes(level) if k != i and basis & set(self._parents[k])]
        return siblings + list(self._children[i])

    def neighborhood_norm(self, node: NodeRef) -> float:
        i = self.resolve(node)
        if i == 0:
            raise ValueError("the zero technology has no neighborhood")
        return float(self.norms[i])

    @property
    def norms(self) -> np.ndarray:
        """Neighborhood norm of every node (0 for the zero node)."""
        if self._norms is None:
            hood = _hood_matrix(self.levels)
            self._norms = np.where(hood, self.distances, 0.0).sum(axis=1)
        return self._norms

    # ---- inner product ---------------------------------------------------
    @property
    def inner_matrix(self) -> np.ndarray:
        """|[a] union [b]| / |[a] intersect [b]| for all node pairs."""
        if self._inner is None:
            below = self.below.astype(np.int64)
            inter = below @ below.T
            sizes = below.sum(axis=1)
            union = sizes[:, None] + sizes[None, :] - inter
            self._inner = union / inter
            self._inner.setflags(write=False)
        return self._inner

    def tech_inner(self, a: NodeRef, b: NodeRef) -> float:
        return float(self.inner_matrix[self.resolve(a), self.resolve(b)])

    # ---- spanning chain of a tech set -------------------------------------
    def spanning_cost(self, ts: TechSet) -> tuple[WealthVector, float]:
        """Cost of the cheapest edge set connecting every owned technology."""
        key = ts.nodes
        hit = self._span_cache.get(key)
        if hit is not None:
            return hit
        if len(ts.nodes) == 1:
            result = (ZERO, 0.0)
        else:
            m = self.mask(ts)
            own = m[self.edge_u] & m[self.edge_v]
            w = coo_matrix((self.edge_mag[own], (self.edge_u[own], self.edge_v[own])),
                           shape=(self.n, self.n)).tocsr()
            tree = minimum_spanning_tree(w).tocoo()
            idx = [self._t.edge_index[(min(u, v), max(u, v))] for u, v in zip(tree.row.tolist(), tree.col.tolist())]
            vec = self.edge_vec[idx].sum(axis=0) if idx else np.zeros(4)
            result = (WealthVector.from_array(vec), float(tree.data.sum()))
        self._span_cache[key] = result
        return result

    # ---- serialization ---------------------------------------------------
    def to_dict(self) -> dict:
        cp = self.costs.to_dict()
        cp["scale"] = {"r": self.scale.r_scale, "w": self.scale.w_scale, "rho": self.scale.rho_scale}
        return {
            "levels": self.levels,
            "cost_params": cp,
            "nodes": [{"level": t.level, "index": t.index, "kind": t.kind.value} for t in self.nodes],
            "edges": [{"from": e.u, "to": e.v, "kind": e.kind, "cost": e.cost.to_dict()} for e in self.edges],
        }

    @classmethod
    def from_dict(cls, d: dict) -> TechLattice:
        cp = d["cost_params"]
        sc = cp.get("scale", {})
        lat = cls(int(d["levels"]), LatticeCosts.from_dict(cp),
                  BasisScale(sc.get("r", 1.0), sc.get("w", 1.0), sc.get("rho", 1.0)))
        if "edges" in d and len(d["edges"]) != len(lat.edges):
            raise ValueError("edge list does not match the lattice template")
        return lat


def build_lattice(levels: int, cost_params: LatticeCosts = UNIT_COSTS) -> TechLattice:
    return TechLattice(levels, cost_params)


def down_set(lattice: TechLattice, node: NodeRef) -> TechSet:
    return lattice.down_set(node)


def symdiff(lattice: TechLattice, a, b) -> TechSet:
    """(A | B) minus (A & B), closed downward again."""
    sa, sb = lattice.as_set(a), lattice.as_set(b)
    return lattice.closure(sa.nodes ^ sb.nodes)


def join(lattice: TechLattice, a, b) -> TechSet:
    sa, sb = lattice.as_set(a), lattice.as_set(b)
    return TechSet(lattice.levels, sa.nodes | sb.nodes)


def meet(lattice: TechLattice, a, b) -> TechSet:
    sa, sb = lattice.as_set(a), lattice.as_set(b)
    return TechSet(lattice.levels, sa.nodes & sb.nodes)


def tech_inner(lattice: TechLattice, a: NodeRef, b: NodeRef) -> float:
    return lattice.tech_inner(a, b)


def chain_cost(lattice: TechLattice, a: NodeRef, b: NodeRef) -> tuple[WealthVector, float]:
    return lattice.chain_cost(a, b)


def neighborhood_norm(lattice: TechLattice, node: NodeRef) -> float:
    return lattice.neighborhood_norm(node)
