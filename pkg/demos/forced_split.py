"""Splitting an economy in two.

Two clusters of five firms are joined by one hub shortcut.  At round 2 the
shortcut is cut; from then on each cluster plays its own game and keeps its
own prices, and the GDPs of the parts add up to the whole.

    python demos/forced_split.py
"""

from heliosim.network import NetEdge, NetworkTopology
from heliosim.sim import SimConfig, Simulation
from heliosim.wealth import WealthVector

cost = WealthVector(1.0, 2.0)
edges = [NetEdge(min(b + k, b + (k + 1) % 5), max(b + k, b + (k + 1) % 5), cost, "ring")
         for b in (0, 5) for k in range(5)]
edges.append(NetEdge(4, 5, cost, "hub"))
topo = NetworkTopology(tuple(range(10)), tuple(edges), 2, (4,), 1)

cfg = SimConfig(levels=2, n=10, j=0, hub_links=0, rounds=5, seed=11, force_split_round=2, percolation=False)
history = Simulation(cfg, topology=topo).run()

for rec in history.records:
    parts = ", ".join(f"{list(e.members)} gdp={e.gdp:.4g} rho={e.macro.rho:.3f}" for e in rec.economies)
    print(f"round {rec.round}: whole gdp={rec.gdp:.4g}; {parts}")
    for e in rec.economies:
        if e.split:
            print(f"    split into {[list(p) for p in e.partition]}")
