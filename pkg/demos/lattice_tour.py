"""A walk through the technology lattice.

Builds small lattices, looks at down-sets and the ring operations, and
shows where the re-closed symmetric difference stops being distributive.

    python demos/lattice_tour.py
"""

import math

from heliosim.lattice import Kind, build_lattice, down_set, meet, symdiff

# %% Sizes and composition
for levels in (1, 2, 3):
    lat = build_lattice(levels)
    print(f"{levels} level(s): {lat.n} nodes, {len(lat.edges)} edges")

lat = build_lattice(3)
kinds = [lat.kind_of(i) for i in lat.level_nodes(2)]
print("level 2 composition:", {k.value: kinds.count(k) for k in (Kind.INNOVATIVE, Kind.BASE, Kind.PERIPHERAL)})

# %% Unit distance grows by sqrt 2 per level
for h in range(1, 4):
    print(f"u_{h} = {lat.unit_distance(h):.6f}  (sqrt5 * sqrt2^{h - 1} = {math.sqrt(5) * math.sqrt(2) ** (h - 1):.6f})")

# %% Down-sets: everything a technology depends on
top = lat.node(3, 0)
print(f"down-set of the level-3 innovative node has {len(down_set(lat, top))} members")

# %% Ring operations on one level behave
one = build_lattice(1)
a, b = one.node(1, 1), one.node(1, 2)
print("symdiff:", symdiff(one, a, b).ids(), " meet:", meet(one, a, b).ids())

# %% ...but across levels re-closing a symmetric difference breaks distributivity
two = build_lattice(2)
x = down_set(two, two.node(1, 0))
z = down_set(two, two.node(2, 0))
lhs = meet(two, x, symdiff(two, x, z))
rhs = symdiff(two, meet(two, x, x), meet(two, x, z))
print("x ^ (x + z) =", lhs.ids(), " vs  (x ^ x) + (x ^ z) =", rhs.ids())

# %% Chain costs follow the cheapest route
vec, scalar = lat.chain_cost(lat.node(1, 3), lat.node(3, 7))
print(f"chain cost level-1 -> level-3: scalar {scalar:.4f}, vector {vec}")
