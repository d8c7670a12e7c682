"""Command line entry point: ``heliosim {sim,mission,depletion,net-stats}``.

Exit codes: 0 on success, 2 for bad arguments or invalid inputs, 1 when a
run fails for any other reason (for example an unwritable output path).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import jsonschema

from . import astro
from .network import build_network, degree_stats, percolation_split
from .sim import SimConfig, Simulation, write_outputs
from .wealth import WealthVector


class UsageError(Exception):
    """Invalid user input; reported on stderr with exit code 2."""


def _line(label: str, value: float) -> str:
    return f"{label:<8}{value!r:>26}  {value:.4f}"


# ---- sim --------------------------------------------------------------------
def cmd_sim(args) -> int:
    path = Path(args.config)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise UsageError(f"config file not found: {path}") from None
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    try:
        cfg = SimConfig.from_dict(data).with_overrides(seed=args.seed, rounds=args.rounds)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise UsageError(f"config {path} fails schema at {where}: {exc.message}") from None
    except (TypeError, ValueError) as exc:
        raise UsageError(f"invalid config {path}: {exc}") from None
    history = Simulation(cfg).run()
    files = write_outputs(history, args.out)
    for name, p in files.items():
        print(f"{name}: {p}")
    return 0


# ---- mission ----------------------------------------------------------------
_MISSION_FLAGS = {
    "e0": "e0", "grade": "grade", "eta1": "eta1", "eta2": "eta2", "dh": "enthalpy",
    "mass": "mass", "velocity": "velocity",
}


def _mission_profile(args) -> astro.MissionProfile:
    fields: dict = {}
    if args.profile:
        try:
            fields.update(json.loads(Path(args.profile).read_text(encoding="utf-8")))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read profile {args.profile}: {exc}") from None
    launch = args.launch if args.launch is not None else args.ul
    rendezvous = args.return_ if args.return_ is not None else args.ur
    if launch is not None:
        fields["launch"] = launch
    if rendezvous is not None:
        fields["rendezvous"] = rendezvous
    for flag, name in _MISSION_FLAGS.items():
        value = getattr(args, flag)
        if value is not None:
            fields[name] = value
    if args.price_earth is not None or args.price_helio is not None:
        earth, helio = fields.get("price_vector", (1.0, 1.0))
        fields["price_vector"] = (args.price_earth if args.price_earth is not None else earth,
                                  args.price_helio if args.price_helio is not None else helio)
    if args.quadratic:
        fields["quadratic"] = True
    if args.price_scaling:
        fields["price_scaling"] = True
    for name in ("launch", "rendezvous"):
        if name not in fields:
            raise UsageError(f"missing {name} transfer (use --{'launch/--ul' if name == 'launch' else 'return/--ur'})")
    if "price_vector" in fields:
        fields["price_vector"] = tuple(fields["price_vector"])
    try:
        profile = astro.MissionProfile(**fields)
        profile.u_launch, profile.u_rendezvous  # resolve named transfers now
    except TypeError as exc:
        raise UsageError(f"invalid mission profile: {exc}") from None
    except (ValueError, KeyError) as exc:
        raise UsageError(str(exc.args[0]) if exc.args else str(exc)) from None
    return profile


def mission_report(profile: astro.MissionProfile) -> dict:
    cost = astro.mission_cost(profile)
    gain = astro.mission_profit(profile)
    return {"F_t": cost.transport, "F_r": cost.refinement, "C": cost.total,
            "R": gain.revenue, "profit": gain.profit, "profile": profile.to_dict()}


def cmd_mission(args) -> int:
    report = mission_report(_mission_profile(args))
    for key in ("F_t", "F_r", "C", "R", "profit"):
        print(_line(key, report[key]))
    if args.json == "-":
        print(json.dumps(report))
    elif args.json:
        Path(args.json).write_text(json.dumps(report, indent=2), encoding="utf-8")
    return 0


# ---- depletion --------------------------------------------------------------
def cmd_depletion(args) -> int:
    if args.element is not None:
        try:
            ratio = astro.element_static_index(args.element)
        except KeyError as exc:
            raise UsageError(exc.args[0]) from None
    else:
        ratio = args.ratio
    try:
        years = astro.depletion_years(ratio, args.growth)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    print(f"{years:.0f}")
    print(_line("years", years))
    return 0


# ---- net-stats --------------------------------------------------------------
def cmd_net_stats(args) -> int:
    try:
        topo = build_network(args.n, args.ring_k, args.j, args.hub_links,
                             WealthVector(*args.edge_cost), seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    stats = degree_stats(topo, [args.potential] * topo.n, args.heterogeneity_reading)
    perc = percolation_split(topo, stats, args.phi_reading)
    report = {
        "n": topo.n, "edges": len(topo.edges), "hubs": list(topo.hubs),
        "weighted_mean_degree": stats.weighted_mean_degree,
        "heterogeneity": stats.heterogeneity,
        "phi": perc.phi if perc.phi == perc.phi and abs(perc.phi) != float("inf") else repr(perc.phi),
        "connected": perc.connected,
        "components": [list(c) for c in perc.components],
    }
    print(_line("meandeg", stats.weighted_mean_degree))
    print(_line("hetero", stats.heterogeneity))
    print(_line("phi", perc.phi))
    print(f"{'flag':<8}{perc.connected:>26}")
    print(f"{'parts':<8}{len(perc.components):>26}")
    if args.edges:
        Path(args.edges).write_text(topo.to_csv(), encoding="utf-8")
    if args.json:
        print(json.dumps(report))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="heliosim", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sim", help="run a simulation from a JSON config")
    s.add_argument("--config", required=True, help="JSON config file")
    s.add_argument("--seed", type=int, help="override the config seed")
    s.add_argument("--rounds", type=int, help="override the number of rounds")
    s.add_argument("--out", required=True, help="output directory")
    s.set_defaults(func=cmd_sim)

    m = sub.add_parser("mission", help="mission cost, revenue and profit")
    m.add_argument("--profile", help="JSON mission profile; flags override its fields")
    m.add_argument("--ul", type=float, help="launch energy (delta-v units)")
    m.add_argument("--ur", type=float, help="rendezvous energy (delta-v units)")
    m.add_argument("--launch", help="named launch transfer from the delta-v table")
    m.add_argument("--return", dest="return_", help="named rendezvous/return transfer")
    m.add_argument("--e0", type=float, help="beneficiation energy")
    m.add_argument("--grade", type=float, help="ore grade in (0, 1]")
    m.add_argument("--eta1", type=float, help="beneficiation efficiency in (0, 1]")
    m.add_argument("--eta2", type=float, help="refining efficiency in (0, 1]")
    m.add_argument("--dh", type=float, help="refining enthalpy")
    m.add_argument("--mass", type=float, help="ore mass")
    m.add_argument("--velocity", type=float, help="currency velocity")
    m.add_argument("--price-earth", type=float, help="Earth price")
    m.add_argument("--price-helio", type=float, help="heliospheric price")
    m.add_argument("--quadratic", action="store_true", help="convert delta-v to 0.5*dv^2")
    m.add_argument("--price-scaling", action="store_true", help="scale revenue by the price differential")
    m.add_argument("--json", nargs="?", const="-", help="also emit a JSON report (to a file, or stdout)")
    m.set_defaults(func=cmd_mission)

    d = sub.add_parser("depletion", help="years until a resource runs out")
    src = d.add_mutually_exclusive_group(required=True)
    src.add_argument("--ratio", type=float, help="static reserve index (years at current use)")
    src.add_argument("--element", help="element name from the bundled table")
    d.add_argument("--growth", type=float, required=True, help="annual consumption growth, e.g. 0.02")
    d.set_defaults(func=cmd_depletion)

    n = sub.add_parser("net-stats", help="build a network and report degree statistics")
    n.add_argument("--n", type=int, default=20)
    n.add_argument("--ring-k", type=int, default=2)
    n.add_argument("--j", type=int, default=3)
    n.add_argument("--hub-links", type=int, default=3)
    n.add_argument("--edge-cost", type=float, nargs=4, default=(1.0, 2.0, 0.0, 0.0),
                   metavar=("KR", "LR", "KS", "LS"))
    n.add_argument("--seed", type=int, default=0)
    n.add_argument("--potential", type=float, default=1.0, help="potential given to every agent")
    n.add_argument("--heterogeneity-reading", choices=("magnitude", "multiplicity"), default="magnitude")
    n.add_argument("--phi-reading", choices=("paren", "power"), default="paren")
    n.add_argument("--edges", help="write the edge list CSV here")
    n.add_argument("--json", action="store_true", help="also print a JSON report")
    n.set_defaults(func=cmd_net_stats)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"heliosim {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"heliosim {args.command}: failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
