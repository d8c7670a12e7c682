"""Agent-based simulation of a technology-driven space economy."""

from .agents import AgentState, GrowthVectors, compute_metrics, agent_inner, grow_step
from .astro import (MissionProfile, delta_v, delta_v_table, depletion_years, growth_stats,
                    mission_cost, mission_profit)
from .errors import IndeterminateError, InvariantViolation, NotFoundError
from .game import Decision, StrategyWeights, ess_check, learn_update, pair_payoff, play_round, strategy_of
from .lattice import LatticeCosts, TechLattice, TechSet, build_lattice, down_set, join, meet, symdiff
from .macro import MacroParams, MacroState, classify_phase, gdp_of, macro_update, trajectory_metrics
from .network import NetworkTopology, build_network, degree_stats, percolation_split
from .sim import VERSION as __version__
from .sim import SimConfig, SimHistory, Simulation, run
from .wealth import BasisScale, WealthVector

__all__ = [
    "AgentState", "GrowthVectors", "compute_metrics", "agent_inner", "grow_step",
    "MissionProfile", "delta_v", "delta_v_table", "depletion_years", "growth_stats", "mission_cost",
    "mission_profit", "IndeterminateError", "InvariantViolation", "NotFoundError",
    "Decision", "StrategyWeights", "ess_check", "learn_update", "pair_payoff", "play_round", "strategy_of",
    "LatticeCosts", "TechLattice", "TechSet", "build_lattice", "down_set", "join", "meet", "symdiff",
    "MacroParams", "MacroState", "classify_phase", "gdp_of", "macro_update", "trajectory_metrics",
    "NetworkTopology", "build_network", "degree_stats", "percolation_split",
    "SimConfig", "SimHistory", "Simulation", "run", "BasisScale", "WealthVector", "__version__",
]
