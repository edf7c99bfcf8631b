"""Trace-driven simulation of a two-path download under different policies."""

from .engine import SimReport, Simulation, run, schedule_packet
from .paths import PathModel, SimParams
from .policies import POLICIES, make_policy, policy_wifi_first
from .scenarios import (
    Scenario,
    load_mobility_trace,
    load_scenario,
    make_background_onoff_scenario,
    make_degraded_trace,
    make_mobility_scenario,
    make_mobility_trace,
    make_random_bw_scenario,
    make_static_scenario,
)

__all__ = [
    "POLICIES", "PathModel", "Scenario", "SimParams", "SimReport", "Simulation",
    "load_mobility_trace", "load_scenario", "make_background_onoff_scenario",
    "make_degraded_trace", "make_mobility_scenario", "make_mobility_trace",
    "make_policy", "make_random_bw_scenario", "make_static_scenario",
    "policy_wifi_first", "run", "schedule_packet",
]
