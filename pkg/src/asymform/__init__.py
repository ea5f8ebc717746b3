"""Asynchronous formation of asymmetric patterns by oblivious robots."""

from .agreement import PatternSpec, agreement_coordinate_system, agreement_pattern
from .canon import Configuration, canonical_order, elect_leader, symmetry_report
from .motion import Decision, Milestone, ProtocolError, Snapshot, pattern_formation
from .sim import AdversaryConfig, Scenario, run

__all__ = [
    "AdversaryConfig", "Configuration", "Decision", "Milestone", "PatternSpec", "ProtocolError",
    "Scenario", "Snapshot", "agreement_coordinate_system", "agreement_pattern", "canonical_order",
    "elect_leader", "pattern_formation", "run", "symmetry_report",
]
