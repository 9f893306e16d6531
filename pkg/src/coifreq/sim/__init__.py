"""Swing-equation oracle simulator: synthetic frequency events with known
ground-truth COI."""

from .core import (
    Machine,
    Sensor,
    SimResult,
    SimScenario,
    TripSpec,
    simulate,
    true_coi,
)
from .kernel import BACKEND_NAME
from .presets import get_preset, scenario_presets

__all__ = [
    "BACKEND_NAME",
    "Machine",
    "Sensor",
    "SimResult",
    "SimScenario",
    "TripSpec",
    "get_preset",
    "scenario_presets",
    "simulate",
    "true_coi",
]
