"""Canned scenarios reproducing the two qualitative event regimes: a trip at
the weakly-coupled low-inertia end of a chain (large inter-area oscillation,
sensors disagree strongly) and a trip in the strongly-coupled interior
(oscillation near the sensor noise floor), plus a fully symmetric control
case.

Documented trip magnitudes: edge_trip loses 1010 MW, central_trip loses
900 MW, uniform loses 800 MW spread system-wide. The chain presets share a
600,000 MW*s fleet; chain mode frequencies sit above 1 Hz so the 1 s fit
window sees full oscillation cycles.
"""

import numpy as np

from .core import Machine, Sensor, SimScenario, TripSpec


def _chain_coupling(n, stiffness):
    k = np.zeros((n, n))
    for i in range(n - 1):
        k[i, i + 1] = k[i + 1, i] = stiffness
    return k


def _ring_coupling(n, stiffness):
    k = _chain_coupling(n, stiffness)
    k[0, n - 1] = k[n - 1, 0] = stiffness
    return k


# heterogeneous chain fleet: inertias 240,000 / 210,000 / 150,000 MW*s
_CHAIN_MACHINES = [
    Machine(h=6.0, cap=40000.0),
    Machine(h=7.0, cap=30000.0),
    Machine(h=5.0, cap=30000.0),
]


def edge_trip():
    """1010 MW trip at the low-inertia end of a weakly coupled chain."""
    return SimScenario(
        name="edge_trip",
        machines=list(_CHAIN_MACHINES),
        coupling=_chain_coupling(3, 8.0e4),
        trip=TripSpec(delta_p_mw=1010.0, time_s=5.0, machine_index=2),
        duration_s=15.0,
        dt_sim=0.01,
        sensors=[Sensor(machine=i, noise_std=0.0001) for i in range(3)],
        report_rate_hz=10.0,
        seed=42,
    )


def central_trip():
    """900 MW trip in the strongly coupled middle of the same chain; two
    sensors per machine, oscillation amplitude near the noise floor."""
    return SimScenario(
        name="central_trip",
        machines=list(_CHAIN_MACHINES),
        coupling=_chain_coupling(3, 1.28e7),
        trip=TripSpec(delta_p_mw=900.0, time_s=5.0, machine_index=1),
        duration_s=15.0,
        dt_sim=0.001,
        sensors=[Sensor(machine=m, noise_std=0.0003) for m in (0, 0, 1, 1, 2, 2)],
        report_rate_hz=10.0,
        seed=42,
    )


def uniform():
    """800 MW system-wide loss on identical machines: every sensor sees the
    same trajectory, so the proposed and median methods must agree."""
    return SimScenario(
        name="uniform",
        machines=[Machine(h=5.0, cap=30000.0) for _ in range(4)],
        coupling=_ring_coupling(4, 5.0e4),
        trip=TripSpec(delta_p_mw=800.0, time_s=5.0, machine_index=None),
        duration_s=15.0,
        dt_sim=0.01,
        sensors=[Sensor(machine=i, noise_std=0.0) for i in range(4)],
        report_rate_hz=10.0,
        seed=7,
    )


def scenario_presets():
    """All named presets, in a stable order."""
    return [edge_trip(), central_trip(), uniform()]


def get_preset(name):
    for scenario in scenario_presets():
        if scenario.name == name:
            return scenario
    raise KeyError(name)
