"""Multi-machine frequency-event simulator with known ground-truth COI.

Physics: classical coupled swing equations with linearized synchronizing
torques, fixed-step RK4, no governor or load response. Units are concrete
rather than per-unit: damping in MW per Hz of deviation, coupling stiffness
in MW per radian of angle difference. The coupling matrix is symmetric, so
the synchronizing terms cancel in the inertia-weighted sum and the true COI
ramps at -deltaP * f_N / (2 * sum(H_i * Cap_i)) while individual machines
oscillate around it.

The integration kernel backend (compiled or pure numpy) is selected in
``coifreq.sim``; simulate() is deterministic given the scenario (seed
included) for a fixed backend.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from ..errors import InstabilityError, ScenarioError
from ..ingest import MeasurementSet
from . import kernel


@dataclass
class Machine:
    h: float  # inertia constant, s
    cap: float  # rated capacity, MVA
    damping: float = 0.0  # MW per Hz of frequency deviation

    @property
    def inertia_mws(self):
        return self.h * self.cap


@dataclass
class TripSpec:
    """Generation/load imbalance step: ``delta_p_mw`` is the MW of generation
    lost (positive means under-frequency). ``machine_index`` applies the loss
    at one machine; ``machine_index=None`` spreads it across all machines in
    proportion to inertia (a system-wide load step)."""

    delta_p_mw: float
    time_s: float
    machine_index: int = None


@dataclass
class Sensor:
    machine: int
    noise_std: float = 0.0005  # Hz


@dataclass
class SimScenario:
    machines: list
    coupling: np.ndarray  # symmetric, MW/rad
    trip: TripSpec
    duration_s: float
    dt_sim: float
    sensors: list
    report_rate_hz: float = 10.0
    seed: int = 0
    f_nominal_hz: float = 60.0
    name: str = ""

    def validate(self):
        n = len(self.machines)
        if n < 1:
            raise ScenarioError("need at least one machine")
        for i, mach in enumerate(self.machines):
            if mach.h <= 0 or mach.cap <= 0:
                raise ScenarioError(f"machine {i}: H and Cap must be positive")
        k = np.asarray(self.coupling, dtype=float)
        if k.shape != (n, n):
            raise ScenarioError(f"coupling must be {n}x{n}, got {k.shape}")
        if not np.allclose(k, k.T):
            raise ScenarioError("coupling matrix must be symmetric")
        off = k - np.diag(np.diag(k))
        if np.any(off < 0):
            raise ScenarioError("coupling off-diagonals must be nonnegative")
        if self.dt_sim <= 0 or self.duration_s <= 0:
            raise ScenarioError("dt_sim and duration_s must be positive")
        dt_report = 1.0 / self.report_rate_hz
        if self.dt_sim > dt_report / 5 + 1e-12:
            raise ScenarioError(
                f"dt_sim={self.dt_sim} must be <= dt_report/5 = {dt_report / 5}"
            )
        if not (0 <= self.trip.time_s < self.duration_s):
            raise ScenarioError(
                f"trip time {self.trip.time_s} outside [0, {self.duration_s})"
            )
        if self.trip.machine_index is not None and not (
            0 <= self.trip.machine_index < n
        ):
            raise ScenarioError(f"trip machine_index {self.trip.machine_index} out of range")
        if not self.sensors:
            raise ScenarioError("need at least one sensor")
        for s in self.sensors:
            if not (0 <= s.machine < n):
                raise ScenarioError(f"sensor observes unknown machine {s.machine}")

    def inertias_mws(self):
        return np.array([m.inertia_mws for m in self.machines])

    def system_inertia_mws(self):
        return float(self.inertias_mws().sum())

    def to_json_dict(self):
        return {
            "name": self.name,
            "machines": [
                {"h": m.h, "cap": m.cap, "damping": m.damping} for m in self.machines
            ],
            "coupling": np.asarray(self.coupling, dtype=float).tolist(),
            "trip": {
                "delta_p_mw": self.trip.delta_p_mw,
                "time_s": self.trip.time_s,
                "machine_index": self.trip.machine_index,
            },
            "duration_s": self.duration_s,
            "dt_sim": self.dt_sim,
            "sensors": [
                {"machine": s.machine, "noise_std": s.noise_std} for s in self.sensors
            ],
            "report_rate_hz": self.report_rate_hz,
            "seed": self.seed,
            "f_nominal_hz": self.f_nominal_hz,
        }

    @classmethod
    def from_json_dict(cls, data):
        try:
            trip_raw = dict(data["trip"])
            scenario = cls(
                name=data.get("name", ""),
                machines=[Machine(**m) for m in data["machines"]],
                coupling=np.asarray(data["coupling"], dtype=float),
                trip=TripSpec(
                    delta_p_mw=float(trip_raw["delta_p_mw"]),
                    time_s=float(trip_raw["time_s"]),
                    machine_index=trip_raw.get("machine_index"),
                ),
                duration_s=float(data["duration_s"]),
                dt_sim=float(data["dt_sim"]),
                sensors=[Sensor(**s) for s in data["sensors"]],
                report_rate_hz=float(data.get("report_rate_hz", 10.0)),
                seed=int(data.get("seed", 0)),
                f_nominal_hz=float(data.get("f_nominal_hz", 60.0)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ScenarioError(f"bad scenario JSON: {exc}")
        scenario.validate()
        return scenario


@dataclass
class SimResult:
    t_sim: np.ndarray  # simulation-step time grid, s
    rotor_speeds: np.ndarray  # n_machines x len(t_sim), Hz
    measurements: MeasurementSet  # sensor view at reporting rate, noisy
    true_coi: np.ndarray  # inertia-weighted COI on t_sim, Hz
    report_times: np.ndarray
    true_coi_report: np.ndarray  # true COI sampled at reporting instants
    true_rocof_initial: float  # Hz/s, realized COI slope after the trip
    scenario_echo: SimScenario = None


def true_coi(rotor_speeds, inertias):
    """Pointwise inertia-weighted mean of machine speed series."""
    speeds = np.asarray(rotor_speeds, dtype=float)
    weights = np.asarray(inertias, dtype=float)
    if speeds.shape[0] != len(weights):
        raise ScenarioError(
            f"{speeds.shape[0]} speed series but {len(weights)} inertias"
        )
    total = weights.sum()
    if total <= 0:
        raise ScenarioError("total inertia must be positive")
    return weights @ speeds / total


def _injections(scenario):
    """Post-trip constant MW injection vector (pre-trip is all zeros)."""
    n = len(scenario.machines)
    p = np.zeros(n)
    if scenario.trip.machine_index is None:
        shares = scenario.inertias_mws() / scenario.system_inertia_mws()
        p -= scenario.trip.delta_p_mw * shares
    else:
        p[scenario.trip.machine_index] -= scenario.trip.delta_p_mw
    return p


def simulate(scenario):
    """Integrate the scenario and assemble the sensor view plus ground truth.

    Deterministic given the scenario, including its seed.
    """
    scenario.validate()
    n = len(scenario.machines)
    f_nom = scenario.f_nominal_hz
    m_coef = 2.0 * scenario.inertias_mws() / f_nom  # MW per (Hz/s)
    d_coef = np.array([m.damping for m in scenario.machines])
    coupling = np.asarray(scenario.coupling, dtype=float)

    dt = scenario.dt_sim
    n_total = int(round(scenario.duration_s / dt))
    n_pre = int(round(scenario.trip.time_s / dt))
    p_post = _injections(scenario)

    df0 = np.zeros(n)
    delta0 = np.zeros(n)
    hist_pre, delta_mid, fail = kernel.integrate_swing(
        df0, delta0, np.zeros(n), m_coef, d_coef, coupling, dt, n_pre
    )
    if fail >= 0:
        raise InstabilityError(
            f"|df| exceeded {kernel.INSTABILITY_HZ} Hz at step {fail}", step=fail
        )
    hist_post, _, fail = kernel.integrate_swing(
        hist_pre[-1], delta_mid, p_post, m_coef, d_coef, coupling, dt, n_total - n_pre
    )
    if fail >= 0:
        raise InstabilityError(
            f"|df| exceeded {kernel.INSTABILITY_HZ} Hz at step {n_pre + fail}",
            step=n_pre + fail,
        )

    df_hist = np.vstack([hist_pre, hist_post[1:]])  # (n_total+1, n)
    t_sim = dt * np.arange(n_total + 1)
    rotor_speeds = f_nom + df_hist.T
    inertias = scenario.inertias_mws()
    coi = true_coi(rotor_speeds, inertias)

    # sensor view at the reporting rate
    dt_report = 1.0 / scenario.report_rate_hz
    stride = int(round(dt_report / dt))
    if abs(stride * dt - dt_report) > 1e-9:
        raise ScenarioError(
            f"dt_sim={dt} does not divide the reporting interval {dt_report}"
        )
    report_idx = np.arange(0, n_total + 1, stride)
    report_times = t_sim[report_idx]

    rng = np.random.default_rng(scenario.seed)
    frames = []
    for sensor in scenario.sensors:
        clean = rotor_speeds[sensor.machine, report_idx]
        noise = rng.standard_normal(len(report_idx)) * sensor.noise_std
        frames.append(clean + noise)
    frame = np.vstack(frames)
    measurements = MeasurementSet(
        channel_ids=[f"s{j:02d}_m{s.machine}" for j, s in enumerate(scenario.sensors)],
        t0_epoch=0.0,
        dt=dt_report,
        frame=frame,
        quality_mask=np.ones_like(frame, dtype=bool),
    )

    # realized COI slope over the first reporting interval after the trip
    i_trip = int(round(scenario.trip.time_s / dt))
    i_next = min(i_trip + stride, n_total)
    rocof0 = (coi[i_next] - coi[i_trip]) / (t_sim[i_next] - t_sim[i_trip])

    return SimResult(
        t_sim=t_sim,
        rotor_speeds=rotor_speeds,
        measurements=measurements,
        true_coi=coi,
        report_times=report_times,
        true_coi_report=coi[report_idx],
        true_rocof_initial=float(rocof0),
        scenario_echo=replace(scenario),
    )
