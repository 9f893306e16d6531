"""Relaxed overdetermined least-squares estimation of the center-of-inertia
frequency from multi-location measurements.

The fit stacks K constant-RoCoF rows (each instant's weighted frequency must
equal a straight line f0 + k*df) with N+1 soft rows pulling the channel
weights toward sum 1 and toward 1/N each, both scaled by the relaxation
weight omega. The solve uses a QR-based least-squares routine; the explicit
normal-equation form is kept for tests as a correctness oracle only, since
forming A^T A squares the condition number.

Sign conventions: ``rocof_fit`` is the signed physical df/dt (negative for a
generation trip). ``rocof_nerc`` is the 0.5 s convention, (f(t0) -
f(t0+0.5))/0.5, positive for a decline; the two carry opposite signs for the
same event.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateWeightsError,
    SingularSystemError,
    UnderdeterminedError,
    WindowInvalidError,
    WindowRangeError,
)
from .event_detect import _median_series


@dataclass
class SolverConfig:
    omega: float = 30.0
    min_condition_warn: float = 1e8

    def __post_init__(self):
        if self.omega <= 0:
            raise ValueError("omega must be positive")


@dataclass
class WeightSolution:
    weights: np.ndarray
    delta_f: float  # Hz per sample, negative for a generation trip
    f0_fit: float
    residual_norm: float
    weight_sum: float
    condition_estimate: float
    flags: list = field(default_factory=list)

    def to_json_dict(self):
        return {
            "weights": [float(w) for w in self.weights],
            "delta_f": self.delta_f,
            "f0_fit": self.f0_fit,
            "residual_norm": self.residual_norm,
            "weight_sum": self.weight_sum,
            "condition_estimate": self.condition_estimate,
            "flags": list(self.flags),
        }


@dataclass
class CoiEstimate:
    timestamps: np.ndarray
    f_coi: np.ndarray
    rocof_fit: float = None  # Hz/s, signed df/dt
    rocof_nerc: float = None  # Hz/s, positive for a decline
    method: str = "proposed"

    def to_json_dict(self):
        return {
            "method": self.method,
            "rocof_fit": self.rocof_fit,
            "rocof_nerc": self.rocof_nerc,
            "series": [[float(t), float(f)] for t, f in zip(self.timestamps, self.f_coi)],
        }


def _window_sample_indices(mset, window):
    """Grid indices of the window's fit samples t0 + k*dt, k = 1..K."""
    k = np.arange(1, window.k_samples + 1)
    idx = np.rint((window.t0 + k * window.dt - mset.t0_epoch) / mset.dt).astype(int)
    if idx[0] < 0 or idx[-1] >= mset.n_samples:
        raise WindowRangeError(
            f"fit window samples [{idx[0]}, {idx[-1]}] outside frame of "
            f"{mset.n_samples} samples"
        )
    return idx


def build_system(mset, window, cfg=None):
    """Assemble the (K+1+N) x (N+2) design matrix and right-hand side.

    Row k (1-based): [f_1[T_k], ..., f_N[T_k], -k, -1] = 0, the constant-
    RoCoF constraint. Row K+1: omega * (sum of weights) = omega. Rows
    K+2..K+1+N: omega * x_i = omega / N.
    """
    cfg = cfg or SolverConfig()
    n = mset.n_channels
    k_samples = window.k_samples
    if k_samples <= n + 1:
        raise UnderdeterminedError(
            f"need K > N + 1 fit samples, got K={k_samples}, N={n}"
        )
    idx = _window_sample_indices(mset, window)
    for col, m in enumerate(idx):
        bad = np.flatnonzero(~mset.quality_mask[:, m])
        if len(bad):
            raise WindowInvalidError(
                f"masked cell in fit window: channel "
                f"{mset.channel_ids[bad[0]]} at sample {m}",
                channel=mset.channel_ids[bad[0]],
                sample=int(m),
                window_position=col + 1,
            )

    w = cfg.omega
    rows = k_samples + 1 + n
    a = np.zeros((rows, n + 2))
    b = np.zeros(rows)
    a[:k_samples, :n] = mset.frame[:, idx].T
    a[:k_samples, n] = -np.arange(1, k_samples + 1)
    a[:k_samples, n + 1] = -1.0
    a[k_samples, :n] = w
    b[k_samples] = w
    a[k_samples + 1 :, :n] = w * np.eye(n)
    b[k_samples + 1 :] = w / n
    return a, b


def solve_weights(a, b, cfg=None):
    """Least-squares solve of the stacked system via orthogonal factorization.

    The result agrees with the normal-equation closed form on
    well-conditioned systems but stays stable when the frequency columns are
    nearly collinear. Negative weights are allowed but flagged.
    """
    cfg = cfg or SolverConfig()
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n = a.shape[1] - 2
    cond = float(np.linalg.cond(a))
    # column equilibration: same least-squares solution, better conditioning
    col_norms = np.linalg.norm(a, axis=0)
    scale = 1.0 / np.where(col_norms > 0, col_norms, 1.0)
    y, _, rank, _ = np.linalg.lstsq(a * scale, b, rcond=None)
    x = scale * y
    if rank < a.shape[1]:
        raise SingularSystemError(
            f"design matrix rank {rank} < {a.shape[1]}", condition_estimate=cond
        )
    flags = []
    if np.any(x[:n] < 0):
        flags.append("negative_weights")
    if cond > cfg.min_condition_warn:
        flags.append("ill_conditioned")
    return WeightSolution(
        weights=x[:n],
        delta_f=float(x[n]),
        f0_fit=float(x[n + 1]),
        residual_norm=float(np.linalg.norm(a @ x - b)),
        weight_sum=float(x[:n].sum()),
        condition_estimate=cond,
        flags=flags,
    )


def normal_equation_solution(a, b):
    """Closed-form (A^T A)^-1 A^T b. Test oracle only; numerically inferior
    to solve_weights on ill-conditioned systems."""
    a = np.asarray(a, dtype=float)
    return np.linalg.solve(a.T @ a, a.T @ np.asarray(b, dtype=float))


def coi_series(mset, weights):
    """Weighted frequency series over the full record, normalized by the
    weight sum; instants with masked cells renormalize over live channels."""
    weights = np.asarray(weights, dtype=float)
    if len(weights) != mset.n_channels:
        raise DegenerateWeightsError(
            f"{len(weights)} weights for {mset.n_channels} channels"
        )
    total = weights.sum()
    if total == 0:
        raise DegenerateWeightsError("weight sum is zero")
    live = mset.quality_mask
    num = np.einsum("n,nm->m", weights, np.where(live, mset.frame, 0.0))
    den = np.einsum("n,nm->m", weights, live.astype(float))
    with np.errstate(invalid="ignore", divide="ignore"):
        f_coi = np.where(den != 0, num / den, np.nan)
    return CoiEstimate(timestamps=mset.timestamps, f_coi=f_coi, method="proposed")


def rocof_fit(solution, dt):
    """Signed fitted RoCoF: per-sample frequency step over the sample interval."""
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    return solution.delta_f / dt


def rocof_nerc_detail(estimate, window):
    """NERC 0.5 s RoCoF with the actual (nearest-sample) lookup times.

    Positive for a frequency decline, i.e. opposite in sign to rocof_fit
    for the same event.
    """
    t = estimate.timestamps
    if len(t) < 2:
        raise WindowRangeError("series too short for 0.5 s lookup")
    dt = t[1] - t[0]
    i0 = int(np.rint((window.t0 - t[0]) / dt))
    i5 = int(np.rint((window.t0 + 0.5 - t[0]) / dt))
    if i0 < 0 or i5 >= len(t):
        raise WindowRangeError(
            f"t0 + 0.5 s = {window.t0 + 0.5} outside series ending {t[-1]}"
        )
    value = (estimate.f_coi[i0] - estimate.f_coi[i5]) / 0.5
    return {
        "rocof_nerc": float(value),
        "t_lookup_start": float(t[i0]),
        "t_lookup_end": float(t[i5]),
    }


def rocof_nerc(estimate, window):
    return rocof_nerc_detail(estimate, window)["rocof_nerc"]


def median_baseline(mset, window):
    """Comparison method: cross-channel median as the system frequency, with
    RoCoF from an unweighted line fit over the window samples."""
    med = _median_series(mset)
    idx = _window_sample_indices(mset, window)
    if np.any(~np.isfinite(med[idx])):
        m = int(idx[np.flatnonzero(~np.isfinite(med[idx]))[0]])
        raise WindowInvalidError(f"all channels masked at sample {m}", sample=m)
    t_win = mset.timestamps[idx]
    slope, _ = np.polyfit(t_win, med[idx], 1)
    est = CoiEstimate(
        timestamps=mset.timestamps,
        f_coi=med,
        rocof_fit=float(slope),
        method="median",
    )
    est.rocof_nerc = rocof_nerc(est, window)
    return est


def estimate_proposed(mset, window, cfg=None):
    """Full proposed-method pass: build, solve, weight, and annotate RoCoF.

    Returns (WeightSolution, CoiEstimate).
    """
    cfg = cfg or SolverConfig()
    a, b = build_system(mset, window, cfg)
    sol = solve_weights(a, b, cfg)
    est = coi_series(mset, sol.weights)
    est.rocof_fit = rocof_fit(sol, window.dt)
    est.rocof_nerc = rocof_nerc(est, window)
    return sol, est
