"""Event-onset detection: locate the start time and start frequency that
anchor the post-event fitting window.

The detector watches the cross-channel median frequency and declares an
event at the earliest sample whose one-sample difference quotient exceeds
the RoCoF threshold in magnitude for a configurable number of consecutive
samples. The median is robust to a single misbehaving sensor.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import NoEventError, TruncatedWindowError, WindowRangeError


@dataclass
class DetectorConfig:
    rocof_threshold: float = 0.005  # Hz/s
    confirm_samples: int = 3
    window_seconds: float = 1.0

    def __post_init__(self):
        if self.rocof_threshold <= 0:
            raise ValueError("rocof_threshold must be positive")
        if self.confirm_samples < 1:
            raise ValueError("confirm_samples must be >= 1")


@dataclass
class EventWindow:
    """Fit-window anchor: event start t0, start frequency f0, and the K
    post-event samples t0 + dt, ..., t0 + K*dt used for fitting."""

    t0: float
    f0: float
    k_samples: int
    dt: float

    def __post_init__(self):
        if self.k_samples < 2:
            raise WindowRangeError(f"k_samples must be >= 2, got {self.k_samples}")

    def sample_times(self):
        return self.t0 + self.dt * np.arange(1, self.k_samples + 1)

    def to_json_dict(self):
        return {
            "t0": self.t0,
            "f0": self.f0,
            "k_samples": self.k_samples,
            "dt": self.dt,
        }


def _median_series(mset):
    """Cross-channel median over unmasked cells, NaN where all masked."""
    frame = np.where(mset.quality_mask, mset.frame, np.nan)
    with np.errstate(all="ignore"), warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return np.nanmedian(frame, axis=0)


def detect_event(mset, cfg=None):
    """Scan for the earliest confirmed RoCoF-threshold crossing.

    Returns an EventWindow anchored at the crossing sample with
    K = floor(window_seconds / dt) post-event samples. Raises NoEventError
    when nothing crosses the threshold and TruncatedWindowError (carrying
    the largest feasible K) when the window would run past the data.
    """
    cfg = cfg or DetectorConfig()
    if mset.n_samples < 2 * cfg.confirm_samples:
        raise NoEventError(
            f"need at least {2 * cfg.confirm_samples} samples, have {mset.n_samples}"
        )

    med = _median_series(mset)
    quotients = np.diff(med) / mset.dt
    exceeds = np.abs(quotients) > cfg.rocof_threshold
    exceeds &= np.isfinite(quotients)

    onset = None
    for m in range(len(exceeds) - cfg.confirm_samples + 1):
        if exceeds[m : m + cfg.confirm_samples].all():
            onset = m
            break
    if onset is None:
        raise NoEventError(
            "no confirmed RoCoF threshold crossing",
            threshold=cfg.rocof_threshold,
            confirm_samples=cfg.confirm_samples,
        )

    t0 = float(mset.t0_epoch + onset * mset.dt)
    f0 = float(med[onset])
    k = int(np.floor(cfg.window_seconds / mset.dt + 1e-9))
    max_feasible = mset.n_samples - 1 - onset
    if k > max_feasible:
        raise TruncatedWindowError(
            f"fit window of {k} samples exceeds data range after t0={t0}",
            max_feasible_k=int(max_feasible),
        )
    return EventWindow(t0=t0, f0=f0, k_samples=k, dt=mset.dt)


def manual_window(t0, f0, k_samples, mset):
    """Build an EventWindow from operator-supplied anchors, validated against
    the set's timebase."""
    t_start = mset.t0_epoch
    t_end = mset.t0_epoch + (mset.n_samples - 1) * mset.dt
    eps = 1e-9 * max(1.0, abs(t_end))
    if t0 < t_start - eps or t0 > t_end + eps:
        raise WindowRangeError(
            f"t0={t0} outside data range [{t_start}, {t_end}]"
        )
    t_last = t0 + k_samples * mset.dt
    if t_last > t_end + eps:
        raise WindowRangeError(
            f"window end {t_last} past data end {t_end}", k_samples=k_samples
        )
    return EventWindow(t0=float(t0), f0=float(f0), k_samples=int(k_samples), dt=mset.dt)
