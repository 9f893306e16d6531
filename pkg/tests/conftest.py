import numpy as np
import pytest

from coifreq.event_detect import EventWindow
from coifreq.ingest import MeasurementSet


def make_mset(frame, dt=0.1, t0=0.0, mask=None):
    frame = np.atleast_2d(np.asarray(frame, dtype=float))
    if mask is None:
        mask = np.ones_like(frame, dtype=bool)
    return MeasurementSet(
        channel_ids=[f"ch{n}" for n in range(frame.shape[0])],
        t0_epoch=t0,
        dt=dt,
        frame=frame,
        quality_mask=np.asarray(mask, dtype=bool),
    )


def make_window(k_samples, dt=0.1, t0=0.0, f0=60.0):
    return EventWindow(t0=t0, f0=f0, k_samples=k_samples, dt=dt)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
