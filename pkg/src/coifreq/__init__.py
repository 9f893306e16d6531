"""coifreq: center-of-inertia frequency, RoCoF, and event-magnitude
estimation from multi-location PMU frequency measurements."""

__version__ = "0.1.0"

from .coi import (
    CoiEstimate,
    SolverConfig,
    WeightSolution,
    build_system,
    coi_series,
    estimate_proposed,
    median_baseline,
    rocof_fit,
    rocof_nerc,
    solve_weights,
)
from .event_detect import DetectorConfig, EventWindow, detect_event, manual_window
from .ingest import (
    ChannelSeries,
    GapPolicy,
    MeasurementSet,
    align,
    emit_csv,
    parse_csv,
    quality_report,
)
from .magnitude import (
    EventMagnitude,
    InertiaTable,
    estimate_event_mw,
    parse_inertia_csv,
    system_inertia,
)
