"""System inertia bookkeeping and event-MW estimation.

System inertia is the sum of H * Cap over committed units, in MW*s. The
event imbalance inverts the swing-aggregate relation: P = 2 I / f_N * RoCoF,
with RoCoF the magnitude of the physical frequency decline. Governor and
load-damping response are deliberately ignored; the estimate is only valid
for the first post-event second.
"""

import csv
import io
from dataclasses import dataclass

from .errors import DataError, EmptyFleetError, FormatError


@dataclass
class GenerationUnit:
    unit_id: str
    h: float  # inertia constant, seconds
    cap: float  # rated capacity, MVA
    committed: bool

    def __post_init__(self):
        if self.h <= 0 or self.cap <= 0:
            raise DataError(
                f"unit {self.unit_id}: H and Cap must be positive "
                f"(H={self.h}, Cap={self.cap})"
            )


@dataclass
class InertiaTable:
    units: list

    def committed_units(self):
        return [u for u in self.units if u.committed]


@dataclass
class EventMagnitude:
    p_event_mw: float
    i_sys_mws: float
    rocof_used_hz_s: float
    f_nominal_hz: float

    def to_json_dict(self):
        return {
            "p_event_mw": self.p_event_mw,
            "i_sys_mws": self.i_sys_mws,
            "rocof_used_hz_s": self.rocof_used_hz_s,
            "f_nominal_hz": self.f_nominal_hz,
        }


_TRUTHY = {"1", "true", "True", "TRUE"}
_FALSY = {"0", "false", "False", "FALSE"}


def parse_inertia_csv(source):
    """Read an InertiaTable from CSV with header unit_id,h_s,cap_mva,committed."""
    if isinstance(source, bytes):
        text = source.decode("utf-8")
    elif hasattr(source, "read"):
        raw = source.read()
        text = raw.decode("utf-8") if isinstance(raw, bytes) else raw
    elif "\n" in source:
        text = source
    else:
        with open(source, "r", encoding="utf-8") as fh:
            text = fh.read()

    reader = csv.DictReader(io.StringIO(text))
    expected = ["unit_id", "h_s", "cap_mva", "committed"]
    if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != expected:
        raise FormatError(
            f"inertia CSV header must be {','.join(expected)}, got {reader.fieldnames}"
        )
    units = []
    for row_no, row in enumerate(reader, start=1):
        committed_raw = row["committed"].strip()
        if committed_raw in _TRUTHY:
            committed = True
        elif committed_raw in _FALSY:
            committed = False
        else:
            raise DataError(f"row {row_no}: bad committed flag {committed_raw!r}")
        try:
            units.append(
                GenerationUnit(
                    unit_id=row["unit_id"].strip(),
                    h=float(row["h_s"]),
                    cap=float(row["cap_mva"]),
                    committed=committed,
                )
            )
        except ValueError as exc:
            raise DataError(f"row {row_no}: {exc}")
    return InertiaTable(units=units)


def system_inertia(table):
    """Total inertia over committed units: sum of H_i * Cap_i, in MW*s."""
    committed = table.committed_units()
    if not committed:
        raise EmptyFleetError("no committed units in inertia table")
    return float(sum(u.h * u.cap for u in committed))


def estimate_event_mw(i_sys, rocof, f_nominal=60.0):
    """Invert the aggregate swing relation to the MW imbalance.

    ``rocof`` is the magnitude of the physical decline in Hz/s; for a
    generation trip the result is the MW lost.
    """
    if f_nominal <= 0:
        raise ValueError(f"f_nominal must be positive, got {f_nominal}")
    p = 2.0 * i_sys / f_nominal * rocof
    return EventMagnitude(
        p_event_mw=float(p),
        i_sys_mws=float(i_sys),
        rocof_used_hz_s=float(rocof),
        f_nominal_hz=float(f_nominal),
    )
