"""CSV ingestion and time alignment of multi-channel PMU frequency data.

Channels arrive as independently-timestamped series and leave as a
``MeasurementSet``: an N x M frame on a single uniform timebase, with a
quality mask marking cells that must not enter any downstream fit.
"""

import io
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from .errors import AlignmentError, DataError, FormatError

#: Frequencies outside this band are treated as sensor garbage and masked.
PLAUSIBLE_HZ = (45.0, 75.0)

#: Default reporting interval, 10 frames per second.
DEFAULT_DT = 0.1


@dataclass
class ChannelSeries:
    """One sensor's frequency record on its own (strictly increasing) timebase.

    ``values`` may contain NaN for gaps; timestamps are epoch seconds.
    """

    channel_id: str
    timestamps: np.ndarray
    values: np.ndarray
    location_label: str = ""

    def __post_init__(self):
        self.timestamps = np.asarray(self.timestamps, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.timestamps.shape != self.values.shape:
            raise DataError(
                f"channel {self.channel_id}: {len(self.timestamps)} timestamps "
                f"vs {len(self.values)} values"
            )
        diffs = np.diff(self.timestamps)
        if len(diffs) and np.any(diffs <= 0):
            row = int(np.argmax(diffs <= 0)) + 1
            raise DataError(
                f"channel {self.channel_id}: timestamps not strictly increasing "
                f"at sample {row}",
                row=row,
            )


@dataclass
class MeasurementSet:
    """Aligned frequency frame: channel n, sample m lives at t0_epoch + m*dt.

    ``quality_mask[n, m]`` is True where the cell is good; False cells are
    excluded from every downstream fit.
    """

    channel_ids: list
    t0_epoch: float
    dt: float
    frame: np.ndarray
    quality_mask: np.ndarray
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        self.frame = np.asarray(self.frame, dtype=float)
        self.quality_mask = np.asarray(self.quality_mask, dtype=bool)
        n, m = self.frame.shape
        if len(self.channel_ids) != n:
            raise DataError("channel_ids length does not match frame rows")
        if self.quality_mask.shape != (n, m):
            raise DataError("quality_mask shape does not match frame")
        if self.dt <= 0:
            raise DataError(f"dt must be positive, got {self.dt}")
        if n < 1 or m < 2:
            raise DataError(f"need N >= 1 channels and M >= 2 samples, got {n} x {m}")

    @property
    def n_channels(self):
        return self.frame.shape[0]

    @property
    def n_samples(self):
        return self.frame.shape[1]

    @property
    def timestamps(self):
        return self.t0_epoch + self.dt * np.arange(self.n_samples)

    def to_channels(self):
        """Split back into per-channel series; masked cells become NaN gaps."""
        t = self.timestamps
        out = []
        for n, cid in enumerate(self.channel_ids):
            vals = self.frame[n].copy()
            vals[~self.quality_mask[n]] = np.nan
            out.append(ChannelSeries(channel_id=cid, timestamps=t, values=vals))
        return out


@dataclass
class GapPolicy:
    """How align() treats missing data.

    Gaps of at most ``interpolate_max_gap`` source samples are filled by
    linear interpolation; channels whose masked fraction on the common grid
    exceeds ``drop_channel_threshold`` are dropped entirely.
    """

    interpolate_max_gap: int = 2
    drop_channel_threshold: float = 0.5


def _parse_timestamp(text, row):
    try:
        return float(text)
    except ValueError:
        pass
    try:
        iso = text.replace("Z", "+00:00")
        stamp = datetime.fromisoformat(iso)
        if stamp.tzinfo is None:
            stamp = stamp.replace(tzinfo=timezone.utc)
        return stamp.timestamp()
    except ValueError:
        raise DataError(f"row {row}: unparseable timestamp {text!r}", row=row)


def parse_csv(source):
    """Parse a frequency CSV into one ChannelSeries per data column.

    ``source`` may be a path, bytes, or a text/binary stream. Expected
    schema: header ``timestamp,<id>,...``; one row per instant; empty field
    means gap; lines starting with ``#`` are comments. Timestamps are epoch
    seconds or ISO-8601 (UTC assumed when no offset is given).
    """
    if isinstance(source, (str, bytes)) and not (
        isinstance(source, bytes) and b"\n" in source
    ):
        if isinstance(source, str) and "\n" in source:
            text = source
        else:
            with open(source, "rb") as fh:
                text = fh.read().decode("utf-8")
    elif isinstance(source, bytes):
        text = source.decode("utf-8")
    elif hasattr(source, "read"):
        raw = source.read()
        text = raw.decode("utf-8") if isinstance(raw, bytes) else raw
    else:
        text = str(source)

    lines = [
        ln for ln in io.StringIO(text) if ln.strip() and not ln.lstrip().startswith("#")
    ]
    if not lines:
        raise FormatError("empty CSV")

    header = [h.strip() for h in lines[0].rstrip("\n").split(",")]
    if not header or header[0] != "timestamp":
        raise FormatError(f"header must start with 'timestamp', got {header[:1]}")
    channel_ids = header[1:]
    if not channel_ids:
        raise FormatError("no data channels in header")
    if len(set(channel_ids)) != len(channel_ids):
        raise FormatError("duplicate channel ids in header")

    n_cols = len(header)
    times = []
    columns = [[] for _ in channel_ids]
    for row, line in enumerate(lines[1:], start=1):
        fields = [f.strip() for f in line.rstrip("\n").split(",")]
        if len(fields) != n_cols:
            raise DataError(
                f"row {row}: expected {n_cols} fields, got {len(fields)}", row=row
            )
        t = _parse_timestamp(fields[0], row)
        if times and t <= times[-1]:
            raise DataError(
                f"row {row}: timestamp {t} not greater than previous {times[-1]}",
                row=row,
            )
        times.append(t)
        for k, cell in enumerate(fields[1:]):
            if cell == "":
                columns[k].append(np.nan)
            else:
                try:
                    columns[k].append(float(cell))
                except ValueError:
                    raise DataError(f"row {row}: bad value {cell!r}", row=row)

    times = np.asarray(times)
    return [
        ChannelSeries(channel_id=cid, timestamps=times, values=np.asarray(col))
        for cid, col in zip(channel_ids, columns)
    ]


def emit_csv(mset, float_format=None):
    """Render a MeasurementSet in the ingest CSV schema.

    Full-precision (repr) formatting by default so parse_csv(emit_csv(s))
    round-trips bit-exactly; masked cells emit as empty fields.
    """
    fmt = float_format or repr
    out = ["timestamp," + ",".join(mset.channel_ids)]
    t = mset.timestamps
    for m in range(mset.n_samples):
        cells = [fmt(float(t[m]))]
        for n in range(mset.n_channels):
            cells.append(fmt(float(mset.frame[n, m])) if mset.quality_mask[n, m] else "")
        out.append(",".join(cells))
    return "\n".join(out) + "\n"


def _good_mask(values):
    lo, hi = PLAUSIBLE_HZ
    return np.isfinite(values) & (values >= lo) & (values <= hi)


def _resample_channel(ch, grid, max_gap):
    """Resample one channel onto the grid; returns (values, good_mask)."""
    good = _good_mask(ch.values)
    tg = ch.timestamps[good]
    vg = ch.values[good]
    vals = np.full(len(grid), np.nan)
    mask = np.zeros(len(grid), dtype=bool)
    if len(tg) == 0:
        return vals, mask
    vals = np.interp(grid, tg, vg)
    # never extrapolate outside the channel's good range
    mask = (grid >= tg[0]) & (grid <= tg[-1])
    # re-mask grid points bridging a source gap longer than max_gap samples
    good_idx = np.flatnonzero(good)
    for a, b in zip(good_idx[:-1], good_idx[1:]):
        if b - a - 1 > max_gap:
            inside = (grid > ch.timestamps[a]) & (grid < ch.timestamps[b])
            mask &= ~inside
    vals[~mask] = np.nan
    return vals, mask


def align(channels, dt=DEFAULT_DT, gap_policy=None):
    """Resample channels onto a shared uniform grid.

    The grid spans the intersection of the channels' time ranges. Gaps of at
    most ``gap_policy.interpolate_max_gap`` samples are linearly filled;
    channels exceeding the bad-fraction threshold are dropped and reported in
    the result's diagnostics.
    """
    if not channels:
        raise AlignmentError("no channels to align")
    if dt <= 0:
        raise AlignmentError(f"dt must be positive, got {dt}")
    policy = gap_policy or GapPolicy()

    start = max(ch.timestamps[0] for ch in channels)
    end = min(ch.timestamps[-1] for ch in channels)
    if end - start < dt:
        raise AlignmentError(
            f"channel overlap [{start}, {end}] shorter than two samples at dt={dt}"
        )
    n_grid = int(np.floor((end - start) / dt + 1e-9)) + 1
    grid = start + dt * np.arange(n_grid)

    kept_ids, rows, masks, dropped = [], [], [], []
    for ch in channels:
        vals, mask = _resample_channel(ch, grid, policy.interpolate_max_gap)
        bad_fraction = 1.0 - mask.mean()
        if bad_fraction > policy.drop_channel_threshold:
            dropped.append({"channel_id": ch.channel_id, "bad_fraction": bad_fraction})
            continue
        kept_ids.append(ch.channel_id)
        rows.append(vals)
        masks.append(mask)

    if not kept_ids:
        raise AlignmentError(
            "all channels dropped by gap policy",
            dropped=[d["channel_id"] for d in dropped],
        )
    return MeasurementSet(
        channel_ids=kept_ids,
        t0_epoch=float(grid[0]),
        dt=float(dt),
        frame=np.vstack(rows),
        quality_mask=np.vstack(masks),
        diagnostics={"dropped_channels": dropped},
    )


@dataclass
class QualityReport:
    channels: list
    passed: bool

    def to_json_dict(self):
        return {"channels": self.channels, "pass": self.passed}

    def to_json(self):
        return json.dumps(self.to_json_dict(), sort_keys=True)


def _longest_run(bad):
    longest = run = 0
    for flag in bad:
        run = run + 1 if flag else 0
        longest = max(longest, run)
    return longest


def quality_report(mset):
    """Per-channel data-quality summary with a band pass/fail verdict."""
    lo, hi = PLAUSIBLE_HZ
    entries = []
    ok = True
    for n, cid in enumerate(mset.channel_ids):
        good = mset.quality_mask[n]
        vals = mset.frame[n][good]
        in_band = bool(len(vals) == 0 or ((vals >= lo) & (vals <= hi)).all())
        ok &= in_band
        entries.append(
            {
                "id": cid,
                "bad_fraction": float(1.0 - good.mean()),
                "longest_gap": int(_longest_run(~good)),
                "min_hz": float(vals.min()) if len(vals) else None,
                "max_hz": float(vals.max()) if len(vals) else None,
                "band_ok": in_band,
            }
        )
    return QualityReport(channels=entries, passed=bool(ok))
