"""Command-line front end: ingest -> detect -> solve -> report, plus
simulation and method-comparison commands.

Exit codes: 0 success, 2 usage, 3 data/format, 4 no event, 5 solver,
6 simulator instability. Failures emit a one-line JSON error object on
stderr with the originating module and error code.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .coi import SolverConfig, estimate_proposed, median_baseline, rocof_nerc_detail
from .errors import CoifreqError, FormatError
from .event_detect import DetectorConfig, detect_event, manual_window
from .ingest import GapPolicy, align, emit_csv, parse_csv, quality_report
from .magnitude import estimate_event_mw, parse_inertia_csv, system_inertia
from .sim import SimScenario, get_preset, simulate


def _dump(obj):
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _write_or_stdout(text, path):
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _fmt(x):
    return repr(float(x))


def _resolved_config(args, extra=None):
    cfg = {
        "omega": args.omega,
        "window_seconds": args.window_s,
        "rate_fps": args.rate_fps,
        "rocof_threshold": args.rocof_threshold,
        "confirm_samples": args.confirm_samples,
        "interpolate_max_gap": args.max_gap,
        "drop_channel_threshold": args.drop_threshold,
        "f_nominal_hz": args.f_nominal,
        "version": __version__,
    }
    if extra:
        cfg.update(extra)
    return cfg


def _load_measurements(args):
    channels = parse_csv(args.input)
    return align(
        channels,
        dt=1.0 / args.rate_fps,
        gap_policy=GapPolicy(
            interpolate_max_gap=args.max_gap,
            drop_channel_threshold=args.drop_threshold,
        ),
    )


def _event_window(mset, args):
    detector = DetectorConfig(
        rocof_threshold=args.rocof_threshold,
        confirm_samples=args.confirm_samples,
        window_seconds=args.window_s,
    )
    if args.t0 is not None:
        if args.f0 is None:
            raise FormatError("--t0 requires --f0")
        k = int(np.floor(args.window_s / mset.dt + 1e-9))
        return manual_window(args.t0, args.f0, k, mset)
    return detect_event(mset, detector)


def _series_csv(mset, proposed, median):
    header = "t," + ",".join(mset.channel_ids) + ",f_coi_proposed,f_coi_median"
    lines = [header]
    t = mset.timestamps
    for m in range(mset.n_samples):
        cells = [_fmt(t[m])]
        for n in range(mset.n_channels):
            cells.append(_fmt(mset.frame[n, m]) if mset.quality_mask[n, m] else "")
        cells.append(_fmt(proposed.f_coi[m]))
        cells.append(_fmt(median.f_coi[m]))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def cmd_estimate(args):
    mset = _load_measurements(args)
    report = {"config": _resolved_config(args, {"input": str(args.input)})}
    report["quality"] = quality_report(mset).to_json_dict()
    window = _event_window(mset, args)
    report["event_window"] = window.to_json_dict()

    solver_cfg = SolverConfig(omega=args.omega)
    solution, proposed = estimate_proposed(mset, window, solver_cfg)
    median = median_baseline(mset, window)
    report["weight_solution"] = solution.to_json_dict()
    report["proposed"] = proposed.to_json_dict()
    report["median"] = median.to_json_dict()
    report["nerc_lookup"] = rocof_nerc_detail(proposed, window)

    if args.inertia:
        table = parse_inertia_csv(args.inertia)
        i_sys = system_inertia(table)
        mag = estimate_event_mw(i_sys, abs(proposed.rocof_fit), args.f_nominal)
        report["magnitude"] = mag.to_json_dict()
    else:
        report["magnitude"] = "skipped"

    series = _series_csv(mset, proposed, median)
    if args.out:
        out = Path(args.out)
        out.write_text(_dump(report))
        out.with_suffix(".series.csv").write_text(series)
    elif args.format == "csv":
        sys.stdout.write(series)
    else:
        sys.stdout.write(_dump(report))
    return 0


def _load_scenario(spec_arg, seed_override=None):
    try:
        scenario = get_preset(spec_arg)
    except KeyError:
        with open(spec_arg, "r", encoding="utf-8") as fh:
            scenario = SimScenario.from_json_dict(json.load(fh))
    if seed_override is not None:
        scenario.seed = seed_override
    return scenario


def cmd_simulate(args):
    scenario = _load_scenario(args.scenario, args.seed)
    result = simulate(scenario)
    prefix = Path(args.out_prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)

    Path(f"{prefix}_measurements.csv").write_text(emit_csv(result.measurements))

    truth_lines = [
        f"# delta_p_mw={_fmt(scenario.trip.delta_p_mw)}",
        f"# true_rocof_initial={_fmt(result.true_rocof_initial)}",
        f"# i_sys_mws={_fmt(scenario.system_inertia_mws())}",
        f"# f_nominal_hz={_fmt(scenario.f_nominal_hz)}",
        f"# trip_time_s={_fmt(scenario.trip.time_s)}",
        "timestamp,f_coi_true",
    ]
    for t, f in zip(result.report_times, result.true_coi_report):
        truth_lines.append(f"{_fmt(t)},{_fmt(f)}")
    Path(f"{prefix}_truth.csv").write_text("\n".join(truth_lines) + "\n")

    Path(f"{prefix}_scenario.json").write_text(_dump(scenario.to_json_dict()))
    return 0


def _parse_truth(path):
    meta = {}
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, val = line.lstrip("# ").partition("=")
                meta[key.strip()] = float(val)
            elif not line.startswith("timestamp"):
                t, f = line.split(",")
                rows.append((float(t), float(f)))
    required = {"delta_p_mw", "true_rocof_initial", "i_sys_mws", "f_nominal_hz"}
    missing = required - meta.keys()
    if missing:
        raise FormatError(f"truth file missing metadata: {sorted(missing)}")
    arr = np.asarray(rows)
    return meta, arr[:, 0], arr[:, 1]


def cmd_compare(args):
    from .errors import AlignmentError

    args.input = args.measurements
    mset = _load_measurements(args)
    meta, t_truth, coi_truth = _parse_truth(args.truth)

    # map truth samples onto the measurement grid
    idx_map = np.rint((t_truth - mset.t0_epoch) / mset.dt).astype(int)
    if np.any(np.abs(mset.t0_epoch + idx_map * mset.dt - t_truth) > 1e-6):
        raise AlignmentError("truth timestamps do not lie on the measurement grid")

    window = _event_window(mset, args)
    solver_cfg = SolverConfig(omega=args.omega)
    solution, proposed = estimate_proposed(mset, window, solver_cfg)
    median = median_baseline(mset, window)

    fit_idx = np.rint(
        (window.t0 + np.arange(1, window.k_samples + 1) * window.dt - mset.t0_epoch)
        / mset.dt
    ).astype(int)
    on_grid = np.isin(idx_map, fit_idx)
    if on_grid.sum() < window.k_samples:
        raise AlignmentError(
            "truth file does not cover the fit window",
            covered=int(on_grid.sum()),
            needed=window.k_samples,
        )
    truth_fit = coi_truth[on_grid]

    def metrics(estimate):
        rmse = float(np.sqrt(np.mean((estimate.f_coi[fit_idx] - truth_fit) ** 2)))
        rocof_err = float(abs(abs(estimate.rocof_fit) - abs(meta["true_rocof_initial"])))
        mag = estimate_event_mw(
            meta["i_sys_mws"], abs(estimate.rocof_fit), meta["f_nominal_hz"]
        )
        mw_err = float(abs(mag.p_event_mw - meta["delta_p_mw"]))
        return {
            "rmse_vs_true_coi": rmse,
            "rocof_abs_error": rocof_err,
            "p_event_mw": mag.p_event_mw,
            "mw_abs_error": mw_err,
        }

    prop_m = metrics(proposed)
    med_m = metrics(median)
    summary = {
        key: (
            "proposed"
            if prop_m[key] < med_m[key]
            else "median" if med_m[key] < prop_m[key] else "tie"
        )
        for key in ("rmse_vs_true_coi", "rocof_abs_error", "mw_abs_error")
    }
    report = {
        "config": _resolved_config(
            args, {"measurements": str(args.measurements), "truth": str(args.truth)}
        ),
        "event_window": window.to_json_dict(),
        "truth": {k: meta[k] for k in sorted(meta)},
        "proposed": prop_m,
        "median": med_m,
        "winner": summary,
    }
    _write_or_stdout(_dump(report), args.out)
    return 0


def _add_common_estimation_flags(p):
    p.add_argument("--omega", type=float, default=30.0, help="relaxation weight")
    p.add_argument("--window-s", type=float, default=1.0, help="fit window length, s")
    p.add_argument("--rate-fps", type=float, default=10.0, help="reporting rate, frames/s")
    p.add_argument("--rocof-threshold", type=float, default=0.005)
    p.add_argument("--confirm-samples", type=int, default=3)
    p.add_argument("--max-gap", type=int, default=2)
    p.add_argument("--drop-threshold", type=float, default=0.5)
    p.add_argument("--f-nominal", type=float, default=60.0)
    p.add_argument("--t0", type=float, default=None, help="manual event start time")
    p.add_argument("--f0", type=float, default=None, help="manual event start frequency")
    p.add_argument("--out", default=None)


def build_parser():
    parser = argparse.ArgumentParser(prog="coifreq", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_est = sub.add_parser("estimate", help="run the full estimation pipeline on a CSV")
    p_est.add_argument("--input", required=True)
    p_est.add_argument("--inertia", default=None, help="unit inertia CSV")
    p_est.add_argument("--format", choices=["json", "csv"], default="json")
    _add_common_estimation_flags(p_est)
    p_est.set_defaults(func=cmd_estimate)

    p_sim = sub.add_parser("simulate", help="run an oracle scenario to CSV files")
    p_sim.add_argument("--scenario", required=True, help="scenario JSON path or preset name")
    p_sim.add_argument("--out-prefix", required=True)
    p_sim.add_argument("--seed", type=int, default=None)
    p_sim.set_defaults(func=cmd_simulate)

    p_cmp = sub.add_parser("compare", help="score both methods against oracle truth")
    p_cmp.add_argument("--measurements", required=True)
    p_cmp.add_argument("--truth", required=True)
    _add_common_estimation_flags(p_cmp)
    p_cmp.set_defaults(func=cmd_compare)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CoifreqError as exc:
        sys.stderr.write(_dump(exc.to_json_dict()))
        return exc.exit_code
    except FileNotFoundError as exc:
        sys.stderr.write(
            _dump({"code": "usage", "module": "cli", "message": str(exc), "details": {}})
        )
        return 2


if __name__ == "__main__":
    sys.exit(main())
