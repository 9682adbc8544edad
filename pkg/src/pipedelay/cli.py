"""Command-line front end.

Four commands, all driven by a scenario file or shipped preset name:

    pipedelay analyze  <scenario>   closed-form delay bounds per variant
    pipedelay simulate <scenario>   seeded simulation summaries + histograms
    pipedelay validate <scenario>   simulation checked against the bounds
    pipedelay sweep    <scenario> --param queue_size --values 0..4

Outputs are pure functions of (scenario file, flags, seed): no
timestamps, no machine state, stable ordering. Exit codes: 0 success,
1 validation failure, 2 usage or scenario errors.
"""

import argparse
import os
import sys
from dataclasses import replace

import numpy as np

from .analysis import analyze, validate_against_analysis
from .detector import Vanilla, ZeroSlack
from .presets import PROFILE_PRESETS
from .scenario import Scenario, ScenarioError, load_scenario
from .sim import run


def _fmt(x) -> str:
    if isinstance(x, float):
        return "nan" if np.isnan(x) else f"{x:.3f}"
    return str(x)


def _table(headers, rows) -> list[str]:
    cells = [[_fmt(c) for c in row] for row in rows]
    widths = [max(len(h), *(len(r[i]) for r in cells)) if cells else len(h)
              for i, h in enumerate(headers)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    for row in cells:
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
    return lines


def _csv(headers, rows) -> list[str]:
    def cell(c):
        return f"{c:.6f}" if isinstance(c, float) else str(c)
    return [",".join(headers)] + [",".join(cell(c) for c in row) for row in rows]


def _emit(headers, rows, fmt: str) -> None:
    lines = _csv(headers, rows) if fmt == "csv" else _table(headers, rows)
    print("\n".join(lines))


def _write(out_dir: str, filename: str, lines) -> None:
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, filename)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"wrote {path}")


def _histogram(values, bin_ms: float = 1.0):
    """Floor-binned counts as (bin_start_ms, count) rows."""
    values = np.asarray(values, dtype=float)
    values = values[~np.isnan(values)]
    if len(values) == 0:
        return []
    idx = np.floor(values / bin_ms).astype(np.int64)
    starts, counts = np.unique(idx, return_counts=True)
    return [(float(s * bin_ms), int(c)) for s, c in zip(starts, counts)]


def _bounds_rows(scenario: Scenario):
    rows = []
    notes = []
    for variant in scenario.variants:
        b = analyze(scenario.camera, scenario.usb, scenario.profile, variant)
        for component, lo, hi in (
            ("transfer", b.camera.d_tran_min, b.camera.d_tran_max_exclusive),
            ("camera", b.camera.d_camera_min, b.camera.d_camera_max_exclusive),
            ("queue", b.queue.d_queue_min, b.queue.d_queue_max),
            ("detector", b.detector.d_detector_min, b.detector.d_detector_max),
            ("total", b.total_min, b.total_max),
        ):
            rows.append((b.variant_name, b.regime.name, component, lo, hi))
        notes.extend(f"{b.variant_name}: {w}" for w in b.warnings)
    return rows, notes


def cmd_analyze(args) -> int:
    scenario = load_scenario(args.scenario)
    rows, notes = _bounds_rows(scenario)
    headers = ("variant", "regime", "component", "min_ms", "max_ms")
    _emit(headers, rows, args.format)
    for note in notes:
        print(f"note: {note}")
    if args.out:
        _write(args.out, "analysis.csv", _csv(headers, rows))
    return 0


def _simulate_all(scenario: Scenario, seed: int | None, trace: bool):
    results = []
    for variant in scenario.variants:
        results.append(run(scenario.sim_config(variant, seed=seed, trace=trace)))
    return results


def _summary_row(r):
    e2e = r.detected_e2e()
    mean_e2e = float(e2e.mean()) if len(e2e) else float("nan")
    p99_e2e = float(np.percentile(e2e, 99)) if len(e2e) else float("nan")
    return (
        r.variant_name, r.frames_captured, r.frames_fetched, r.drops,
        len(e2e), r.objects_missed, mean_e2e, p99_e2e, r.mean_cycle_ms(),
    )


_SUMMARY_HEADERS = (
    "variant", "captured", "fetched", "drops", "detected", "missed",
    "mean_e2e_ms", "p99_e2e_ms", "mean_cycle_ms",
)


def cmd_simulate(args) -> int:
    scenario = load_scenario(args.scenario)
    results = _simulate_all(scenario, args.seed, args.trace)
    rows = [_summary_row(r) for r in results]
    _emit(_SUMMARY_HEADERS, rows, args.format)
    if args.out:
        _write(args.out, "summary.csv", _csv(_SUMMARY_HEADERS, rows))
        for r in results:
            for label, values in (("e2e", r.detected_e2e()),
                                  ("cycle", r.cycle_times)):
                hist = _histogram(values)
                _write(args.out, f"hist_{label}_{r.variant_name}.csv",
                       _csv(("bin_start_ms", "count"), hist))
    if args.trace:
        for r in results:
            lines = ["\t".join(("time_ns", "event_type", "frame_id", "detail"))]
            lines += ["\t".join(str(f) for f in ev) for ev in r.trace]
            if args.out:
                _write(args.out, f"trace_{r.variant_name}.tsv", lines)
            else:
                print(f"trace[{r.variant_name}]:")
                print("\n".join(lines))
    return 0


def cmd_validate(args) -> int:
    scenario = load_scenario(args.scenario)
    rows = []
    notes = []
    failed = False
    for variant in scenario.variants:
        bounds = analyze(scenario.camera, scenario.usb, scenario.profile, variant)
        result = run(scenario.sim_config(variant, seed=args.seed))
        report = validate_against_analysis(result, bounds,
                                           shrink_ms=args.shrink_bounds)
        for c in report.checks:
            rows.append((bounds.variant_name, c.name, c.n_checked,
                         c.n_violations, c.lo, c.hi, c.observed_min,
                         c.observed_max, "ok" if c.ok else "FAIL"))
        failed = failed or not report.ok
        notes.extend(f"{bounds.variant_name}: {w}"
                     for w in (*bounds.warnings, *report.notes))
    headers = ("variant", "check", "n", "violations", "bound_min", "bound_max",
               "observed_min", "observed_max", "status")
    _emit(headers, rows, args.format)
    for note in notes:
        print(f"note: {note}")
    if args.out:
        _write(args.out, "validation.csv", _csv(headers, rows))
    print("result: FAIL" if failed else "result: PASS")
    return 1 if failed else 0


def _parse_values(text: str, parser: argparse.ArgumentParser):
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            return [float(v) for v in range(int(lo), int(hi) + 1)]
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        parser.error(f"--values: expected 'a..b' or comma list, got {text!r}")


def _sweep_point(scenario: Scenario, param: str, value: float) -> Scenario:
    if param == "queue_size":
        q = int(value)
        return replace(scenario, queue_size=q, variants=(Vanilla(q),))
    if param == "theta":
        return replace(scenario, theta=value, variants=(ZeroSlack(value),))
    if param == "frame_rate":
        return replace(scenario, camera=replace(scenario.camera, frame_rate=value),
                       variants=scenario.variants[:1])
    # nn_resolution: swap the resolution suffix of the profile preset.
    if scenario.profile_preset is None:
        raise ScenarioError(
            "nn_resolution sweep needs a profile preset with a resolution suffix")
    family = scenario.profile_preset.rsplit("-", 1)[0]
    name = f"{family}-{int(value)}"
    if name not in PROFILE_PRESETS:
        raise ScenarioError(
            f"no profile preset {name!r} "
            f"(available: {', '.join(sorted(PROFILE_PRESETS))})")
    return replace(scenario, profile=PROFILE_PRESETS[name], profile_preset=name,
                   variants=scenario.variants[:1])


def cmd_sweep(args, parser) -> int:
    scenario = load_scenario(args.scenario)
    values = sorted(_parse_values(args.values, parser))
    rows = []
    for value in values:
        point = _sweep_point(scenario, args.param, value)
        r = run(point.sim_config(point.variants[0], seed=args.seed))
        e2e = r.detected_e2e()
        mean_e2e = float(e2e.mean()) if len(e2e) else float("nan")
        shown = int(value) if args.param in ("queue_size", "nn_resolution") else value
        rows.append((args.param, shown, mean_e2e, r.mean_cycle_ms()))
    headers = ("param", "value", "mean_e2e_ms", "mean_cycle_ms")
    _emit(headers, rows, args.format)
    if args.out:
        _write(args.out, "sweep.csv", _csv(headers, rows))
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pipedelay",
        description="Delay bounds and simulation for a camera->queue->detector pipeline.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("scenario",
                       help="scenario file path or shipped preset name")
        p.add_argument("--seed", type=int, default=None,
                       help="override the scenario seed")
        p.add_argument("--out", default=None, metavar="DIR",
                       help="directory for CSV and trace outputs")
        p.add_argument("--format", choices=("table", "csv"), default="table",
                       help="stdout format (default: table)")

    p = sub.add_parser("analyze", help="print closed-form delay bounds")
    common(p)
    p = sub.add_parser("simulate", help="run the seeded simulation")
    common(p)
    p.add_argument("--trace", action="store_true",
                   help="emit the per-event schedule")
    p = sub.add_parser("validate", help="check simulation against bounds")
    common(p)
    p.add_argument("--shrink-bounds", type=float, default=0.0, metavar="MS",
                   help="narrow every bound by MS before checking (self-test)")
    p = sub.add_parser("sweep", help="simulate across one parameter")
    common(p)
    p.add_argument("--param", required=True,
                   choices=("queue_size", "theta", "frame_rate", "nn_resolution"))
    p.add_argument("--values", required=True,
                   help="comma list '0,1,2' or integer range '0..4'")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "analyze":
            return cmd_analyze(args)
        if args.command == "simulate":
            return cmd_simulate(args)
        if args.command == "validate":
            return cmd_validate(args)
        return cmd_sweep(args, parser)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
