"""Command-line front end: run / compare / tune / infer.

Exit codes: 0 success, 2 config error, 3 simulation abort, 4 tuner failure.
Result files are written to a temp name and renamed on success, so a failed
run never leaves a truncated CSV behind.
"""
from __future__ import annotations

import argparse
import copy
import dataclasses
import os
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml

from . import config as cfgmod
from .config import ConfigInvalid
from .control import FuzzyPIGains
from .fuzzy import FuzzyInference, defuzzify_coa
from .presets import PRESET_NAMES, TUNED_FUZZY
from .sim import (
    AllRunsFailed,
    Metrics,
    NoContact,
    Trace,
    TRACE_COLUMNS,
    WorkspaceViolation,
    compare,
    compute_metrics,
    run,
    tune,
)


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def format_trace_csv(trace: Trace) -> str:
    lines = [",".join(TRACE_COLUMNS)]
    for row in trace.values:
        lines.append(",".join(f"{v:.9g}" for v in row))
    return "\n".join(lines) + "\n"


def write_trace_csv(trace: Trace, path: Path) -> None:
    _atomic_write(path, format_trace_csv(trace))


def _metrics_dict(m: Metrics) -> Dict[str, Any]:
    return dataclasses.asdict(m)


def _selected_axes(cfg: Dict[str, Any]) -> List[str]:
    return [axis for axis in ("x", "z") if cfg["selection"][axis]]


def _effective_config(args) -> Dict[str, Any]:
    if getattr(args, "preset", None) and getattr(args, "config", None):
        raise ConfigInvalid("--preset and --config are mutually exclusive")
    if getattr(args, "preset", None):
        raw = cfgmod.preset_config(args.preset)
    elif getattr(args, "config", None):
        text = Path(args.config).read_text() if Path(args.config).exists() else None
        if text is None:
            raise ConfigInvalid(f"config file not found: {args.config}")
        try:
            raw = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise ConfigInvalid(f"config file {args.config} is not valid YAML: {exc}") from None
        if raw is None:
            raw = {}
        if not isinstance(raw, dict):
            raise ConfigInvalid(f"config file {args.config} must contain a mapping")
    else:
        raise ConfigInvalid("provide --preset or --config")
    if getattr(args, "controller", None):
        raw["controller"] = args.controller
    if getattr(args, "seed", None) is not None:
        raw["seed"] = args.seed
    if getattr(args, "set", None):
        raw = cfgmod.apply_overrides(raw, args.set)
    return cfgmod.validate_config(raw)


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _metrics_summary(cfg: Dict[str, Any], trace: Trace) -> Dict[str, Any]:
    metrics: Dict[str, Any] = {}
    for axis in _selected_axes(cfg):
        setpoint = float(cfg["setpoint"][axis])
        try:
            metrics[axis] = _metrics_dict(compute_metrics(trace, axis, setpoint))
        except NoContact as exc:
            metrics[axis] = {"error": str(exc)}
    return metrics


def cmd_run(args) -> int:
    cfg = _effective_config(args)
    scenario = cfgmod.scenario_from_config(cfg)
    trace = run(scenario)

    out = _out_dir(args)
    stem = f"{scenario.name}_{scenario.controller_kind}"
    csv_path = out / f"{stem}.csv"
    summary_path = out / f"{stem}_summary.yaml"
    metrics = _metrics_summary(cfg, trace)
    write_trace_csv(trace, csv_path)
    _atomic_write(
        summary_path,
        cfgmod.to_yaml(
            {
                "config": cfg,
                "ticks": len(trace),
                "trace_csv": csv_path.name,
                "metrics": metrics,
            }
        ),
    )
    print(f"wrote {csv_path} and {summary_path}")
    for axis, m in metrics.items():
        if "error" in m:
            print(f"  {axis}: {m['error']}")
        else:
            settle = "not settled" if not m["settled"] else f"settled at {m['settling_time']:.3f} s"
            print(
                f"  {axis}: setpoint {cfg['setpoint'][axis]} N, overshoot "
                f"{m['overshoot_pct']:.2f} %, {settle}, steady RMS "
                f"{m['steady_state_rms']:.3f} N"
            )
    return 0


def cmd_compare(args) -> int:
    cfg = _effective_config(args)
    out = _out_dir(args)
    traces: Dict[str, Trace] = {}
    scenarios = {}
    for kind in ("pi", "fuzzy"):
        scenario = cfgmod.scenario_from_config(cfg, controller=kind)
        scenarios[kind] = scenario
        traces[kind] = run(scenario)

    name = cfg["name"]
    report: Dict[str, Any] = {"scenario": name, "config": cfg, "axes": {}}
    for axis in _selected_axes(cfg):
        setpoint = float(cfg["setpoint"][axis])
        try:
            rep = compare(
                traces["pi"],
                traces["fuzzy"],
                axis,
                setpoint,
                label_a="pi",
                label_b="fuzzy",
                gains_a=scenarios["pi"].gains,
                gains_b=scenarios["fuzzy"].gains,
            )
        except NoContact as exc:
            report["axes"][axis] = {"setpoint": setpoint, "error": str(exc)}
            continue
        report["axes"][axis] = {
            "setpoint": setpoint,
            "pi": _metrics_dict(rep.metrics_a),
            "fuzzy": _metrics_dict(rep.metrics_b),
            "deltas_fuzzy_minus_pi": rep.deltas,
            "gains": {"pi": rep.gains_a, "fuzzy": rep.gains_b},
        }

    csv_paths = {}
    for kind, trace in traces.items():
        csv_path = out / f"{name}_{kind}.csv"
        write_trace_csv(trace, csv_path)
        csv_paths[kind] = csv_path.name
    report["trace_csv"] = csv_paths
    report_path = out / f"{name}_compare.yaml"
    _atomic_write(report_path, cfgmod.to_yaml(report))

    print(f"wrote {report_path}")
    for axis, body in report["axes"].items():
        print(f"  axis {axis} (setpoint {body['setpoint']} N):")
        if "error" in body:
            print(f"    {body['error']}")
            continue
        for kind in ("pi", "fuzzy"):
            m = body[kind]
            settle = "not settled" if not m["settled"] else f"{m['settling_time']:.3f} s"
            print(
                f"    {kind:5s} overshoot {m['overshoot_pct']:8.2f} %  settling {settle:>12s}  "
                f"rms {m['steady_state_rms']:.3f} N  itae {m['itae']:.3f}"
            )
    return 0


def cmd_tune(args) -> int:
    cfg = _effective_config(args)
    settings = cfgmod.tuner_settings(cfg)
    scenario = cfgmod.scenario_from_config(cfg)
    best, leaderboard = tune(
        scenario,
        settings["grid"],
        weights=settings["weights"],
        axis=settings["axis"],
        band_pct=settings["band_pct"],
    )

    out = _out_dir(args)
    stem = f"{scenario.name}_{scenario.controller_kind}"
    board_path = out / f"{stem}_leaderboard.yaml"
    best_path = out / f"{stem}_best.yaml"
    _atomic_write(
        board_path,
        cfgmod.to_yaml(
            {
                "scenario": scenario.name,
                "controller": scenario.controller_kind,
                "axis": settings["axis"],
                "entries": [dataclasses.asdict(e) for e in leaderboard],
            }
        ),
    )
    best_cfg = copy.deepcopy(cfg)
    for axis in ("x", "z"):
        best_cfg["gains"][scenario.controller_kind][axis] = dict(best.gains)
    _atomic_write(best_path, cfgmod.to_yaml(best_cfg))
    print(f"wrote {board_path} and {best_path}")
    print(f"  best gains: {best.gains} (objective {best.objective:.4f})")
    return 0


def cmd_infer(args) -> int:
    gains = FuzzyPIGains(kp=args.kp, ki=args.ki, kx=args.kx)
    engine = FuzzyInference()
    e_norm = gains.ki * args.e
    de_norm = gains.kp * args.de
    firings = engine.firings(e_norm, de_norm)
    agg = engine.aggregate(e_norm, de_norm)
    centroid = defuzzify_coa(agg)
    du = gains.kx * centroid
    print(f"e = {args.e:g} N, de = {args.de:g} N")
    print(f"scaled inputs: ki*e = {e_norm:.6f}, kp*de = {de_norm:.6f} (clamped to [-1, 1])")
    if firings:
        print("fired rules:")
        for f in sorted(firings, key=lambda f: (-f.strength, f.e_label, f.de_label)):
            print(
                f"  e={f.e_label.name:2s} & de={f.de_label.name:2s} -> {f.out_label.name.lower()}"
                f"  (strength {f.strength:.4f})"
            )
    else:
        print("fired rules: none")
    clips = {label.name.lower(): round(c, 6) for label, c in sorted(agg.clips.items())}
    print(f"aggregated output clips: {clips}")
    print(f"centroid = {centroid:.6f}")
    print(f"du = kx * centroid = {du:.6e} m")
    return 0


def _add_common(parser: argparse.ArgumentParser, with_controller: bool = True) -> None:
    parser.add_argument("--preset", choices=PRESET_NAMES, help="built-in scenario")
    parser.add_argument("--config", help="YAML scenario config file")
    if with_controller:
        parser.add_argument("--controller", choices=("pi", "fuzzy"), help="force loop law")
    parser.add_argument(
        "--set",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override a config key (dotted path, YAML value); repeatable",
    )
    parser.add_argument("--out", default="out", help="output directory (default: out)")
    parser.add_argument("--seed", type=int, help="master seed override")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="forcemotion",
        description="Planar hybrid force/motion control simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate one scenario, write CSV trace + summary")
    _add_common(p_run)
    p_run.set_defaults(func=cmd_run)

    p_cmp = sub.add_parser("compare", help="run PI and fuzzy-PI on one scenario, same seed")
    _add_common(p_cmp, with_controller=False)
    p_cmp.set_defaults(func=cmd_compare)

    p_tune = sub.add_parser("tune", help="grid-search gains, write leaderboard + best config")
    _add_common(p_tune)
    p_tune.set_defaults(func=cmd_tune)

    p_inf = sub.add_parser("infer", help="inspect one fuzzy-PI step for given e, de")
    p_inf.add_argument("--e", type=float, required=True, help="force error [N]")
    p_inf.add_argument("--de", type=float, required=True, help="error change [N]")
    default = TUNED_FUZZY["exp2"]
    p_inf.add_argument("--kp", type=float, default=default.kp, help="de scale [1/N]")
    p_inf.add_argument("--ki", type=float, default=default.ki, help="e scale [1/N]")
    p_inf.add_argument("--kx", type=float, default=default.kx, help="output scale [m]")
    p_inf.set_defaults(func=cmd_infer)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigInvalid as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except WorkspaceViolation as exc:
        print(f"simulation aborted: {exc}", file=sys.stderr)
        return 3
    except AllRunsFailed as exc:
        print(f"tuner failed: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
