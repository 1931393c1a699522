"""Command-line entry points.

Subcommands
-----------
run      one session -> trace.ndjson + metrics.json (+ figures)
compare  the three collaboration settings with a common seed -> table + files
metrics  recompute metrics from a stored trace
replay   re-emit a stored trace over the telemetry socket
serve    live interactive session paced to the wall clock

The config file path may come from --config or the GAZEDRILL_CONFIG
environment variable; with neither, the built-in experiment defaults apply.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .config import Mode, SessionConfig, default_config, load_config_file
from .errors import SimulationError
from .session import compare_modes, compute_metrics, run_session
from .trace import read_trace, write_metrics, write_trace

CONFIG_ENV_VAR = "GAZEDRILL_CONFIG"


def _load_config(args) -> SessionConfig:
    path = getattr(args, "config", None) or os.environ.get(CONFIG_ENV_VAR)
    cfg = load_config_file(path) if path else default_config()
    if getattr(args, "mode", None):
        cfg.mode = Mode(args.mode)
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    if getattr(args, "port", None) is not None:
        cfg.telemetry.port = args.port
    return cfg


def _out_dir(args) -> Path:
    out = Path(getattr(args, "out", None) or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_outputs(result, out: Path, stem: str, plots: bool) -> None:
    trace_path = out / f"{stem}.trace.ndjson"
    metrics_path = out / f"{stem}.metrics.json"
    write_trace(trace_path, result.meta, result.records)
    write_metrics(metrics_path, result.metrics)
    print(f"trace   -> {trace_path}")
    print(f"metrics -> {metrics_path}")
    if plots:
        from .plots import save_overview

        fig_path = out / f"{stem}.overview.png"
        save_overview(result.records, result.meta, fig_path)
        print(f"figure  -> {fig_path}")


def _print_metrics(metrics, label: str = "") -> None:
    head = f"[{label}] " if label else ""
    ct = (
        f"{metrics.completion_time:.3f} s"
        if metrics.completion_time is not None
        else "not completed"
    )
    print(
        f"{head}movement {metrics.distraction_movement * 1e3:.4f} mm | "
        f"std {metrics.distraction_position_std * 1e3:.4f} mm | "
        f"impulse {metrics.operator_impulse:.4f} N s | "
        f"completion {ct} | overshoot {metrics.max_overshoot * 1e3:.4f} mm"
    )


def cmd_run(args) -> int:
    cfg = _load_config(args)
    result = run_session(cfg)
    _print_metrics(result.metrics, cfg.mode.value)
    _write_outputs(result, _out_dir(args), f"run_{cfg.mode.value}", args.plots)
    if result.fault:
        print(f"session aborted: {result.fault}", file=sys.stderr)
        return 2
    return 0


def cmd_compare(args) -> int:
    cfg = _load_config(args)
    results = compare_modes(cfg)
    out = _out_dir(args)
    status = 0
    for mode_name, result in results.items():
        _print_metrics(result.metrics, mode_name)
        _write_outputs(result, out, f"compare_{mode_name}", args.plots)
        if result.fault:
            print(f"{mode_name} aborted: {result.fault}", file=sys.stderr)
            status = 2
    summary = {
        "seed": cfg.seed,
        "metrics": {m: r.metrics.to_dict() for m, r in results.items()},
    }
    summary_path = out / "compare_summary.json"
    with open(summary_path, "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
    print(f"summary -> {summary_path}")
    if args.plots:
        from .plots import save_metrics_comparison

        fig_path = out / "compare_metrics.png"
        save_metrics_comparison({m: r.metrics for m, r in results.items()}, fig_path)
        print(f"figure  -> {fig_path}")
    return status


def cmd_metrics(args) -> int:
    meta, records = read_trace(args.trace)
    interval = meta.get("distraction_interval")
    target = meta.get("config", {}).get("bone", {}).get("target_depth", 0.03)
    metrics = compute_metrics(
        records, tuple(interval) if interval else None, target_depth=target
    )
    _print_metrics(metrics)
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        write_metrics(out, metrics)
        print(f"metrics -> {out}")
    else:
        print(json.dumps(metrics.to_dict(), indent=2))
    return 0


def cmd_replay(args) -> int:
    from .server import replay_trace

    meta, records = read_trace(args.trace)
    print(
        f"replaying {len(records)} ticks on ws://{args.host}:{args.port} "
        f"at {args.speed}x (waiting for a console)..."
    )
    replay_trace(records, meta, args.host, args.port, speed=args.speed)
    return 0


def cmd_serve(args) -> int:
    from .server import LiveSessionRunner, TelemetryServer

    cfg = _load_config(args)
    cfg.operator.kind = "live"
    runner = LiveSessionRunner(cfg, broadcast=lambda frame: None)
    server = TelemetryServer(runner, host=args.host, port=cfg.telemetry.port)
    print(
        f"telemetry on ws://{args.host}:{cfg.telemetry.port} "
        f"(mode {cfg.mode.value}); session paused until a console connects "
        f"and sends start"
    )
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        print("shutting down")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gazedrill",
        description="gaze-aware shared-control drilling simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_mode=True):
        p.add_argument("--config", help=f"YAML config (or ${CONFIG_ENV_VAR})")
        if with_mode:
            p.add_argument(
                "--mode", choices=[m.value for m in Mode], help="override mode"
            )
        p.add_argument("--seed", type=int, help="override RNG seed")
        p.add_argument("--out", help="output directory (default .)")
        p.add_argument(
            "--plots", action="store_true", help="render report figures (PNG)"
        )

    p_run = sub.add_parser("run", help="run one session, write trace and metrics")
    common(p_run)
    p_run.set_defaults(func=cmd_run)

    p_cmp = sub.add_parser("compare", help="run all three modes with one seed")
    common(p_cmp, with_mode=False)
    p_cmp.set_defaults(func=cmd_compare)

    p_met = sub.add_parser("metrics", help="recompute metrics from a trace")
    p_met.add_argument("trace", help="path to a .trace.ndjson file")
    p_met.add_argument("--out", help="write metrics JSON here")
    p_met.set_defaults(func=cmd_metrics)

    p_rep = sub.add_parser("replay", help="re-emit a trace over telemetry")
    p_rep.add_argument("trace", help="path to a .trace.ndjson file")
    p_rep.add_argument("--host", default="127.0.0.1")
    p_rep.add_argument("--port", type=int, default=8765)
    p_rep.add_argument("--speed", type=float, default=1.0, help="time factor")
    p_rep.set_defaults(func=cmd_replay)

    p_srv = sub.add_parser("serve", help="live interactive session")
    p_srv.add_argument("--config", help=f"YAML config (or ${CONFIG_ENV_VAR})")
    p_srv.add_argument("--mode", choices=[m.value for m in Mode])
    p_srv.add_argument("--seed", type=int)
    p_srv.add_argument("--host", default="127.0.0.1")
    p_srv.add_argument("--port", type=int, help="override telemetry port")
    p_srv.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SimulationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
