"""Command-line interface: run scenarios, inspect logs, serve live sessions."""

from __future__ import annotations

import argparse
import json
import sys

from .logio import export_log, read_log
from .metrics import compute_metrics
from .scenario import ScenarioAborted, ScenarioConfig, ScenarioError, run_scenario


def _load_scenario(path: str, delay=None, seed=None) -> ScenarioConfig:
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    if delay is not None:
        raw.setdefault("link", {})["delay"] = delay
    if seed is not None:
        raw["seed"] = seed
    return ScenarioConfig.from_dict(raw)


def cmd_run(args) -> int:
    try:
        cfg = _load_scenario(args.scenario, delay=args.delay, seed=args.seed)
    except (ScenarioError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        log = run_scenario(cfg)
    except ScenarioAborted as exc:
        print(f"error: {exc}", file=sys.stderr)
        if args.log:
            export_log(exc.log, args.log, args.format)
            print(f"partial log written to {args.log}", file=sys.stderr)
        return 1
    if args.log:
        export_log(log, args.log, args.format)
    summary = compute_metrics(log).to_dict()
    summary["rows"] = int(log.data.shape[0])
    summary["config_hash"] = log.meta["config_hash"]
    print(json.dumps(summary, indent=2))
    return 0


def cmd_metrics(args) -> int:
    try:
        log = read_log(args.log)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(json.dumps(compute_metrics(log).to_dict(), indent=2))
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    try:
        cfg = _load_scenario(args.scenario, delay=args.delay, seed=args.seed)
    except (ScenarioError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if cfg.operator["source"] != "live":
        print("error: serve requires an operator source of 'live'", file=sys.stderr)
        return 2
    app = create_app(cfg, static_dir=args.static, pace=args.pace)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def cmd_replay(args) -> int:
    import uvicorn

    from .server import create_replay_app

    try:
        log = read_log(args.log)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    app = create_replay_app(log, pace=args.pace, static_dir=args.static)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="ficteleop",
                                     description="Deterministic FIC teleoperation workbench")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a scripted scenario")
    p_run.add_argument("--scenario", required=True)
    p_run.add_argument("--delay", type=float, default=None, help="override link delay [s]")
    p_run.add_argument("--seed", type=int, default=None, help="override RNG seed")
    p_run.add_argument("--log", default=None, help="write the run log here")
    p_run.add_argument("--format", choices=["csv", "jsonl"], default="csv")
    p_run.set_defaults(func=cmd_run)

    p_met = sub.add_parser("metrics", help="recompute metrics from a log file")
    p_met.add_argument("--log", required=True)
    p_met.set_defaults(func=cmd_metrics)

    p_srv = sub.add_parser("serve", help="serve a live operator session")
    p_srv.add_argument("--scenario", required=True)
    p_srv.add_argument("--port", type=int, required=True)
    p_srv.add_argument("--host", default="127.0.0.1")
    p_srv.add_argument("--delay", type=float, default=None)
    p_srv.add_argument("--seed", type=int, default=None)
    p_srv.add_argument("--static", default=None, help="directory with the operator UI build")
    p_srv.add_argument("--pace", type=float, default=1.0,
                       help="wall-clock pacing factor (1.0 = real time)")
    p_srv.set_defaults(func=cmd_serve)

    p_rep = sub.add_parser("replay", help="stream a recorded log over the session socket")
    p_rep.add_argument("--log", required=True)
    p_rep.add_argument("--port", type=int, required=True)
    p_rep.add_argument("--host", default="127.0.0.1")
    p_rep.add_argument("--static", default=None)
    p_rep.add_argument("--pace", type=float, default=1.0)
    p_rep.set_defaults(func=cmd_replay)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
