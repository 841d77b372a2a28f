"""Command-line entry points.

``mind-sim run``    replay a signal trace through the engine headlessly.
``mind-sim bench``  run simulated users against a task script.
``mind-serve``      expose a live session over WebSocket.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import sys
from pathlib import Path

from .dispatch import MockDesktop, Session
from .harness import (
    Latency,
    UserModel,
    build_desktop,
    load_task,
    plan_optimal,
    run as run_task,
    summarize,
)
from .planner import count_actions
from .profiles import bundled_profile_path, load_profile
from .signals import NoiseModel, decode_stream, read_trace


def _load_profile_arg(path: str | None):
    return load_profile(Path(path) if path else bundled_profile_path())


def _parse_model(spec: str, seed: int) -> UserModel:
    if spec == "perfect":
        return UserModel("perfect", seed=seed)
    if spec.startswith("noisy:"):
        rate = float(spec.split(":", 1)[1])
        return UserModel("noisy", NoiseModel.confusion_rate(rate, seed=seed), seed=seed)
    raise SystemExit(f"unknown model {spec!r} (use 'perfect' or 'noisy:RATE')")


def _parse_latency(spec: str) -> Latency:
    kind, _, rest = spec.partition(":")
    if kind == "const":
        return Latency("const", float(rest or 2000))
    if kind == "lognormal":
        mu, sigma = rest.split(",")
        return Latency("lognormal", float(mu), float(sigma))
    raise SystemExit(f"unknown latency {spec!r} (use 'const:MS' or 'lognormal:MU,SIGMA')")


def cmd_run(args: argparse.Namespace) -> int:
    profile = _load_profile_arg(args.profile)
    samples = read_trace(args.trace)
    events = decode_stream(samples, profile.detection)
    screen_w, screen_h = (int(v) for v in args.screen.split("x"))
    from .pointer import ScreenRect

    desktop = MockDesktop(ScreenRect(0, 0, screen_w, screen_h))
    session = Session(profile, desktop)
    session.run_events(events)
    log = "\n".join(session.event_log) + ("\n" if session.event_log else "")
    if args.log:
        Path(args.log).write_text(log, encoding="utf-8")
    else:
        sys.stdout.write(log)
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    profile = _load_profile_arg(args.profile)
    script = load_task(args.task)
    minimal = count_actions(plan_optimal(script, profile, build_desktop(script)))
    latency = _parse_latency(args.latency)
    metrics = []
    for seed in range(args.seeds):
        model = _parse_model(args.model, seed)
        model = UserModel(model.kind, model.noise, latency, seed)
        metrics.append(run_task(script, model, profile))
    report = summarize(metrics, per_action_s=args.per_action_s)
    print(f"task {script.name}: minimal_actions={minimal}")
    print(report.to_tsv())
    if args.out:
        Path(args.out).write_text(report.to_json() + "\n", encoding="utf-8")
    return 0


def main_sim(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="mind-sim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="replay a signal trace headlessly")
    p_run.add_argument("--profile", help="profile JSON (defaults to the bundled one)")
    p_run.add_argument("--trace", required=True, help="signal trace TSV")
    p_run.add_argument("--log", help="write the event log here instead of stdout")
    p_run.add_argument("--screen", default="1920x1080", help="desktop size WxH")
    p_run.set_defaults(fn=cmd_run)

    p_bench = sub.add_parser("bench", help="run simulated users on a task")
    p_bench.add_argument("--task", required=True, help="task script JSON")
    p_bench.add_argument("--profile")
    p_bench.add_argument("--model", default="perfect", help="perfect | noisy:RATE")
    p_bench.add_argument("--seeds", type=int, default=1)
    p_bench.add_argument("--latency", default="const:2000")
    p_bench.add_argument("--per-action-s", type=float, default=2.0, dest="per_action_s")
    p_bench.add_argument("--out", help="write the aggregate report JSON here")
    p_bench.set_defaults(fn=cmd_bench)

    args = parser.parse_args(argv)
    return args.fn(args)


def _make_clock(spec: str):
    if spec == "monotonic":
        return None  # gateway default
    if spec.startswith("step:"):
        step = int(spec.split(":", 1)[1])
        state = {"now": 0}

        def clock() -> int:
            state["now"] += step
            return state["now"]

        return clock
    raise SystemExit(f"unknown clock {spec!r} (use 'monotonic' or 'step:MS')")


def main_serve(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="mind-serve", description="live WebSocket session")
    parser.add_argument("--profile")
    parser.add_argument("--listen", default="127.0.0.1:7070", help="host:port")
    parser.add_argument("--screen", default="1920x1080", help="desktop size WxH")
    parser.add_argument(
        "--icons",
        help="optional JSON file: icon id -> rect, displayed on the mock desktop",
    )
    parser.add_argument(
        "--clock",
        default="monotonic",
        help="action timestamp source: 'monotonic' (live) or 'step:MS' "
        "(logical, for reproducible sessions)",
    )
    args = parser.parse_args(argv)

    profile = _load_profile_arg(args.profile)
    host, _, port = args.listen.rpartition(":")
    screen_w, screen_h = (int(v) for v in args.screen.split("x"))
    from .pointer import ScreenRect

    icons = {}
    if args.icons:
        raw = json.loads(Path(args.icons).read_text(encoding="utf-8"))
        icons = {
            name: ScreenRect(r["x"], r["y"], r["w"], r["h"]) for name, r in raw.items()
        }
    desktop = MockDesktop(ScreenRect(0, 0, screen_w, screen_h), icons=icons)

    async def main() -> None:
        from .gateway import serve

        server = await serve(
            profile, desktop, host or "127.0.0.1", int(port), clock=_make_clock(args.clock)
        )
        print(f"listening on ws://{host or '127.0.0.1'}:{server.bound_port}", flush=True)
        await asyncio.Future()

    try:
        asyncio.run(main())
    except KeyboardInterrupt:
        pass
    return 0


if __name__ == "__main__":
    sys.exit(main_sim())
