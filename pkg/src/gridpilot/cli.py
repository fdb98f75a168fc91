"""Command-line entry points.

Exit codes: 0 success, 1 domain error (diagnostic on stderr), 2 usage error.
"""

import argparse
import json
import sys

from .bench import comparison_csv, comparison_markdown, run_comparison, scaling_study
from .data import resolve_scenario
from .episode import run_episode, write_episode_log
from .errors import GridPilotError
from .instructions import parse_instruction
from .planner import plan as plan_path
from .profiles import select_profile
from .server import make_backend, serve
from .world import load_scenario


def _add_backend_arg(p):
    p.add_argument(
        "--backend",
        default="rule",
        help="rule | remote | replay:<file> | <bundled replay name, e.g. llama3>",
    )


def build_parser():
    parser = argparse.ArgumentParser(prog="gridpilot",
                                     description="instruction-driven grid navigation")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="parse an instruction, apply it, and plan once")
    p.add_argument("scenario")
    p.add_argument("--instruction", default=None)
    p.add_argument("--strategy", default="Balance")
    _add_backend_arg(p)
    p.add_argument("--json", action="store_true", help="emit the result as JSON")
    p.add_argument("--show-path", action="store_true")

    p = sub.add_parser("simulate", help="run the full adaptive episode")
    p.add_argument("scenario")
    p.add_argument("--instruction", required=True)
    p.add_argument("--strategy", default="Balance")
    _add_backend_arg(p)
    p.add_argument("--step-limit", type=int, default=None)
    p.add_argument("--literal-loop", action="store_true",
                   help="re-parse and replan every tick instead of on invalidation")
    p.add_argument("--log", default=None, help="write the episode record stream here")

    bench = sub.add_parser("bench", help="comparison table and scaling study")
    bench_sub = bench.add_subparsers(dest="bench_command", required=True)

    p = bench_sub.add_parser("compare", help="strategy/algorithm comparison table")
    p.add_argument("scenario")
    p.add_argument("--instruction", required=True)
    p.add_argument("--strategies",
                   default="Navigate Quickly,Maximize Safety,Balance Efficiency and Safety")
    p.add_argument("--backends", default="rule")
    p.add_argument("--csv", default=None, help="write CSV here (default: stdout table)")
    p.add_argument("--markdown", action="store_true")

    p = bench_sub.add_parser("scale", help="grid-enlargement study")
    p.add_argument("scenario")
    p.add_argument("--max-scale", type=int, default=10)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--csv", default=None)
    p.add_argument("--summary", action="store_true", help="print per-scale means")

    p = sub.add_parser("serve", help="start the HTTP session service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--state-dir", default=None)
    p.add_argument("--static-dir", default=None)

    p = sub.add_parser("validate", help="check a scenario file")
    p.add_argument("scenario")

    return parser


def _cmd_plan(args):
    scenario_text = resolve_scenario(args.scenario)
    world = load_scenario(scenario_text)
    profile = select_profile(args.strategy)
    if args.instruction:
        from .episode import rebuild_planning_state, widen_avoids

        backend = make_backend(args.backend)
        seq = parse_instruction(args.instruction, world.registry, profile, backend)
        seq = widen_avoids(seq, world.registry)
        state = rebuild_planning_state(world.grid_state, seq, world.registry, profile,
                                       world.pedestrians, seq.pedestrian_buffer)
    else:
        state = world.grid_state
    result = plan_path(state, world.pose.cell, profile)
    if args.json:
        doc = {
            "path": [list(c) for c in result.path],
            "nodes_expanded": result.nodes_expanded,
            "search_time_s": result.search_time,
            "path_cost": result.path_cost,
            "path_length": result.path_length,
            "turns": result.turns,
        }
        print(json.dumps(doc, indent=2))
    else:
        print(f"nodes_expanded: {result.nodes_expanded}")
        print(f"search_time_s:  {result.search_time:.4f}")
        print(f"path_cost:      {result.path_cost:g}")
        print(f"path_length:    {result.path_length}")
        print(f"turns:          {result.turns}")
        if args.show_path:
            print("path:", " ".join(f"{x},{y}" for x, y in result.path))
    return 0


def _cmd_simulate(args):
    scenario_text = resolve_scenario(args.scenario)
    world = load_scenario(scenario_text)
    profile = select_profile(args.strategy)
    backend = make_backend(args.backend)
    log = run_episode(args.instruction, world, profile, backend=backend,
                      step_limit=args.step_limit, literal_loop=args.literal_loop)
    if args.log:
        with open(args.log, "w", encoding="utf-8") as fh:
            write_episode_log(log, fh)
    print(f"outcome:       {log.outcome}")
    print(f"ticks:         {log.ticks}")
    print(f"replans:       {log.replans}")
    print(f"executed_cost: {log.executed_cost:g}")
    if log.error:
        print(f"error: {log.error['code']}: {log.error['message']}", file=sys.stderr)
        return 1
    return 0


def _cmd_bench_compare(args):
    scenario_text = resolve_scenario(args.scenario)
    strategies = [s.strip() for s in args.strategies.split(",") if s.strip()]
    backends = [make_backend(b.strip()) for b in args.backends.split(",") if b.strip()]
    rows = run_comparison(scenario_text, args.instruction, strategies, backends)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(comparison_csv(rows))
        print(f"wrote {args.csv}")
    if args.markdown or not args.csv:
        print(comparison_markdown(rows), end="")
    failed = [r for r in rows if r.error]
    return 1 if failed else 0


def _cmd_bench_scale(args):
    scenario_text = resolve_scenario(args.scenario)
    report = scaling_study(scenario_text, args.max_scale, args.trials, args.seed)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(report.to_csv())
        print(f"wrote {args.csv}")
    if args.summary or not args.csv:
        print(report.summary_lines(), end="")
    for note in report.notes:
        print(f"note: {note}", file=sys.stderr)
    return 0


def _cmd_validate(args):
    scenario_text = resolve_scenario(args.scenario)
    world = load_scenario(scenario_text)
    gs = world.grid_state
    print(f"ok: {gs.width}x{gs.height} grid, start {world.pose.cell}, "
          f"{len(world.registry)} landmarks, {len(world.pedestrians)} pedestrians, "
          f"{len(world.pending_events)} events")
    return 0


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "plan":
            return _cmd_plan(args)
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "bench":
            if args.bench_command == "compare":
                return _cmd_bench_compare(args)
            return _cmd_bench_scale(args)
        if args.command == "serve":
            serve(host=args.host, port=args.port, state_dir=args.state_dir,
                  static_dir=args.static_dir)
            return 0
        if args.command == "validate":
            return _cmd_validate(args)
        parser.error(f"unknown command {args.command}")
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except GridPilotError as e:
        print(f"error: {e.code}: {e.message}", file=sys.stderr)
        return 1
    return 2


if __name__ == "__main__":
    sys.exit(main())
