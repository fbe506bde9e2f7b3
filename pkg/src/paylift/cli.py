"""Command-line interface: scenario runs, mode comparison, QP benchmarks,
and the teleoperation service."""

import argparse
import json
import os
import sys

from .harness import bench_qp, compare, run
from .scenario import load_scenario


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="paylift",
        description="Cable-suspended payload transport simulator and controller",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario and write logs/metrics/plots")
    p_run.add_argument("scenario", help="scenario TOML file")
    p_run.add_argument("--mode", choices=("baseline", "qp"), default=None)
    p_run.add_argument("--out", default=None, help="output directory")
    p_run.add_argument("--seed", type=int, default=None)

    p_cmp = sub.add_parser("compare", help="run baseline and QP modes side by side")
    p_cmp.add_argument("scenario")
    p_cmp.add_argument("--out", default=None)

    p_bench = sub.add_parser("bench-qp", help="benchmark the allocation cascade")
    p_bench.add_argument("scenario")
    p_bench.add_argument("--repeat", type=int, default=500)

    p_serve = sub.add_parser("serve", help="teleoperation WebSocket service")
    p_serve.add_argument("scenario")
    p_serve.add_argument("--port", type=int,
                         default=int(os.environ.get("PAYLIFT_TELEOP_PORT", "8765")))
    p_serve.add_argument("--rate", type=float, default=30.0,
                         help="state stream rate in Hz")
    p_serve.add_argument("--speed", type=float, default=1.0,
                         help="wall-clock speed factor")

    args = parser.parse_args(argv)
    scenario = load_scenario(args.scenario)

    if args.command == "run":
        if args.seed is not None:
            scenario.seed = args.seed
            scenario.sim.seed = args.seed
        result = run(scenario, mode=args.mode, out_dir=args.out)
        print(json.dumps(result.summary, indent=2, sort_keys=True))
        return 1 if result.aborted else 0

    if args.command == "compare":
        report, _ = compare(scenario, out_dir=args.out)
        print(json.dumps(report, indent=2, sort_keys=True))
        baseline_bad = report["baseline"]["violates_safety"]
        qp_good = not report["qp"]["violates_safety"]
        print(f"baseline violates safety distance: {baseline_bad}; "
              f"qp cascade stays clear: {qp_good}")
        return 0

    if args.command == "bench-qp":
        print(json.dumps(bench_qp(scenario, repeat=args.repeat), indent=2,
                         sort_keys=True))
        return 0

    if args.command == "serve":
        from .teleop import serve

        print(f"serving teleop for {scenario.name!r} on port {args.port} "
              f"({args.rate:.0f} Hz)")
        serve(scenario, port=args.port, rate_hz=args.rate, speed=args.speed)
        return 0

    return 2


if __name__ == "__main__":
    sys.exit(main())
