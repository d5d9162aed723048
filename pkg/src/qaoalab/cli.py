"""Command line entry point: ``qaoalab {solve,experiment,oracle,encode}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from ._validation import CapacityError, InfeasibleTargetError, InstanceError
from .harness import (
    DEFAULT_SHOT_LADDER,
    ExperimentConfig,
    SolveConfig,
    parse_shots,
    resolve_instance,
    run_experiment,
    run_oracle,
    run_solve,
    write_text,
)
from .ising import to_ising
from .postproc import PostprocConfig
from .qubo import encode_qubo


def _emit(text: str, out) -> None:
    if out:
        write_text(out, text)
    else:
        sys.stdout.write(text)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--instance", help="instance JSON (default: bundled 5x3 reference instance)")
    p.add_argument("--penalty", type=float, default=None, help="one-hot penalty coefficient")
    p.add_argument("--out", help="write output here instead of stdout")


def _qaoa(p: argparse.ArgumentParser) -> None:
    p.add_argument("--p", type=int, default=5, help="QAOA repetitions")
    p.add_argument("--max-evals", type=int, default=1000, help="optimiser evaluation budget")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--postproc",
        type=PostprocConfig.parse,
        default=PostprocConfig(),
        help="threshold:<theta> | topk:<k> | coverage:<c> (default threshold:1e-6)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qaoalab", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="run the full pipeline once")
    _common(solve)
    _qaoa(solve)
    solve.add_argument("--shots", type=parse_shots, default="exact", help="integer or 'exact'")
    solve.add_argument("--trace-out", help="write the optimiser trace CSV here")
    solve.add_argument("--dump-state", help="debug: write the final statevector as JSON [re, im] pairs")

    exp = sub.add_parser("experiment", help="repeat solves over a ladder of shot budgets")
    _common(exp)
    _qaoa(exp)
    exp.add_argument(
        "--shots",
        default=",".join(str(s) for s in DEFAULT_SHOT_LADDER) + ",exact",
        help="comma separated shot levels; 'exact' for exact probabilities",
    )
    exp.add_argument("--trials", type=int, default=30)
    exp.add_argument("--long-out", help="also write per-trial long-form CSV for plotting")
    exp.add_argument(
        "--timing",
        action="store_true",
        help="fill mean_time_s with wall-clock times (makes output non-reproducible)",
    )

    oracle = sub.add_parser("oracle", help="brute-force optimum with QUBO cross-check")
    _common(oracle)

    enc = sub.add_parser("encode", help="dump the QUBO and/or Ising model as JSON")
    _common(enc)
    enc.add_argument("--format", choices=["qubo", "ising", "both"], default="both")
    return parser


def _cmd_solve(args) -> int:
    config = SolveConfig(
        instance=args.instance,
        p=args.p,
        max_evals=args.max_evals,
        shots=args.shots,
        seed=args.seed,
        postproc=args.postproc,
        penalty=args.penalty,
    )
    report = run_solve(config)
    if args.trace_out:
        report.trace.write_csv(args.trace_out)
    if args.dump_state:
        write_text(args.dump_state, report.state.to_json())
    payload = report.to_dict()
    payload["time_s"] = report.time_s
    _emit(json.dumps(payload, indent=2) + "\n", args.out)
    return 0


def _cmd_experiment(args) -> int:
    config = ExperimentConfig(
        instance=args.instance,
        p=args.p,
        max_evals=args.max_evals,
        shots_levels=[s for s in args.shots.split(",") if s.strip()],
        trials=args.trials,
        seed=args.seed,
        postproc=args.postproc,
        penalty=args.penalty,
        record_time=args.timing,
    )
    report = run_experiment(config)
    _emit(report.to_csv(config.record_time), args.out)
    if args.long_out:
        write_text(args.long_out, report.to_long_csv(config.record_time))
    for row in report.rows:
        print(
            f"shots={row.shots} mean_obj={row.mean_objective:.1f} optimal_rate={row.optimal_rate:.2f} "
            f"coverage={row.mean_coverage:.3f} time={row.mean_time_s:.1f}s failed={row.failed}",
            file=sys.stderr,
        )
    return 0


def _cmd_oracle(args) -> int:
    res = run_oracle(args.instance, args.penalty)
    payload = {
        "layers": list(res.assignment.layers),
        "cost": res.cost,
        "state": res.state,
        "bits": res.bits,
        "qubo_state": res.qubo_state,
        "qubo_value": res.qubo_value,
        "agrees": res.agrees,
    }
    _emit(json.dumps(payload, indent=2) + "\n", args.out)
    return 0 if res.agrees in (True, None) else 1


def _cmd_encode(args) -> int:
    inst = resolve_instance(args.instance)
    q = encode_qubo(inst.graph, inst.policy, args.penalty)
    if args.format == "qubo":
        payload = q.to_dict()
    elif args.format == "ising":
        payload = to_ising(q).to_dict()
    else:
        payload = {"qubo": q.to_dict(), "ising": to_ising(q).to_dict()}
    _emit(json.dumps(payload) + "\n", args.out)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    handlers = {
        "solve": _cmd_solve,
        "experiment": _cmd_experiment,
        "oracle": _cmd_oracle,
        "encode": _cmd_encode,
    }
    try:
        return handlers[args.command](args)
    except (InstanceError, CapacityError, InfeasibleTargetError, OSError) as exc:
        print(f"qaoalab: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
