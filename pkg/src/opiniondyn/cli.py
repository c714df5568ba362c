"""Command-line front end: instance generation, equilibrium reports, dynamics
runs, and logit-chain analyses, all deterministic given their flags.

Exit codes: 0 ok, 2 config/schema error, 3 size limit exceeded, 4 internal
invariant violation. Randomized subcommands require an explicit seed; there
are no wall-clock defaults. Thread count of the numeric backend is controlled
by the usual BLAS environment variables; everything else is a flag.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from fractions import Fraction

from . import __version__
from .bestresponse import (
    FixedSequence,
    RoundRobin,
    Trace,
    UniformRandom,
    adversarial_schedule,
    run_best_response,
    validate_schedule,
)
from .bottleneck import bottleneck_set
from .errors import InvariantError, LimitExceededError, SchemaError
from .exact import format_rational, to_fraction
from .games import OpinionGame, canonicalize_beliefs, greedy_nash, opinion_game, poa_pos
from .graphs import (
    cutwidth_exact,
    make_clique,
    make_complete_bipartite,
    make_gadget_chain,
    make_star,
)
from .logit import LogitChain, contraction_check, mixing_time_exact, path_coupling_mixing_bound
from .spectral import congestion_upper_bound, mixing_bounds_from_relaxation, relaxation_time


def _load_game(path: str) -> OpinionGame:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError as exc:
        raise SchemaError(f"game file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path} is not valid JSON: {exc}") from exc
    return OpinionGame.from_dict(data)


def _write_json(path: str | None, payload: dict):
    text = json.dumps(payload, indent=2, sort_keys=True)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _parse_beliefs(spec: str, n: int) -> list[Fraction]:
    parts = [p.strip() for p in spec.split(",") if p.strip()]
    if len(parts) == 1:
        return [to_fraction(parts[0])] * n
    if len(parts) != n:
        raise SchemaError(f"expected 1 or {n} beliefs, got {len(parts)}")
    return [to_fraction(p) for p in parts]


def _parse_scheduler(spec: str):
    if spec == "round_robin":
        return RoundRobin()
    if spec.startswith("random:"):
        try:
            return UniformRandom(seed=int(spec.split(":", 1)[1]))
        except ValueError as exc:
            raise SchemaError(f"bad seed in scheduler spec {spec!r}") from exc
    if spec.startswith("file:"):
        path = spec.split(":", 1)[1]
        try:
            with open(path, "r", encoding="utf-8") as fh:
                tokens = fh.read().replace(",", " ").split()
        except FileNotFoundError as exc:
            raise SchemaError(f"sequence file not found: {path}") from exc
        try:
            return FixedSequence(players=tuple(int(t) for t in tokens))
        except ValueError as exc:
            raise SchemaError(f"sequence file {path} has non-integer entries") from exc
    raise SchemaError(
        f"scheduler must be round_robin, random:SEED or file:SEQ, got {spec!r}"
    )


def _parse_start(spec: str, n: int) -> int:
    if spec == "all0":
        return 0
    if spec == "all1":
        return (1 << n) - 1
    try:
        x = int(spec, 16)
    except ValueError as exc:
        raise SchemaError(f"start must be all0, all1 or a hex mask, got {spec!r}") from exc
    if not 0 <= x < (1 << n):
        raise SchemaError(f"start mask {spec} out of range for n={n}")
    return x


def _write_trace_csv(path: str, trace: Trace):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "mover", "old", "new", "phi_num", "phi_den"])
        for step in trace.steps:
            writer.writerow(
                [step.t, step.mover, step.old, step.new,
                 step.potential.numerator, step.potential.denominator]
            )


def _real(x: float) -> str:
    return f"{x:.17g}"


# -- subcommands (each returns a JSON-able results dict) -----------------------

def cmd_gen(args) -> dict:
    if args.family == "clique":
        graph = make_clique(args.size, args.weight)
    elif args.family == "bipartite":
        graph = make_complete_bipartite(args.size, args.weight)
    elif args.family == "star":
        graph = make_star(args.size, args.weight)
    elif args.family == "gadget-chain":
        chain = make_gadget_chain(args.size, args.eps_last, args.ratio)
        graph = chain.graph
        if args.beliefs != "0.5":
            raise SchemaError("gadget-chain games require belief 0.5 for every player")
    else:
        raise SchemaError(f"unknown family {args.family!r}")
    game = opinion_game(graph, _parse_beliefs(args.beliefs, graph.n))
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(game.to_dict(), fh, indent=2)
        fh.write("\n")
    return {"n": graph.n, "edges": len(graph.edges), "written": args.out}


def cmd_nash(args) -> dict:
    game = _load_game(args.game)
    report = poa_pos(game)
    return {
        "nash_profiles": [f"{x:x}" for x in report.nash_profiles],
        "nash_count": len(report.nash_profiles),
        "greedy_fill0": f"{greedy_nash(game, 0):x}",
        "greedy_fill1": f"{greedy_nash(game, 1):x}",
    }


def cmd_poa_pos(args) -> dict:
    game = _load_game(args.game)
    return poa_pos(game).to_dict()


def cmd_cutwidth(args) -> dict:
    game = _load_game(args.game)
    result = cutwidth_exact(game.graph, n_limit=args.n_limit)
    return {
        "cutwidth": format_rational(result.value),
        "cutwidth_decimal": _real(float(result.value)),
        "ordering": list(result.ordering),
    }


def cmd_canonicalize(args) -> dict:
    game = _load_game(args.game)
    reduced = canonicalize_beliefs(game)
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(reduced.to_dict(), fh, indent=2)
        fh.write("\n")
    changed = sum(1 for a, b in zip(game.beliefs, reduced.beliefs) if a != b)
    return {"written": args.out, "beliefs_changed": changed}


def cmd_br_run(args) -> dict:
    game = _load_game(args.game)
    scheduler = _parse_scheduler(args.sched)
    start = _parse_start(args.start, game.n)
    trace = run_best_response(game, start, scheduler, max_steps=args.max_steps)
    if args.out:
        _write_trace_csv(args.out, trace)
    return {
        "start": f"{trace.start:x}",
        "final": f"{trace.final:x}",
        "flips": trace.flips,
        "converged": trace.converged,
        "final_potential": format_rational(game.potential(trace.final)),
    }


def cmd_br_expo(args) -> dict:
    chain = make_gadget_chain(args.gadgets, args.eps_last, args.ratio)
    schedule = adversarial_schedule(chain)
    game = opinion_game(chain.graph, Fraction(1, 2))
    trace = validate_schedule(game, schedule)
    if args.out:
        _write_trace_csv(args.out, trace)
    return {
        "players": chain.graph.n,
        "total_moves": schedule.total_moves,
        "cycle_counts": {str(g): list(c) for g, c in sorted(schedule.cycle_counts.items())},
        "moves_per_gadget": {
            str(g): schedule.moves_in_gadget(g) for g in range(1, chain.gadgets + 1)
        },
        "all_moves_strict": True,
    }


def cmd_spectral(args) -> dict:
    chain = LogitChain(_load_game(args.game), args.beta)
    spec = relaxation_time(chain)
    bounds = mixing_bounds_from_relaxation(chain)
    return {
        "beta": _real(args.beta),
        "t_rel": _real(spec.t_rel),
        "lambda_2": _real(spec.lambda_2),
        "lambda_min": _real(spec.lambda_min),
        "mixing_lower": _real(bounds.lower),
        "mixing_upper": _real(bounds.upper),
        "mixing_upper_surrogate": _real(bounds.surrogate_upper),
    }


def cmd_bottleneck(args) -> dict:
    chain = LogitChain(_load_game(args.game), args.beta)
    report = bottleneck_set(chain)
    out = report.to_dict()
    out["beta"] = _real(args.beta)
    return out


def cmd_couple_check(args) -> dict:
    game = _load_game(args.game)
    chain = LogitChain(game, args.beta)
    worst = contraction_check(chain)
    graph = game.graph
    w_max = graph.max_weight_scaled / graph.pow10
    threshold = 1.0 / (w_max * graph.max_degree) if graph.max_degree else math.inf
    bound = path_coupling_mixing_bound(chain, eps=args.eps, contraction=worst)
    return {
        "beta": _real(args.beta),
        "max_expected_distance": _real(worst),
        "contracts": worst < 1.0,
        "target": _real(math.exp(-1.0 / (3 * game.n))),
        "small_beta_threshold": _real(threshold),
        "mixing_upper_bound": None if bound is None else _real(bound),
    }


def cmd_logit_mix(args) -> dict:
    game = _load_game(args.game)
    chain = LogitChain(game, args.beta)
    t_mix = mixing_time_exact(chain, eps=args.eps)
    spec = relaxation_time(chain)
    bounds = mixing_bounds_from_relaxation(chain)
    report = bottleneck_set(chain)
    cw = cutwidth_exact(game.graph)
    return {
        "beta": _real(args.beta),
        "eps": _real(args.eps),
        "t_mix": t_mix,
        "t_rel": _real(spec.t_rel),
        "mixing_lower": _real(bounds.lower),
        "mixing_upper": _real(bounds.upper),
        "bottleneck_ratio": _real(report.ratio),
        "bottleneck_lower_bound": _real(report.mixing_lower_bound),
        "boundary_size": report.boundary_size,
        "cutwidth": format_rational(cw.value),
    }


def cmd_sweep(args) -> dict:
    game = _load_game(args.game)
    try:
        betas = [float(b) for b in args.beta.split(",") if b.strip()]
    except ValueError as exc:
        raise SchemaError(f"bad beta list {args.beta!r}") from exc
    if not betas:
        raise SchemaError("beta list is empty")
    cw = cutwidth_exact(game.graph)
    rows = []
    for beta in betas:
        chain = LogitChain(game, beta)
        t_mix = mixing_time_exact(chain, eps=args.eps)
        t_rel = relaxation_time(chain).t_rel
        lb = bottleneck_set(chain).mixing_lower_bound
        ub = congestion_upper_bound(chain, cw.ordering)
        rows.append([_real(beta), t_mix, _real(t_rel), _real(lb), _real(ub)])
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["beta", "t_mix", "t_rel", "lb_bottleneck", "ub_congestion"])
        writer.writerows(rows)
    return {"rows": len(rows), "written": args.out}


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="opiniondyn",
        description="binary opinion games: equilibria, dynamics, mixing analysis",
    )
    parser.add_argument("--report", help="write the full JSON report here")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a named game instance")
    p.add_argument("family", choices=["clique", "bipartite", "star", "gadget-chain"])
    p.add_argument("--size", type=int, required=True,
                   help="players / side size / leaves / widget count")
    p.add_argument("--weight", default="1", help="edge weight (decimal)")
    p.add_argument("--beliefs", default="0.5", help="single value or comma list")
    p.add_argument("--eps-last", default="1", help="innermost widget weight")
    p.add_argument("--ratio", type=int, default=9, help="widget weight ratio (> 8)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("nash", help="enumerate equilibria and run the greedy search")
    p.add_argument("--game", required=True)
    p.set_defaults(func=cmd_nash)

    p = sub.add_parser("poa-pos", help="price of anarchy / stability report")
    p.add_argument("--game", required=True)
    p.set_defaults(func=cmd_poa_pos)

    p = sub.add_parser("cutwidth", help="exact weighted cutwidth and ordering")
    p.add_argument("--game", required=True)
    p.add_argument("--n-limit", type=int, default=20)
    p.set_defaults(func=cmd_cutwidth)

    p = sub.add_parser("canonicalize", help="reduce beliefs to threshold midpoints")
    p.add_argument("--game", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_canonicalize)

    p = sub.add_parser("br-run", help="run best-response dynamics")
    p.add_argument("--game", required=True)
    p.add_argument("--sched", required=True, help="round_robin | random:SEED | file:SEQ")
    p.add_argument("--start", default="all0", help="all0 | all1 | hex mask")
    p.add_argument("--max-steps", type=int, default=10**6)
    p.add_argument("--out", help="trace CSV path")
    p.set_defaults(func=cmd_br_run)

    p = sub.add_parser("br-expo", help="adversarial widget schedule with validation")
    p.add_argument("--gadgets", type=int, required=True)
    p.add_argument("--eps-last", default="1")
    p.add_argument("--ratio", type=int, default=9)
    p.add_argument("--out", help="trace CSV path")
    p.set_defaults(func=cmd_br_expo)

    p = sub.add_parser("spectral", help="relaxation time and mixing sandwich")
    p.add_argument("--game", required=True)
    p.add_argument("--beta", type=float, required=True)
    p.set_defaults(func=cmd_spectral)

    p = sub.add_parser("bottleneck", help="bottleneck set and mixing lower bound")
    p.add_argument("--game", required=True)
    p.add_argument("--beta", type=float, required=True)
    p.set_defaults(func=cmd_bottleneck)

    p = sub.add_parser("couple-check", help="one-step coupling contraction check")
    p.add_argument("--game", required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--eps", type=float, default=0.25)
    p.set_defaults(func=cmd_couple_check)

    p = sub.add_parser("logit-mix", help="exact mixing time with all bounds")
    p.add_argument("--game", required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--eps", type=float, default=0.25)
    p.set_defaults(func=cmd_logit_mix)

    p = sub.add_parser("sweep", help="beta sweep to CSV")
    p.add_argument("--game", required=True)
    p.add_argument("--beta", required=True, help="comma-separated beta list")
    p.add_argument("--eps", type=float, default=0.25)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    config = {k: v for k, v in vars(args).items() if k not in ("func", "report")}
    started = time.perf_counter()
    try:
        results = args.func(args)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except LimitExceededError as exc:
        print(f"limit exceeded: {exc}", file=sys.stderr)
        return 3
    except InvariantError as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 4
    report = {
        "command": args.command,
        "config": config,
        "results": results,
        "wall_time_s": round(time.perf_counter() - started, 6),
        "version": __version__,
    }
    _write_json(args.report, report)
    return 0


if __name__ == "__main__":
    sys.exit(main())
