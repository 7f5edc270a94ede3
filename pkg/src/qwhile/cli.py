"""Command-line front door: run programs, compile to f-QASM, synthesize
unitaries, and reproduce the experiments.

Every randomized command prints the seed it used, so published numbers
are reproducible; identical command lines with identical seeds produce
byte-identical primary outputs. Exit code 0 means no error was
reported.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .errors import ParseError, QwhileError
from .lang import parse, validate_program
from .engine import match_distributions, prepare, run_distribution, run_shots
from .fqasm import compile_program, parse_fqasm, serialize, vm_distribution
from .synth import GateSet, phase_dist, reconstruct, synthesize
from . import experiments


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 1


def _load_program(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise QwhileError(f"{path}: {exc.strerror or exc}") from exc
    try:
        program = parse(text)
    except ParseError as exc:
        raise QwhileError(f"{path}: {exc}") from exc
    report = validate_program(program)
    if not report.ok:
        raise QwhileError(f"{path}: {report}")
    return program


def _write_or_print(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
        print(f"wrote {out}")
    else:
        print(text, end="" if text.endswith("\n") else "\n")


def _state_summary(mat: np.ndarray, limit: int = 16) -> list:
    if mat.shape[0] <= limit:
        return [[[round(z.real, 9), round(z.imag, 9)] for z in row] for row in mat]
    return [round(x, 9) for x in np.real(np.diag(mat)).tolist()]


# --- run ----------------------------------------------------------------------


def cmd_run(args) -> int:
    program = _load_program(args.file)
    plan = prepare(program)
    if args.mode == "distribution":
        dist = run_distribution(plan, mass_threshold=args.mass_threshold,
                                step_limit=args.step_limit)
        payload = {
            "file": args.file,
            "mode": "distribution",
            "terminals": [{"weight": round(w, 12), "state": _state_summary(s.matrix)}
                          for w, s in dist.terminals],
            "residual": dist.residual,
        }
        if args.format == "json":
            _write_or_print(json.dumps(payload, indent=2, sort_keys=True) + "\n", args.out)
        else:
            lines = [f"terminals: {len(dist.terminals)}  residual: {dist.residual:.3e}"]
            for w, s in dist.terminals:
                lines.append(f"  weight {w:.9f}  dim {s.dim}")
            _write_or_print("\n".join(lines) + "\n", args.out)
        return 0

    stats = run_shots(plan, args.shots, args.seed, step_limit=args.step_limit)
    if args.format == "json":
        payload = stats.to_json_dict()
        payload["file"] = args.file
        payload["mean_final_state"] = _state_summary(stats.mean_final_state.matrix)
        _write_or_print(json.dumps(payload, indent=2, sort_keys=True) + "\n", args.out)
    elif args.format == "csv":
        rows = ["kind,site,key,count"] + [f"{k},{s},{key},{c}"
                                          for k, s, key, c in stats.to_csv_rows()]
        _write_or_print("\n".join(rows) + "\n", args.out)
    else:
        lines = [f"shots: {stats.shots}  seed: {stats.seed}"]
        for sid, kind, label in stats.site_meta:
            counts = dict(sorted(stats.site_outcomes[sid].items()))
            lines.append(f"site {sid} ({label}): outcomes {counts}")
            if kind == "while":
                hist = dict(sorted(stats.loop_histogram[sid].items()))
                lines.append(f"  circles: {hist}")
                lines.append(f"  shots entering: {stats.shots_entering(sid)}"
                             f"  total entries: {stats.total_entries(sid)}")
        _write_or_print("\n".join(lines) + "\n", args.out)
    return 0


# --- compile ------------------------------------------------------------------


def cmd_compile(args) -> int:
    program = _load_program(args.file)
    compiled = compile_program(program)
    text = serialize(compiled)
    if args.check:
        lhs = run_distribution(program)
        rhs = vm_distribution(parse_fqasm(text))
        if not match_distributions(lhs, rhs):
            return _fail("cross-engine check failed: program and compiled "
                         "distributions disagree")
        print("check: program and compiled f-QASM agree in distribution mode")
    out = args.out or (str(Path(args.file).with_suffix(".fqasm")))
    _write_or_print(text, out)
    return 0


# --- synthesize -----------------------------------------------------------------


def _load_matrix(path: str) -> np.ndarray:
    """JSON 2-D array of [re, im] pairs."""
    data = json.loads(Path(path).read_text())
    try:
        mat = np.array([[complex(re, im) for re, im in row] for row in data])
    except (TypeError, ValueError) as exc:
        raise QwhileError(f"{path}: expected a 2-D array of [re, im] pairs") from exc
    return mat


def cmd_synthesize(args) -> int:
    u = _load_matrix(args.matrix)
    from .core.linalg import unitary_residual
    residual = unitary_residual(u)
    if residual > 1e-8:
        return _fail(f"input is not unitary (residual {residual:.3e})")
    seq = synthesize(u, method=args.method, epsilon=args.epsilon)
    n = int(np.log2(u.shape[0]))
    err = phase_dist(reconstruct(seq, max(n, 1)), u)
    report = {
        "method": args.method,
        "epsilon": args.epsilon,
        "gates": len(seq.ops),
        "gate_counts": seq.gate_counts,
        "eps_total": seq.eps_total,
        "reconstruction_error": err,
    }
    lines = [f"{op.name} " + " ".join(f"q{q}" for q in op.qubits) for op in seq.ops]
    body = "\n".join(lines) + "\n"
    if args.format == "json":
        payload = dict(report)
        payload["sequence"] = [[op.name, list(op.qubits)] for op in seq.ops]
        _write_or_print(json.dumps(payload, indent=2, sort_keys=True) + "\n", args.out)
    else:
        _write_or_print(body, args.out)
        print(json.dumps(report, indent=2, sort_keys=True))
    return 0


# --- experiment -----------------------------------------------------------------


def cmd_experiment(args) -> int:
    name = args.name
    if name == "qloop":
        result = experiments.qloop_run(args.shots, args.seed)
        print(json.dumps(result.to_json_dict(), indent=2, sort_keys=True))
        return 0
    if name == "bb84":
        from .engine.sampler import splitmix64
        channel = experiments.paper_channels()[args.channel]
        wins = 0
        for k in range(args.sessions):
            t = experiments.bb84_run(experiments.BB84Session(
                args.n, channel, args.fraction, seed=splitmix64(args.seed, k)))
            wins += 1 if t.verdict else 0
        print(json.dumps({"channel": args.channel, "n": args.n,
                          "fraction": args.fraction, "sessions": args.sessions,
                          "seed": args.seed, "successes": wins},
                         indent=2, sort_keys=True))
        return 0
    if name == "bb84-multi":
        transcripts = experiments.bb84_multi_client(args.clients, args.n, args.seed)
        print(json.dumps({
            "clients": args.clients, "n": args.n, "seed": args.seed,
            "verdicts": [t.verdict for t in transcripts],
            "sifted_lengths": [t.sifted_length for t in transcripts],
        }, indent=2, sort_keys=True))
        return 0
    if name == "bb84-sweep":
        cells = experiments.bb84_channel_sweep(sessions=args.sessions, seed=args.seed)
        csv = experiments.sweep_csv(cells)
        _write_or_print(csv, args.out)
        return 0
    if name == "grover":
        spec = experiments.GroverSpec(args.n, tuple(args.targets))
        result = experiments.grover_run(spec, args.mode, seed=args.seed)
        print(json.dumps({
            "n_qubits": args.n, "targets": sorted(args.targets),
            "mode": args.mode, "seed": args.seed,
            "rounds": [{"oracle_calls": r.oracle_calls, "measured": r.measured,
                        "correct": r.correct,
                        "success_probability": round(r.success_probability, 9)}
                       for r in result.rounds],
            "found": result.found,
            "oracle_calls_total": result.oracle_calls_total,
        }, indent=2, sort_keys=True))
        return 0
    return _fail(f"unknown experiment {name!r}")


# --- argument wiring --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="qwhile",
                                  description="quantum while-language toolchain")
    sub = top.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a .qw program")
    run.add_argument("file")
    run.add_argument("--shots", type=int, default=1)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--mode", choices=("sampled", "distribution"), default="sampled")
    run.add_argument("--format", choices=("text", "json", "csv"), default="text")
    run.add_argument("--step-limit", type=int, default=10**6)
    run.add_argument("--mass-threshold", type=float, default=1e-6)
    run.add_argument("--out")
    run.set_defaults(func=cmd_run)

    comp = sub.add_parser("compile", help="compile a .qw program to f-QASM")
    comp.add_argument("file")
    comp.add_argument("--out")
    comp.add_argument("--check", action="store_true",
                      help="verify compiled output against the interpreter")
    comp.set_defaults(func=cmd_compile)

    syn = sub.add_parser("synthesize", help="decompose a unitary into basic gates")
    syn.add_argument("matrix", help="JSON file: 2-D array of [re, im] pairs")
    syn.add_argument("--method", choices=("qr", "qsd"), default="qsd")
    syn.add_argument("--epsilon", type=float, default=1e-3)
    syn.add_argument("--format", choices=("text", "json"), default="text")
    syn.add_argument("--out")
    syn.set_defaults(func=cmd_synthesize)

    exp = sub.add_parser("experiment", help="run a built-in experiment")
    exp.add_argument("name", choices=("qloop", "bb84", "bb84-multi", "bb84-sweep", "grover"))
    exp.add_argument("--shots", type=int, default=100_000)
    exp.add_argument("--seed", type=int, default=0)
    exp.add_argument("--n", type=int, default=1024, help="raw key length / qubit count")
    exp.add_argument("--channel", default="identity")
    exp.add_argument("--fraction", type=float, default=0.2)
    exp.add_argument("--sessions", type=int, default=100)
    exp.add_argument("--clients", type=int, default=8)
    exp.add_argument("--targets", type=int, nargs="+", default=[5])
    exp.add_argument("--mode", choices=("single", "multi"), default="single")
    exp.add_argument("--out")
    exp.set_defaults(func=cmd_experiment)
    return top


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except QwhileError as exc:
        return _fail(str(exc))


if __name__ == "__main__":
    sys.exit(main())
