"""Command-line surface for the engine.

Subcommands: match, meta, label, metrics, transform, tournament, evolve,
flow.  Every command that takes --seed is bit-reproducible; persistent
outputs are canonical JSON/CSV written atomically.  Exit codes: 0 success,
1 completed with domain faults (runtime faults in a match, unlabelable
corpus files), 2 usage or input errors.

A --config JSON file may hold any of a command's long options (flags given
on the command line win); OSGAMES_OUT_DIR provides the default base
directory for relative output paths.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, evolution, labeling, metrics as metrics_mod
from .arena import ArenaError, MatchConfig, play_match, round_robin
from .metagame import MetaGameError, merge_judge_labels, run_meta_game
from .program import ProgramError, load_program, load_program_file
from .providers import ProviderError, provider_from_spec
from .rng import SplitMix64
from .runio import atomic_write_json, atomic_write_text, write_manifest
from .runtime import Budget
from .slang import parse_source, render
from .slang.validator import GAME_IPD, GAMES
from .transforms import mask, obfuscate, strip_comments

OUT_DIR_ENV = "OSGAMES_OUT_DIR"

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2


class CliError(Exception):
    """Input or usage problem; maps to exit code 2."""


def _out_path(arg: str | None, default_name: str) -> Path:
    base = Path(os.environ.get(OUT_DIR_ENV, "."))
    if arg is None:
        return base / default_name
    path = Path(arg)
    return path if path.is_absolute() else base / path


def _load_programs(paths: list[str], game: str):
    programs = []
    for path in paths:
        try:
            programs.append(load_program_file(path, game=game))
        except ProgramError as exc:
            raise CliError(str(exc)) from exc
    return programs


def _payoffs_from(arg: str | None):
    from .games import PayoffParams

    if arg is None:
        return PayoffParams()
    try:
        t, r, p, s = (int(v) for v in arg.split(","))
        return PayoffParams(t, r, p, s)
    except ValueError as exc:
        raise CliError(f"bad --payoffs {arg!r}: {exc}") from exc


def _match_config(args) -> MatchConfig:
    rounds = args.rounds
    if args.game == "coin" and getattr(args, "steps", None) is not None:
        rounds = args.steps
    try:
        return MatchConfig(
            game=args.game,
            rounds=rounds,
            payoffs=_payoffs_from(getattr(args, "payoffs", None)),
            budget=Budget(step_limit=args.step_limit),
            fallback=getattr(args, "fallback", None),
            seed=args.seed,
            board_size=getattr(args, "board_size", 3),
        )
    except ValueError as exc:
        raise CliError(str(exc)) from exc


# --------------------------------------------------------------------------
# subcommands


def cmd_match(args) -> int:
    pa, pb = _load_programs([args.program_a, args.program_b], args.game)
    record = play_match(pa, pb, _match_config(args))
    print(f"A {pa.origin}: {record.totals[0]}")
    print(f"B {pb.origin}: {record.totals[1]}")
    if record.faults:
        print(f"faults: {len(record.faults)}")
    path = _out_path(args.out, "match.json")
    atomic_write_json(path, record.to_json_dict())
    print(f"record: {path}")
    return EXIT_DOMAIN if record.faults else EXIT_OK


def cmd_meta(args) -> int:
    try:
        spec = json.loads(Path(args.providers).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read providers config {args.providers}: {exc}") from exc
    if not isinstance(spec, dict) or "a" not in spec or "b" not in spec:
        raise CliError("providers config must name providers 'a' and 'b'")
    sidecar = None
    if args.judge_labels:
        try:
            sidecar = json.loads(Path(args.judge_labels).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise CliError(f"cannot read judge labels: {exc}") from exc
    outdir = _out_path(args.out, "meta_run")
    base_cfg = _match_config(args)
    artifacts = []
    for i in range(args.seeds):
        seed = args.seed + i
        try:
            prov_a = provider_from_spec(spec["a"], "a")
            prov_b = provider_from_spec(spec["b"], "b")
        except (ProviderError, OSError) as exc:
            raise CliError(str(exc)) from exc
        cfg = MatchConfig(
            game=base_cfg.game,
            rounds=base_cfg.rounds,
            payoffs=base_cfg.payoffs,
            budget=base_cfg.budget,
            fallback=base_cfg.fallback,
            seed=seed,
            board_size=base_cfg.board_size,
        )
        try:
            record = run_meta_game(prov_a, prov_b, args.meta_rounds, cfg)
        except (MetaGameError, ProviderError) as exc:
            raise CliError(str(exc)) from exc
        if sidecar is not None:
            entries = [
                e for e in sidecar if "seed" not in e or int(e["seed"]) == seed
            ]
            record = merge_judge_labels(record, entries)
        path = outdir / f"meta_seed{seed}.json"
        atomic_write_json(path, record.to_json_dict())
        artifacts.append(path)
        totals = record.totals()
        print(f"seed {seed}: A={totals[0]} B={totals[1]}")
    write_manifest(
        outdir,
        "meta",
        {
            "providers": str(args.providers),
            "game": args.game,
            "rounds": base_cfg.rounds,
            "meta_rounds": args.meta_rounds,
            "seed": args.seed,
            "seeds": args.seeds,
        },
        [args.providers],
        artifacts,
        __version__,
    )
    print(f"records: {outdir}")
    return EXIT_OK


def _label_one(path_str: str, rounds: int, seed: int, trials: int | None):
    """Worker for --jobs; returns (name, payload | None, error | None)."""
    path = Path(path_str)
    try:
        program = load_program_file(path, game=GAME_IPD)
    except ProgramError as exc:
        return path.stem, None, str(exc)
    label = labeling.label_cooperative(program, rounds, seed)
    payload = {
        "id": path.stem,
        "cooperative": label.cooperative,
        "stochastic": labeling.is_stochastic(program),
        "trace": list(label.trace),
        "rounds": label.rounds,
        "seed": label.seed,
        "fault": label.fault.to_json_dict() if label.fault else None,
    }
    if trials:
        payload["cooperation_rate"] = labeling.cooperation_rate(
            program, rounds, trials, seed
        )
    return path.stem, payload, None


def cmd_label(args) -> int:
    corpus_dir = Path(args.corpus)
    if not corpus_dir.is_dir():
        raise CliError(f"corpus directory not found: {corpus_dir}")
    files = sorted(corpus_dir.glob("*.slang"))
    jobs = [(str(p), args.rounds, args.seed, args.trials) for p in files]
    if args.jobs > 1 and jobs:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_label_one, *zip(*jobs)))
    else:
        results = [_label_one(*job) for job in jobs]

    rows, bad = [], []
    for name, payload, error in results:
        if error is not None:
            print(f"error: {error}", file=sys.stderr)
            bad.append(name)
        else:
            rows.append(payload)

    if args.variants:
        from .slang.tokens import SourceText

        corpus = []
        for path in files:
            if path.stem not in bad:
                corpus.append(
                    (path.stem, SourceText(path.read_text(encoding="utf-8"), str(path)))
                )
        items = labeling.build_benchmark(corpus, seed=args.seed, rounds=args.rounds)
        outdir = _out_path(args.out, "benchmark")
        written = labeling.write_benchmark(items, outdir)
        write_manifest(
            outdir,
            "label",
            {"corpus": str(corpus_dir), "rounds": args.rounds, "seed": args.seed,
             "variants": True},
            [str(p) for p in files if p.stem not in bad],
            written,
            __version__,
        )
        print(f"benchmark: {outdir} ({len(written)} files)")
    else:
        out = _out_path(args.out, "labels.json")
        summary = {
            "programs": len(rows),
            "cooperative": sum(1 for r in rows if r["cooperative"]),
            "stochastic": sum(1 for r in rows if r["stochastic"]),
            "errors": len(bad),
        }
        atomic_write_json(
            out, {"schema": "osgames.labels/1", "summary": summary, "items": rows}
        )
        print(
            f"labeled {summary['programs']} programs "
            f"({summary['cooperative']} cooperative, {summary['stochastic']} stochastic)"
            + (f", {len(bad)} failed" if bad else "")
        )
        print(f"labels: {out}")
    return EXIT_DOMAIN if bad else EXIT_OK


def cmd_metrics(args) -> int:
    try:
        program = load_program_file(args.program, game=None)
    except ProgramError as exc:
        raise CliError(str(exc)) from exc
    report = metrics_mod.collect(program.tree).to_flat_dict()
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(report), lineterminator="\n")
        writer.writeheader()
        writer.writerow(report)
        print(buf.getvalue(), end="")
    else:
        print(json.dumps(report, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_transform(args) -> int:
    path = Path(args.program)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror or exc}") from exc
    from .slang import LexError, ParseError
    from .slang.tokens import SourceText

    src = SourceText(text, origin=str(path))
    try:
        if args.kind == "strip":
            out_text = strip_comments(src).text
        else:
            tree = parse_source(strip_comments(src))
            if args.kind == "mask":
                renamed, _ = mask(tree)
            else:
                renamed, _ = obfuscate(tree, SplitMix64(args.seed))
            out_text = render(renamed).text
    except (LexError, ParseError) as exc:
        raise CliError(f"{path}: {exc}") from exc
    if args.out:
        out = _out_path(args.out, f"{path.stem}.{args.kind}.slang")
        atomic_write_text(out, out_text)
        print(f"wrote {out}")
    else:
        print(out_text, end="")
    return EXIT_OK


def cmd_tournament(args) -> int:
    programs = _load_programs(args.programs, args.game)
    entries = [(Path(p).stem, prog) for p, prog in zip(args.programs, programs)]
    try:
        table = round_robin(entries, _match_config(args), args.reps, jobs=args.jobs)
    except ArenaError as exc:
        raise CliError(str(exc)) from exc
    width = max(len(t) for t in table.tags) + 2
    header = " " * width + "".join(f"{t:>{width}}" for t in table.tags)
    print(header)
    for tag, row in zip(table.tags, table.means):
        print(f"{tag:<{width}}" + "".join(f"{v:>{width}.2f}" for v in row))
    if args.out is not None:
        path = _out_path(args.out, "tournament.json")
        atomic_write_json(path, table.to_json_dict())
        print(f"table: {path}")
    return EXIT_OK


def _matrix_from_args(args) -> evolution.PayoffMatrix:
    if args.matrix is not None:
        try:
            obj = json.loads(Path(args.matrix).read_text(encoding="utf-8"))
            return evolution.PayoffMatrix.from_json_dict(obj)
        except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
            raise CliError(f"bad matrix file {args.matrix}: {exc}") from exc
    if not args.programs:
        raise CliError("give either --matrix FILE or program files")
    programs = _load_programs(args.programs, args.game)
    entries = [(Path(p).stem, prog) for p, prog in zip(args.programs, programs)]
    try:
        return evolution.estimate_payoff_matrix(entries, _match_config(args), args.reps)
    except ArenaError as exc:
        raise CliError(str(exc)) from exc


def _parse_x0(arg: str | None, size: int) -> np.ndarray:
    if arg is None:
        return np.full(size, 1.0 / size)
    try:
        values = np.array([float(v) for v in arg.split(",")], dtype=float)
    except ValueError as exc:
        raise CliError(f"bad --x0 {arg!r}") from exc
    if values.shape != (size,) or np.any(values < 0) or abs(values.sum() - 1) > 1e-9:
        raise CliError(f"--x0 must be {size} non-negative values summing to 1")
    return values


def _write_csv(path: Path, header: list[str], rows: list[list[float]]) -> Path:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return atomic_write_text(path, buf.getvalue())


def cmd_evolve(args) -> int:
    matrix = _matrix_from_args(args)
    x0 = _parse_x0(args.x0, matrix.size)
    trajectory = evolution.integrate(matrix, x0, dt=args.dt, steps=args.steps)
    outdir = _out_path(args.out, "evolve_run")
    artifacts = [atomic_write_json(outdir / "payoff_matrix.json", matrix.to_json_dict())]
    artifacts.append(
        _write_csv(
            outdir / "trajectory.csv",
            ["t"] + [f"x_{t}" for t in matrix.tags],
            evolution.trajectory_rows(trajectory),
        )
    )
    if matrix.size <= 3:
        report = evolution.fixed_points(matrix, tol=args.tol)
        artifacts.append(
            atomic_write_json(outdir / "fixed_points.json", report.to_json_dict())
        )
    if matrix.size == 3:
        samples = evolution.flow_field(matrix, args.resolution)
        artifacts.append(
            _write_csv(
                outdir / "flow.csv",
                [f"x_{t}" for t in matrix.tags]
                + [f"dx_{t}" for t in matrix.tags]
                + ["strength"],
                evolution.flow_rows(samples),
            )
        )
    write_manifest(
        outdir,
        "evolve",
        {
            "matrix": args.matrix,
            "programs": list(args.programs or ()),
            "game": args.game,
            "rounds": args.rounds,
            "reps": args.reps,
            "seed": args.seed,
            "x0": [float(v) for v in x0],
            "dt": args.dt,
            "steps": args.steps,
            "tol": args.tol,
            "resolution": args.resolution,
        },
        [p for p in (args.matrix, *(args.programs or ())) if p],
        artifacts,
        __version__,
    )
    final = trajectory.final
    summary = ", ".join(f"{t}={v:.4f}" for t, v in zip(matrix.tags, final))
    print(f"final population: {summary}")
    print(f"outputs: {outdir}")
    return EXIT_OK


def cmd_flow(args) -> int:
    matrix = _matrix_from_args(args)
    if matrix.size != 3:
        raise CliError("flow fields are only defined for exactly 3 types")
    samples = evolution.flow_field(matrix, args.resolution)
    header = (
        [f"x_{t}" for t in matrix.tags]
        + [f"dx_{t}" for t in matrix.tags]
        + ["strength"]
    )
    rows = evolution.flow_rows(samples)
    if args.out is not None:
        path = _out_path(args.out, "flow.csv")
        _write_csv(path, header, rows)
        print(f"flow field: {path} ({len(rows)} samples)")
    else:
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    return EXIT_OK


# --------------------------------------------------------------------------
# parser


def _add_match_options(p, game_default: str = GAME_IPD, rounds_default: int = 10):
    p.add_argument("--game", choices=GAMES, default=game_default)
    p.add_argument("--rounds", type=int, default=rounds_default,
                   help="base-game rounds (coin: steps)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--step-limit", type=int, default=Budget().step_limit,
                   help="interpreter step budget per invocation")
    p.add_argument("--config", help="JSON file of option defaults")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="osgames",
        description="Engine and analysis toolkit for open-source (program) games.",
    )
    parser.add_argument("--version", action="version", version=f"osgames {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    registry: dict[str, argparse.ArgumentParser] = {}

    p = sub.add_parser("match", help="play one match between two programs")
    p.add_argument("program_a")
    p.add_argument("program_b")
    _add_match_options(p)
    p.add_argument("--steps", type=int, help="coin game steps (alias for --rounds)")
    p.add_argument("--payoffs", help="T,R,P,S override (default 5,3,1,0)")
    p.add_argument("--fallback", help="action substituted on a runtime fault")
    p.add_argument("--board-size", type=int, default=3)
    p.add_argument("--out", help="match record path (default match.json)")
    p.set_defaults(func=cmd_match)
    registry["match"] = p

    p = sub.add_parser("meta", help="run a repeated open-source game")
    p.add_argument("providers", help="JSON config naming providers 'a' and 'b'")
    _add_match_options(p)
    p.add_argument("--steps", type=int, help="coin game steps (alias for --rounds)")
    p.add_argument("--payoffs")
    p.add_argument("--fallback")
    p.add_argument("--board-size", type=int, default=3)
    p.add_argument("--meta-rounds", type=int, default=10)
    p.add_argument("--seeds", type=int, default=1,
                   help="number of independent runs (seed, seed+1, ...)")
    p.add_argument("--judge-labels", help="sidecar JSON of judge feature labels")
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=cmd_meta)
    registry["meta"] = p

    p = sub.add_parser("label", help="label a corpus of programs for cooperation")
    p.add_argument("corpus", help="directory of .slang files")
    p.add_argument("--rounds", type=int, default=10)
    p.add_argument("--seed", type=int, default=labeling.DEFAULT_LABEL_SEED)
    p.add_argument("--trials", type=int,
                   help="additionally report the cooperative fraction over k seeds")
    p.add_argument("--variants", action="store_true",
                   help="emit unmasked/masked/obfuscated benchmark directories")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out")
    p.add_argument("--config", help="JSON file of option defaults")
    p.set_defaults(func=cmd_label)
    registry["label"] = p

    p = sub.add_parser("metrics", help="print complexity and taint metrics")
    p.add_argument("program")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_metrics)
    registry["metrics"] = p

    p = sub.add_parser("transform", help="strip, mask or obfuscate a program")
    p.add_argument("kind", choices=("strip", "mask", "obfuscate"))
    p.add_argument("program")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_transform)
    registry["transform"] = p

    p = sub.add_parser("tournament", help="round-robin mean-payoff table")
    p.add_argument("programs", nargs="+")
    _add_match_options(p)
    p.add_argument("--payoffs")
    p.add_argument("--board-size", type=int, default=3)
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_tournament)
    registry["tournament"] = p

    p = sub.add_parser("evolve", help="replicator dynamics from a matrix or programs")
    p.add_argument("programs", nargs="*")
    p.add_argument("--matrix", help="payoff matrix JSON file")
    _add_match_options(p, rounds_default=evolution.EVOLUTION_ROUNDS)
    p.add_argument("--payoffs")
    p.add_argument("--board-size", type=int, default=3)
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--x0", help="start population a,b,c (default uniform)")
    p.add_argument("--dt", type=float, default=0.01)
    p.add_argument("--steps", type=int, default=20_000)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--resolution", type=int, default=20)
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=cmd_evolve)
    registry["evolve"] = p

    p = sub.add_parser("flow", help="export a replicator flow field as CSV")
    p.add_argument("programs", nargs="*")
    p.add_argument("--matrix")
    _add_match_options(p, rounds_default=evolution.EVOLUTION_ROUNDS)
    p.add_argument("--payoffs")
    p.add_argument("--board-size", type=int, default=3)
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--resolution", type=int, default=20)
    p.add_argument("--out")
    p.set_defaults(func=cmd_flow)
    registry["flow"] = p

    parser.set_defaults(_registry=registry)
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    config_path = getattr(args, "config", None)
    if config_path:
        try:
            config = json.loads(Path(config_path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            print(f"error: cannot read config {config_path}: {exc}", file=sys.stderr)
            return EXIT_USAGE
        subparser = args._registry[args.command]
        known = {a.dest for a in subparser._actions}
        defaults = {}
        for key, value in config.items():
            dest = key.replace("-", "_")
            if dest not in known:
                print(f"error: unknown config option {key!r}", file=sys.stderr)
                return EXIT_USAGE
            defaults[dest] = value
        subparser.set_defaults(**defaults)
        args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ProgramError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
