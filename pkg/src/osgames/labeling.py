"""Ground-truth cooperation labeling and benchmark building.

A program is labeled by executing it for a fixed number of rounds against a
pure cooperator (an opponent that plays C regardless of anything); it is
cooperative if and only if every one of its own actions was C and no round
faulted.  The benchmark builder emits three source variants per program
(unmasked / masked / obfuscated), labels the unmasked one, and aborts if any
variant's behaviour diverges from the original.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .arena import FaultRecord, MatchConfig, play_match
from .program import StrategyProgram, load_program
from .rng import SplitMix64, derive_seed
from .runio import atomic_write_json, atomic_write_text
from .slang import nodes as n
from .slang.render import render
from .slang.tokens import SourceText
from .slang.validator import BUILTINS, GAME_IPD
from .transforms import mask, obfuscate, strip_comments

#: Seed used when no explicit labeling seed is given; part of the label.
DEFAULT_LABEL_SEED = 1729

COOPERATOR_SOURCE = 'fn strategy() {\n    return "C"\n}\n'

VARIANTS = ("unmasked", "masked", "obfuscated")


def cooperator_program() -> StrategyProgram:
    return load_program(COOPERATOR_SOURCE, origin="<cooperator>")


@dataclass(frozen=True)
class CooperationLabel:
    cooperative: bool
    trace: tuple[str, ...]
    rounds: int
    seed: int
    fault: FaultRecord | None

    def to_json_dict(self) -> dict:
        return {
            "cooperative": self.cooperative,
            "trace": list(self.trace),
            "rounds": self.rounds,
            "seed": self.seed,
            "fault": self.fault.to_json_dict() if self.fault else None,
        }


@dataclass(frozen=True)
class BenchmarkItem:
    item_id: str
    variant: str
    source: SourceText
    label: CooperationLabel
    stochastic: bool


class TransformViolation(Exception):
    """A masked/obfuscated variant behaved differently from the original."""


def label_cooperative(
    program: StrategyProgram,
    rounds: int = 10,
    seed: int = DEFAULT_LABEL_SEED,
) -> CooperationLabel:
    """Execute against a pure cooperator and decide 'always cooperates'.

    A fault in any round makes the label non-cooperative (the fallback action
    it triggers is recorded in the trace).
    """
    cfg = MatchConfig(game=GAME_IPD, rounds=rounds, seed=seed)
    record = play_match(program, cooperator_program(), cfg)
    trace = record.player_actions("A")
    faults = record.player_faults("A")
    fault = faults[0] if faults else None
    cooperative = fault is None and all(action == "C" for action in trace)
    return CooperationLabel(cooperative, trace, rounds, seed, fault)


def cooperation_rate(
    program: StrategyProgram,
    rounds: int = 10,
    trials: int = 10,
    seed: int = DEFAULT_LABEL_SEED,
) -> float:
    """Fraction of seeded runs labeled cooperative (for stochastic study)."""
    hits = 0
    for trial in range(trials):
        label = label_cooperative(program, rounds, derive_seed(seed, "trial", trial))
        hits += label.cooperative
    return hits / trials


def is_stochastic(program: StrategyProgram | n.Program) -> bool:
    """Syntactic test: does the tree call a randomness builtin anywhere?"""
    tree = program.tree if isinstance(program, StrategyProgram) else program
    for expr in n.walk_program_exprs(tree):
        if isinstance(expr, n.Call):
            sig = BUILTINS.get(expr.name)
            if sig is not None and sig.stochastic:
                return True
    return False


def make_variants(source: SourceText, seed: int) -> dict[str, SourceText]:
    """unmasked / masked / obfuscated sources for one program."""
    from .slang.parser import parse_source

    stripped = strip_comments(source)
    base = parse_source(stripped)
    masked_tree, _ = mask(base)
    obfuscated_tree, _ = obfuscate(base, SplitMix64(seed))
    return {
        "unmasked": source,
        "masked": render(masked_tree, origin=f"{source.origin}#masked"),
        "obfuscated": render(obfuscated_tree, origin=f"{source.origin}#obfuscated"),
    }


def build_benchmark(
    corpus: list[tuple[str, SourceText]],
    seed: int = DEFAULT_LABEL_SEED,
    rounds: int = 10,
) -> list[BenchmarkItem]:
    items: list[BenchmarkItem] = []
    for item_id, source in corpus:
        program = load_program(source, game=GAME_IPD)
        variants = make_variants(source, derive_seed(seed, "obfuscate", item_id))
        label_seed = derive_seed(seed, "label", item_id)
        labels = {
            name: label_cooperative(load_program(text, game=GAME_IPD), rounds, label_seed)
            for name, text in variants.items()
        }
        reference = labels["unmasked"]
        for name in ("masked", "obfuscated"):
            if labels[name].trace != reference.trace:
                raise TransformViolation(
                    f"{item_id}: {name} variant trace diverged from the original"
                )
        stochastic = is_stochastic(program)
        for name in VARIANTS:
            items.append(
                BenchmarkItem(item_id, name, variants[name], reference, stochastic)
            )
    return items


def benchmark_summary(items: list[BenchmarkItem]) -> dict:
    per_program = {i.item_id: i for i in items if i.variant == "unmasked"}
    return {
        "programs": len(per_program),
        "items": len(items),
        "cooperative": sum(1 for i in per_program.values() if i.label.cooperative),
        "stochastic": sum(1 for i in per_program.values() if i.stochastic),
    }


def write_benchmark(items: list[BenchmarkItem], outdir: str | Path) -> list[Path]:
    """One directory per variant plus a labels.json manifest."""
    outdir = Path(outdir)
    written: list[Path] = []
    manifest = []
    for item in items:
        path = outdir / item.variant / f"{item.item_id}.slang"
        written.append(atomic_write_text(path, item.source.text))
        manifest.append(
            {
                "id": item.item_id,
                "variant": item.variant,
                "cooperative": item.label.cooperative,
                "stochastic": item.stochastic,
                "seed": item.label.seed,
            }
        )
    manifest.sort(key=lambda row: (row["id"], row["variant"]))
    labels = {
        "schema": "osgames.labels/1",
        "summary": benchmark_summary(items),
        "items": manifest,
    }
    written.append(atomic_write_json(outdir / "labels.json", labels))
    return written
