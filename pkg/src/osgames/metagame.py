"""The repeated open-source game: providers submit a program each meta-round,
the programs play a base-game match, and everybody observes the outcome.

Providers see the opponent's source from the previous meta-round only, while
the submitted programs read each other's current source during the match —
both views are intentional and recorded.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .arena import MatchConfig, MatchRecord, play_match
from .program import ProgramError, load_program
from .providers import ProposalContext, Provider, ProviderError
from .rng import RNG_ALGORITHM, derive_seed

SCHEMA_META = "osgames.meta/1"

#: The five strategic-adaptation features an external judge may attach to a
#: meta-round.  The engine only records them; nothing in here produces them.
JUDGE_FEATURES = (
    "independent_development",
    "exploitation_attempt",
    "counter_measure",
    "direct_imitation",
    "feint",
)


@dataclass(frozen=True)
class MetaRound:
    meta_round: int  # 1-based
    sources: tuple[str, str]
    opponent_previous: tuple[str | None, str | None]  # what each provider saw
    provider_faults: tuple[str, ...]
    match: MatchRecord
    judge_labels: dict | None = None

    def to_json_dict(self) -> dict:
        return {
            "meta_round": self.meta_round,
            "sources": list(self.sources),
            "opponent_previous": list(self.opponent_previous),
            "provider_faults": list(self.provider_faults),
            "match": self.match.to_json_dict(),
            "judge_labels": self.judge_labels,
        }


@dataclass(frozen=True)
class MetaGameRecord:
    config: MatchConfig
    meta_rounds: int
    providers: tuple[dict, dict]
    rounds: tuple[MetaRound, ...]

    def totals(self) -> tuple[int, int]:
        a = sum(r.match.totals[0] for r in self.rounds)
        b = sum(r.match.totals[1] for r in self.rounds)
        return a, b

    def to_json_dict(self) -> dict:
        return {
            "schema": SCHEMA_META,
            "rng_algorithm": RNG_ALGORITHM,
            "config": self.config.to_json_dict(),
            "meta_rounds": self.meta_rounds,
            "providers": list(self.providers),
            "rounds": [r.to_json_dict() for r in self.rounds],
            "totals": list(self.totals()),
        }


class MetaGameError(Exception):
    pass


def _history_for(rounds: list[MetaRound], me: int) -> list[dict]:
    """Meta-history from one provider's perspective."""
    opp = 1 - me
    out = []
    for r in rounds:
        out.append(
            {
                "meta_round": r.meta_round,
                "my_source": r.sources[me],
                "opponent_source": r.sources[opp],
                "my_total": r.match.totals[me],
                "opponent_total": r.match.totals[opp],
                "my_actions": list(r.match.player_actions("AB"[me])),
                "opponent_actions": list(r.match.player_actions("AB"[opp])),
            }
        )
    return out


def run_meta_game(
    prov_a: Provider,
    prov_b: Provider,
    meta_rounds: int = 10,
    cfg: MatchConfig = MatchConfig(),
) -> MetaGameRecord:
    """Run the full meta-game.

    A provider that fails or submits an invalid program has its previous
    source reused (recorded as a provider fault); in meta-round 1 there is
    nothing to reuse and the run aborts.
    """
    if meta_rounds < 1:
        raise MetaGameError("meta_rounds must be at least 1")
    providers = (prov_a, prov_b)
    started: list[Provider] = []
    try:
        for p in providers:
            p.start(cfg.game)
            started.append(p)
    except BaseException:
        for p in started:
            p.close()
        raise
    rounds: list[MetaRound] = []
    previous_sources: list[str | None] = [None, None]
    try:
        for k in range(1, meta_rounds + 1):
            sources: list[str] = []
            faults: list[str] = []
            seen_previous: list[str | None] = [None, None]
            for me, provider in enumerate(providers):
                opp_prev = previous_sources[1 - me]
                seen_previous[me] = opp_prev
                ctx = ProposalContext(
                    game=cfg.game,
                    meta_round=k,
                    history=_history_for(rounds, me),
                    opponent_previous_source=opp_prev,
                )
                source = None
                try:
                    text = provider.propose(ctx)
                    load_program(text, origin=f"{provider.provider_id}@r{k}", game=cfg.game)
                    source = text
                except (ProviderError, ProgramError) as exc:
                    if previous_sources[me] is None:
                        raise MetaGameError(
                            f"provider {provider.provider_id} failed in meta-round 1: {exc}"
                        ) from exc
                    faults.append(
                        f"{provider.provider_id}: {exc}; reusing previous source"
                    )
                    source = previous_sources[me]
                sources.append(source)
            pa = load_program(sources[0], origin=f"{prov_a.provider_id}@r{k}", game=cfg.game)
            pb = load_program(sources[1], origin=f"{prov_b.provider_id}@r{k}", game=cfg.game)
            match_cfg = replace(cfg, seed=derive_seed(cfg.seed, "meta", k))
            match = play_match(pa, pb, match_cfg)
            rounds.append(
                MetaRound(
                    k,
                    (sources[0], sources[1]),
                    (seen_previous[0], seen_previous[1]),
                    tuple(faults),
                    match,
                )
            )
            previous_sources = [sources[0], sources[1]]
    finally:
        for p in providers:
            p.close()
    return MetaGameRecord(
        cfg,
        meta_rounds,
        (prov_a.describe(), prov_b.describe()),
        tuple(rounds),
    )


def merge_judge_labels(record: MetaGameRecord, sidecar: list[dict]) -> MetaGameRecord:
    """Attach externally produced judge labels to their meta-rounds.

    Sidecar entries: {"meta_round": k, "player": "a"|"b",
    "labels": {feature: bool}}; unknown features are rejected.
    """
    by_round: dict[int, dict] = {}
    for entry in sidecar:
        k = int(entry["meta_round"])
        player = entry["player"].lower()
        if player not in ("a", "b"):
            raise MetaGameError(f"bad judge player {entry['player']!r}")
        labels = entry["labels"]
        for feature in labels:
            if feature not in JUDGE_FEATURES:
                raise MetaGameError(f"unknown judge feature {feature!r}")
        by_round.setdefault(k, {})[player] = dict(labels)
    rounds = tuple(
        replace(r, judge_labels=by_round.get(r.meta_round, r.judge_labels))
        for r in record.rounds
    )
    return replace(record, rounds=rounds)
