from __future__ import annotations

import json
import sys
from pathlib import Path

import pytest

from osgames.arena import MatchConfig
from osgames.metagame import (
    JUDGE_FEATURES,
    MetaGameError,
    merge_judge_labels,
    run_meta_game,
)
from osgames.providers import ExternalProvider, ScriptedProvider, StaticProvider
from osgames.runio import canonical_json_bytes

AGENTS = Path(__file__).parent / "agents"

ALLC = 'fn strategy() {\n    return "C"\n}\n'
ALLD = 'fn strategy() {\n    return "D"\n}\n'
TFT = """fn strategy() {
    if len(my_history) == 0 {
        return "C"
    }
    if opp_history[-1] == "D" {
        return "D"
    }
    return "C"
}
"""


def test_two_static_tft_providers():
    record = run_meta_game(
        StaticProvider("a", source=TFT),
        StaticProvider("b", source=TFT),
        meta_rounds=10,
        cfg=MatchConfig(rounds=10, seed=0),
    )
    assert len(record.rounds) == 10
    for r in record.rounds:
        assert r.match.totals == (30, 30)
    assert record.totals() == (300, 300)
    # all ten matches identical
    first = record.rounds[0].match.actions
    assert all(r.match.actions == first for r in record.rounds)


def test_scripted_switch_shifts_totals():
    # AllC until meta-round 4, AllD from meta-round 5, against static TFT:
    # rounds 1-4 give (30, 30); from round 5 the defector earns 14 vs 9.
    record = run_meta_game(
        ScriptedProvider("a", schedule=[(1, ALLC), (5, ALLD)]),
        StaticProvider("b", source=TFT),
        meta_rounds=10,
        cfg=MatchConfig(rounds=10, seed=0),
    )
    per_round = [r.match.totals for r in record.rounds]
    assert per_round[:4] == [(30, 30)] * 4
    assert per_round[4:] == [(14, 9)] * 6


def test_providers_see_previous_round_source_only():
    record = run_meta_game(
        ScriptedProvider("a", schedule=[(1, ALLC), (2, ALLD)]),
        StaticProvider("b", source=TFT),
        meta_rounds=3,
        cfg=MatchConfig(rounds=10, seed=0),
    )
    # meta-round 1: nobody saw anything
    assert record.rounds[0].opponent_previous == (None, None)
    # meta-round 2: each side saw the round-1 submission of the other
    assert record.rounds[1].opponent_previous == (TFT, ALLC)
    assert record.rounds[2].opponent_previous == (TFT, ALLD)


def test_meta_history_monotonicity():
    seen = []

    class Spy(StaticProvider):
        def propose(self, ctx):
            seen.append((ctx.meta_round, len(ctx.history)))
            return super().propose(ctx)

    run_meta_game(
        Spy("a", source=ALLC),
        StaticProvider("b", source=ALLC),
        meta_rounds=4,
        cfg=MatchConfig(rounds=10, seed=0),
    )
    assert seen == [(1, 0), (2, 1), (3, 2), (4, 3)]


def test_invalid_source_reuses_previous():
    class Flaky(StaticProvider):
        def propose(self, ctx):
            if ctx.meta_round == 2:
                return "fn nope("  # parse error
            return super().propose(ctx)

    record = run_meta_game(
        Flaky("a", source=ALLC),
        StaticProvider("b", source=ALLC),
        meta_rounds=3,
        cfg=MatchConfig(rounds=10, seed=0),
    )
    assert record.rounds[1].provider_faults  # fault recorded
    assert record.rounds[1].sources[0] == ALLC  # previous source reused
    assert record.rounds[1].match.totals == (30, 30)


def test_round_one_failure_aborts():
    class Broken(StaticProvider):
        def propose(self, ctx):
            return "fn nope("

    with pytest.raises(MetaGameError):
        run_meta_game(
            Broken("a", source=ALLC),
            StaticProvider("b", source=ALLC),
            meta_rounds=2,
            cfg=MatchConfig(rounds=10, seed=0),
        )


def test_external_loopback_equals_static():
    cfg = MatchConfig(rounds=10, seed=4)
    external = run_meta_game(
        ExternalProvider(
            "a", command=[sys.executable, str(AGENTS / "allc_agent.py")], timeout=20
        ),
        StaticProvider("b", source=TFT),
        meta_rounds=3,
        cfg=cfg,
    )
    static = run_meta_game(
        StaticProvider("a", source=ALLC),
        StaticProvider("b", source=TFT),
        meta_rounds=3,
        cfg=cfg,
    )
    assert [r.match.actions for r in external.rounds] == [
        r.match.actions for r in static.rounds
    ]
    assert external.totals() == static.totals()


def test_record_round_count_and_determinism():
    def make():
        return run_meta_game(
            StaticProvider("a", source=TFT),
            ScriptedProvider("b", schedule=[(1, ALLC), (3, ALLD)]),
            meta_rounds=5,
            cfg=MatchConfig(rounds=10, seed=12),
        )

    blob1 = canonical_json_bytes(make().to_json_dict())
    blob2 = canonical_json_bytes(make().to_json_dict())
    assert blob1 == blob2
    obj = json.loads(blob1)
    assert obj["schema"] == "osgames.meta/1"
    assert [r["meta_round"] for r in obj["rounds"]] == [1, 2, 3, 4, 5]


def test_judge_label_merge():
    record = run_meta_game(
        StaticProvider("a", source=TFT),
        StaticProvider("b", source=TFT),
        meta_rounds=2,
        cfg=MatchConfig(rounds=10, seed=0),
    )
    sidecar = [
        {
            "meta_round": 2,
            "player": "a",
            "labels": {"counter_measure": True, "feint": False},
        }
    ]
    merged = merge_judge_labels(record, sidecar)
    assert merged.rounds[0].judge_labels is None
    assert merged.rounds[1].judge_labels == {
        "a": {"counter_measure": True, "feint": False}
    }
    with pytest.raises(MetaGameError):
        merge_judge_labels(record, [{"meta_round": 1, "player": "a", "labels": {"bogus": True}}])
    assert len(JUDGE_FEATURES) == 5
