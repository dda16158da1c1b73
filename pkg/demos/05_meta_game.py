"""The repeated open-source game: each meta-round, providers submit a
program after inspecting the opponent's previous-round source, then the
programs play a full match.

Run:  python demos/05_meta_game.py
"""

from osgames.arena import MatchConfig
from osgames.fixtures import corpus_path
from osgames.metagame import run_meta_game
from osgames.providers import ScriptedProvider, StaticProvider

tft = corpus_path("ipd/tft.slang").read_text()
allc = corpus_path("ipd/allc.slang").read_text()
alld = corpus_path("ipd/alld.slang").read_text()

# A scripted provider plays the cooperator for four meta-rounds, then
# switches to the defector; the static provider submits tit-for-tat
# throughout.  Watch the payoffs flip at the switch.
record = run_meta_game(
    ScriptedProvider("a", tag="PM", schedule=[(1, allc), (5, alld)]),
    StaticProvider("b", tag="CPM", source=tft),
    meta_rounds=10,
    cfg=MatchConfig(rounds=10, seed=0),
)

print("meta-round results (scripted vs static tit-for-tat):")
for r in record.rounds:
    saw = "nothing" if r.opponent_previous[0] is None else "opponent's last source"
    print(f"  round {r.meta_round:2d}: totals {r.match.totals}  (provider a saw {saw})")
print(f"cumulative: {record.totals()}")

# The record is a complete replayable artifact.
blob = record.to_json_dict()
print(f"\nrecord schema {blob['schema']}, providers {[p['tag'] for p in blob['providers']]}")
print("every meta-round embeds its full match record, sources included")
