"""A first match: two strategy programs read each other and play.

Run:  python demos/01_single_match.py
"""

from osgames.arena import MatchConfig, play_match
from osgames.fixtures import load_fixture
from osgames.program import load_program

# Programs are plain text in SLANG; the engine hands each one the other's
# source plus the play history every round.
tft = load_fixture("ipd/tft.slang")
alld = load_fixture("ipd/alld.slang")

record = play_match(tft, alld, MatchConfig(rounds=10, seed=7))
print("tit-for-tat vs always-defect, 10 rounds:")
for r, (actions, deltas) in enumerate(zip(record.actions, record.deltas)):
    print(f"  round {r}: {actions[0]} vs {actions[1]}  ->  {deltas}")
print(f"totals: {record.totals}  (mirror loses the first round, then stalemate)\n")

# A crashing program does not break the match: the arena substitutes the
# fallback action and logs the fault.
crasher = load_program("fn strategy() {\n    return opp_history[5]\n}\n", origin="crasher")
record = play_match(crasher, tft, MatchConfig(rounds=5, seed=1))
print(f"crasher vs tit-for-tat: totals {record.totals}")
for fault in record.faults[:2]:
    print(f"  fault round {fault.round}: {fault.kind} — {fault.detail}")
print(f"  ({len(record.faults)} faults total, fallback action 'D' substituted)\n")

# Source transparency in action: this program cooperates only with a
# byte-identical twin.
comparator = load_fixture("equilibrium/syntactic_comparator.slang")
twin = load_program(comparator.text, origin="twin")
print("syntactic comparator vs its twin:", play_match(comparator, twin, MatchConfig()).totals)
print("syntactic comparator vs tit-for-tat:", play_match(comparator, tft, MatchConfig()).totals)
