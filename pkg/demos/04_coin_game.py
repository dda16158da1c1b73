"""The coin game: two players on a wrap-around grid chase coloured coins.
Collecting any coin pays +1; losing your colour to the opponent costs 2.

Run:  python demos/04_coin_game.py
"""

from osgames.arena import MatchConfig, play_match
from osgames.fixtures import load_fixture

lookahead = load_fixture("coin/lookahead.slang")  # simulates the reply
chaser = load_fixture("coin/greedy_chaser.slang")  # runs at its own coin

record = play_match(lookahead, chaser, MatchConfig(game="coin", rounds=10, seed=5))
state = record.initial_state
print(f"board {state.n}x{state.n}; A starts {state.pos_a}, B starts {state.pos_b}")
print(f"red coin (A's colour) {state.coin_red}, blue coin (B's colour) {state.coin_blue}\n")

for step, (moves, deltas, events) in enumerate(
    zip(record.actions, record.deltas, record.events)
):
    line = f"step {step}: A {moves[0]:>5s}  B {moves[1]:>5s}  deltas {deltas}"
    for e in events:
        line += f"  [{e.collector} collects {e.color} at {e.cell}]"
    print(line)

print(f"\ntotals: lookahead {record.totals[0]}, greedy chaser {record.totals[1]}")

# Averaged over many seeds, the one-step lookahead dominates the chaser.
wins = 0
for seed in range(50):
    r = play_match(lookahead, chaser, MatchConfig(game="coin", rounds=10, seed=seed))
    wins += r.totals[0] > r.totals[1]
print(f"lookahead finishes ahead in {wins}/50 seeded matches")
