"""Ground-truth cooperation labeling: run every program against a pure
cooperator for ten rounds and ask whether it always played C.

Run:  python demos/03_cooperation_labels.py
"""

from osgames.fixtures import load_corpus_programs, load_corpus_sources
from osgames.labeling import (
    benchmark_summary,
    build_benchmark,
    cooperation_rate,
    is_stochastic,
    label_cooperative,
)

corpus = load_corpus_programs("ipd")
print(f"{'program':24s} {'cooperative':>11s} {'stochastic':>10s}  trace")
for name, program in corpus:
    label = label_cooperative(program)
    print(
        f"{name:24s} {str(label.cooperative):>11s} "
        f"{str(is_stochastic(program)):>10s}  {''.join(label.trace)}"
    )

# The ten-round horizon is what catches multi-round behaviour like the
# delayed defector (cooperates five rounds, then turns).
delayed = dict(corpus)["delayed_defector"]
print("\ndelayed defector trace:", "".join(label_cooperative(delayed).trace))

# Stochastic programs are labeled by one seeded run; a trials option
# reports how often they come out cooperative across seeds.
flip = dict(corpus)["random_coinflip"]
print(f"coin flip cooperative fraction over 50 seeds: {cooperation_rate(flip, trials=50):.2f}")

# The benchmark builder emits unmasked/masked/obfuscated variants per
# program and insists that all three behave identically.
items = build_benchmark(load_corpus_sources("ipd"))
print("\nbenchmark:", benchmark_summary(items))
