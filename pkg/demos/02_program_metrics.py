"""Static analysis of strategy programs: complexity, Halstead, and how much
a program reads its opponent's code (OSAS).

Run:  python demos/02_program_metrics.py
"""

from osgames.fixtures import load_corpus_programs, load_fixture
from osgames.metrics import collect
from osgames.rng import SplitMix64
from osgames.slang.render import render
from osgames.transforms import mask, obfuscate

print(f"{'program':24s} {'cyclomatic':>10s} {'effort':>10s} {'osas':>6s}")
for name, program in load_corpus_programs("ipd"):
    report = collect(program.tree)
    print(
        f"{name:24s} {report.cyclomatic:>10d} "
        f"{report.halstead.effort:>10.1f} {report.osas.score:>6.2f}"
    )

# The comparator actually reads its opponent: two of its three decision
# sites are influenced by the opponent-source input.
comparator = load_fixture("equilibrium/syntactic_comparator.slang")
osas = collect(comparator.tree).osas
print(f"\nsyntactic comparator: {osas.tainted_sites}/{osas.total_sites} sites tainted")

# Transforms rename identifiers without touching behaviour or metrics.
counting = dict(load_corpus_programs("ipd"))["counting_cooperator"]
masked, _ = mask(counting.tree)
obfuscated, _ = obfuscate(counting.tree, SplitMix64(7))
print("\nmasked helper functions:")
print(render(masked).text)
print("obfuscated (entry point, builtins and ambient names survive):")
print(render(obfuscated).text)
before, after = collect(counting.tree), collect(obfuscated)
assert before.cyclomatic == after.cyclomatic
assert before.halstead == after.halstead
assert before.osas == after.osas
print("metrics identical before/after renaming: yes")
