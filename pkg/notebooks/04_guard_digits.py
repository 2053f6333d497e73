"""
Why a guard digit matters
=========================

Sterbenz's lemma and the exactness of Add12 both assume subtraction keeps
one extra digit while aligning operands.  Remove it and both break.
"""

# %%
from floatfloat import parse_format, sim_backend
from floatfloat.harness import exhaustive_octave, format_selftest, run_selftest

for cfg in ("p=24,guard=0", "p=24,guard=1"):
    rep = run_selftest(sim_backend(cfg), 20_000, seed=3, checks=["sterbenz", "add12"])
    print(format_selftest(rep))
    print()

# %%
# A 6-bit toy format is small enough to try every operand pair in a binade
for g in ("0", "1"):
    print(f"guard={g}:", exhaustive_octave(parse_format(f"p=6,emin=-30,emax=30,guard={g}")))
