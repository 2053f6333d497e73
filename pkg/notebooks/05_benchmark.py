"""
Relative cost of the operators
==============================

Timings are normalized to a plain binary32 addition over 4096 elements.
Absolute numbers depend on the machine; the ratios are the story.
"""

# %%
from floatfloat import run_bench
from floatfloat.harness import format_bench

print(format_bench(run_bench(sizes=(4096, 65536), reps=3, seed=1)))
