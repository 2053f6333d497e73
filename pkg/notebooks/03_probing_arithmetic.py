"""
Probing rounding behaviour
==========================

Random operands, exact reference results, and the extreme ulp errors seen.
The software simulator stands in for hardware with other rounding rules.
"""

# %%
from floatfloat import probe_report, sim_backend
from floatfloat.probe import format_report

for name in ("binary32", "chopped", "p=24,guard=0"):
    B = sim_backend(name)
    print(format_report(probe_report(B, 50_000, seed=7), B.describe()))
    print()

# %%
# Division is a reciprocal followed by a multiply, so two roundings pile up
# and the chopped interval is wider than one ulp.
