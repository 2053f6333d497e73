"""
Float-float accuracy
====================

Two binary32 words give about 44 significant bits.  The accuracy harness
measures how close add22 and mul22 come to that against an exact oracle.
"""

# %%
import numpy as np

from floatfloat import ff_from_wide, ff_to_wide, mul22, run_accuracy
from floatfloat.harness import format_accuracy

x = ff_from_wide(np.pi)
print("pi as float-float:", x)
print("round trip error:", np.pi - ff_to_wide(x))

# %%
# squaring keeps roughly twice the binary32 precision
sq = mul22(x, x)
print("pi^2 error:", np.pi ** 2 - ff_to_wide(sq))

# %%
# seeded accuracy runs; add22 is judged against its two-term bound,
# mul22 against 2^-44 relative error
reports = [run_accuracy(op, samples=1 << 16, seed=1) for op in ("add12", "mul12", "add22", "mul22")]
print(format_accuracy(reports))
