"""
Error-free transformations in binary32
======================================

A rounded sum or product loses bits.  Add12 and Mul12 hand those bits back
as a second float, so the pair carries the exact result.
"""

# %%
import numpy as np

from floatfloat import Dyadic, add12, mul12, split

f32 = np.float32

# 1 + 2^-30 does not fit in 24 bits; the low word keeps what rounding dropped
s, r = add12(f32(1.0), f32(2.0 ** -30))
print("add12:", float(s), float(r))

# %%
# Dekker's split cuts a 24-bit significand into two 12-bit halves,
# small enough that their products are exact
hi, lo = split(f32(4097.0))
print("split(4097):", float(hi), float(lo))

# %%
# Mul12 rebuilds the full 48-bit product from the four half products
a = f32(1.0 + 2.0 ** -12)
x, y = mul12(a, a)
exact = Dyadic.from_float(float(a)) * Dyadic.from_float(float(a))
print("mul12:", float(x), float(y))
print("exact:", exact == Dyadic.from_float(float(x)) + Dyadic.from_float(float(y)))

# %%
# Everything vectorizes over numpy arrays
rng = np.random.default_rng(0)
u = rng.standard_normal(5).astype(f32)
v = rng.standard_normal(5).astype(f32)
s, r = add12(u, v)
print("errors of float32 sums:", r)
