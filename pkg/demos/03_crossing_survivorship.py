"""Crossing survivorship: equal life expectancy, different distributions."""

# %%
import numpy as np

from lifetable_ot import CompareOptions, build_from_mx, compare, crossing_diagnostics

ages = np.arange(111)

# population A: high infant mortality, slow ageing
a_mx = 2e-5 * np.exp(0.085 * ages) + 0.25 * np.exp(-0.9 * ages)
# population B: low infant mortality, fast ageing; tune its level to match e0
lo, hi = 1e-6, 1e-2
for _ in range(100):
    mid = np.sqrt(lo * hi)
    b = build_from_mx(mid * np.exp(0.12 * ages) + 0.01 * np.exp(-1.5 * ages))
    lo, hi = (mid, hi) if b.e0 > build_from_mx(a_mx).e0 else (lo, mid)

a = build_from_mx(a_mx, label="A")
rep = compare(a, b)
print(f"e0 A {rep.e0_a:.3f}  e0 B {rep.e0_b:.3f}")
print(f"|gap| {rep.e0_gap_abs:.4f} but W1 {rep.w1:.3f}")
print("crossing:", crossing_diagnostics(a, b))

# %%
# the gap is a signed area; W1 adds the two lobes instead of cancelling them
diff = (a.lx / a.radix - b.lx / b.radix)[1:]   # both start at 1
cross = 1 + np.flatnonzero(np.diff(np.sign(diff)) != 0)
print("curves cross between ages", [(int(x), int(x) + 1) for x in cross])

# %%
# B has deaths where A has none, so KL needs smoothing to stay finite
smooth = compare(a, b, CompareOptions(kl_smoothing=1e-9))
print(f"KL(A||B) raw {rep.kl_ab}, smoothed {smooth.kl_ab:.3f}; non-overlap {rep.non_overlap:.3f}")
