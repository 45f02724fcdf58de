"""When survivorship curves do not cross, W1 is exactly the e0 gap."""

# %%
import numpy as np

from lifetable_ot import build_from_mx, compare, to_distribution, w1_distance, wp_distance

ages = np.arange(111)
base = 5e-5 * np.exp(0.09 * ages) + 0.02 * np.exp(-1.5 * ages)

women = build_from_mx(base, label="women")
men = build_from_mx(1.6 * base, label="men")     # uniformly higher hazard

rep = compare(women, men)
print(f"e0 women {rep.e0_a:.3f}, men {rep.e0_b:.3f}")
print(f"W1 {rep.w1:.12f}  |gap| {rep.e0_gap_abs:.12f}  ({rep.dominance.value})")

# %%
# a proportional hazard change of any size keeps one curve on top
for k in (1.05, 1.5, 3.0, 10.0):
    r = compare(women, build_from_mx(k * base))
    print(f"scale {k:5.2f}: crossings={r.crossing_count} W1-|gap|={r.w1_minus_gap:+.1e}")

# %%
# higher-order distances weigh large moves more heavily
da, db = to_distribution(women), to_distribution(men)
for p in (1, 2, 3):
    print(f"W{p} = {wp_distance(da, db, p):.4f}")
print("W1 via CDF area:", round(w1_distance(da, db), 4))
