"""The closed forms against a linear-programming transport solver."""

# %%
import numpy as np

from lifetable_ot import AgeAtDeathDistribution, solve_exact, w1_distance, wp_distance
from lifetable_ot.oracle import northwest_corner_plan

rng = np.random.default_rng(7)


def random_dist(n):
    locs = np.sort(rng.choice(np.arange(0, 100, 0.5), n, replace=False))
    return AgeAtDeathDistribution(locs, rng.dirichlet(np.ones(n)))


a, b = random_dist(5), random_dist(4)
for p in (1, 2):
    cost, plan = solve_exact(a, b, p=p)
    closed = w1_distance(a, b) if p == 1 else wp_distance(a, b, 2)
    print(f"p={p}: LP {cost:.12f}  closed form {closed:.12f}")

# %%
# in one dimension the monotone (northwest-corner) coupling is optimal
nw = northwest_corner_plan(a, b)
print("NW plan cost^(1/2):", round(nw.cost(2) ** 0.5, 12))
print("NW plan is monotone:", nw.is_monotone())
print(np.round(nw.matrix, 3))

# %%
worst = 0.0
for _ in range(200):
    x, y = random_dist(rng.integers(1, 9)), random_dist(rng.integers(1, 9))
    worst = max(worst, abs(w1_distance(x, y) - solve_exact(x, y)[0]))
print(f"largest discrepancy over 200 random pairs: {worst:.1e}")
