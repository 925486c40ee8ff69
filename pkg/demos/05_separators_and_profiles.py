"""Separators when inverse sums converge, cluster witnesses when they diverge.

For a diagonal system the two regimes exclude each other: a convergent
sum of reciprocals yields one vector separating the whole sequence from
zero with an exact margin identity, and a divergent sum guarantees
indices where every fixed test collection is small, quantified by the
weighted-average decay profile.
"""

from fractions import Fraction

from fbasis import (
    BasisVector,
    NotSeparable,
    PowerLog,
    PowerTail,
    cluster_witness,
    lemma1_profile,
    lift_functionals_to_operators,
    plank_separator,
)

quadratic = PowerLog(1, Fraction(2))
sqrt_n = PowerLog(1, Fraction(1, 2))

# convergent regime: sum 1/n^2 < infinity, so a separator exists
sep = plank_separator(quadratic, "linf-diagonal", 0.1)
print("separator coordinates:", sep.vector.to_text())
print("norm bound:", round(sep.norm_bound, 6),
      "| identity |a_n x_n| =", sep.identity_constant,
      "(symbolically exact:", sep.identity_exact, ")")

# divergent regime: no separator, but explicit cluster indices
try:
    plank_separator(sqrt_n, "linf-diagonal", 0.1)
except NotSeparable as e:
    print("\nsqrt(n):", e)
w = cluster_witness(sqrt_n, 2, [PowerTail(Fraction(1))], horizon=100)
print("cluster index:", w.index, "with maxima", w.maxima)

# the averaging profile behind the cluster argument: A(n) <= B(n) -> 0
rows = lemma1_profile(sqrt_n, [PowerTail(Fraction(2)), BasisVector(1)], [10, 100, 1000, 10000])
print("\n  n        A(n)        B(n)")
for r in rows:
    print(f"{r.n:>5}  {r.average:.8f}  {r.bound:.8f}")

# diagonal functionals lift to rank-one operators with the same norms
ops = lift_functionals_to_operators(quadratic, anchor=1, count=5)
print("\nlifted operator norms:", [o.norm for o in ops])
