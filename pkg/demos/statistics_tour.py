"""
Bernstein statistics from a three-particle state
=================================================

Build the odd-parity superposition on three spins, then check that any two
z-measurements look independent while all three together do not.
"""

import itertools

import numpy as np

from bernstein import OutcomeQuery, joint_probability, kwise_independence_report, special_bernstein

# four equal-weight terms, each with an odd number of Down spins
state = special_bernstein(3)
print("state:", state.ket())

# single-particle and pairwise z probabilities
for k in (1, 2, 3):
    q = OutcomeQuery(((k, "z", 1),))
    print(f"P({q}) = {joint_probability(state, q):.3f}")
for pair in itertools.combinations((1, 2, 3), 2):
    q = OutcomeQuery(tuple((k, "z", 1) for k in pair))
    print(f"P({q}) = {joint_probability(state, q):.3f}")

# the full triple breaks the product rule
joint = joint_probability(state, OutcomeQuery.parse("+++"))
print(f"P(+++) = {joint:.3f}, product of singles = {0.5 ** 3:.3f}")

# the same conclusion, as a report sweeping every subset size
report = kwise_independence_report(state)
for size, verdict in sorted(report.verdicts.items()):
    print(f"size {size}: independent={verdict.independent} worst deviation={verdict.worst_deviation:.3g}")

# larger N: independence holds through N-1 particles
for n in range(4, 8):
    r = kwise_independence_report(special_bernstein(n))
    print(f"N={n}: independent through {r.independent_through()}, all-up joint {r.n_wise_joint:.1f}"
          f" vs product {np.prod(r.singles[:, 0]):.4f}")
