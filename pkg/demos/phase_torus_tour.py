"""
Which phase patterns can local phases reach?
=============================================

Solve for local phase shifts that turn the special Bernstein state into a
given general one.  Every target is reachable for three particles; from four
particles on, a random target is not.
"""

import numpy as np

from bernstein import (
    PhaseAssignment,
    TermPhaseVector,
    dimension_gap,
    is_period,
    orbit_membership,
    period_lattice,
    stabilizer_lattice,
)

rng = np.random.default_rng(7)

for n in (3, 4, 5):
    random_hits = sum(orbit_membership(n, TermPhaseVector.random(n, rng)).reachable for _ in range(200))
    target = TermPhaseVector.from_phase_assignment(PhaseAssignment.random(n, rng))
    res = orbit_membership(n, target)
    gap = dimension_gap(n)
    print(f"N={n}: {random_hits}/200 random targets reachable; pushed-forward target reachable={res.reachable};"
          f" orbit dim {gap.orbit_dim} vs torus dim {gap.bernstein_dim}")

# periods of the phase shifts, in units of pi; the columns of the inverse
# matrix stop being periods at five particles, while the stabilizer lattice
# (a common shift of pi plus any 2*pi offsets) always works
for n in (3, 4, 5):
    columns = period_lattice(n)
    ok = [is_period(n, g) for g in columns.generators]
    print(f"N={n}: inverse-matrix generators act trivially: {ok}")
    print("    true periods are spanned by", [tuple(str(x) for x in g) for g in stabilizer_lattice(n).generators[:2]], "...")
