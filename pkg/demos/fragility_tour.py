"""
Fragile entanglement after losing one particle
===============================================

Trace out a particle from a phase-decorated Bernstein state and show the
remainder is an equal mixture of two product states, while a deformed family
keeps negative partial-transpose eigenvalues.
"""

import numpy as np

from bernstein import (
    PhaseAssignment,
    fragility_report,
    ghz_orbit_separable_decomposition,
    inhomogeneous_bernstein3,
    local_phase_transform,
    special_bernstein,
)

rng = np.random.default_rng(1)

# a five-particle state decorated with random local phases
state = local_phase_transform(special_bernstein(5), PhaseAssignment.random(5, rng))

# the explicit decomposition: two product states whose mixture is the reduced state
decomp = ghz_orbit_separable_decomposition(state, traced=3)
print(f"frame {decomp.frame.value}, residual {decomp.residual:.2e}")
for label, factors in (("first", decomp.factors_1), ("second", decomp.factors_2)):
    print(f"{label} product state, per particle:")
    for f in factors:
        print("   ", np.round(f, 3))

# full per-particle report: PPT minima on every cut plus the residual
report = fragility_report(state)
for k, entry in report.per_particle.items():
    print(f"trace out {k}: min PPT eigenvalue {entry.min_ppt:+.1e}, verdict {entry.verdict.value}")
print("fragile:", report.fragile)

# the inhomogeneous family only becomes fragile at q = 1/2
for q in (0.1, 0.25, 0.4, 0.5):
    r = fragility_report(inhomogeneous_bernstein3(q))
    print(f"q={q}: min PPT eigenvalue {min(e.min_ppt for e in r.per_particle.values()):+.5f}, fragile={r.fragile}")
