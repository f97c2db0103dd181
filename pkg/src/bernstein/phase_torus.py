"""Orbit geometry of Bernstein states under local phase transformations.

A local phase transformation with differences ``delta_k = alpha_k - beta_k``
shifts the phase of the odd-parity term ``T`` by ``c + sum(delta_k for k up
in T)``, where the constant ``c`` is projectively irrelevant.  Angles are
floats; the linear-algebra skeleton (matrices, lattice generators) is kept
exact with :class:`fractions.Fraction`, and lattice vectors are expressed in
units of pi.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .constructions import TermPhaseVector
from .qstate import down_counts, odd_parity_indices

TWO_PI = 2.0 * np.pi
MEMBERSHIP_TOL = 1e-9

Matrix = tuple[tuple[Fraction, ...], ...]


def _matmul(a: Matrix, b: Matrix) -> Matrix:
    n = len(a)
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)) for i in range(n))


def _identity(n: int) -> Matrix:
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


@dataclass(frozen=True)
class PhaseShiftSystem:
    """Map from phase differences to single-down term phases, and its inverse.

    Row ``i`` of ``forward`` gives the phase of the single-down term with the
    ``i``-th smallest basis index (particle ``N + 1 - i`` down).
    """

    n: int
    forward: Matrix
    inverse: Matrix

    def forward_array(self) -> np.ndarray:
        return np.array(self.forward, dtype=float)

    def inverse_array(self) -> np.ndarray:
        return np.array(self.inverse, dtype=float)


def _forward_matrix(n: int) -> Matrix:
    rows = []
    for i in range(n):
        row = [1] * n
        row[n - 1 - i] = 0  # anti-diagonal
        if n % 2 == 0:
            # even N: last column reduced by one
            row[n - 1] -= 1
        rows.append(tuple(Fraction(x) for x in row))
    return tuple(rows)


def _inverse_matrix(n: int) -> Matrix:
    rows = []
    if n % 2 == 1:
        scale = Fraction(1, n - 1)
        for i in range(n):
            row = [1] * n
            row[n - 1 - i] = 2 - n
            rows.append(tuple(scale * x for x in row))
    else:
        scale = Fraction(1, n - 2)
        for i in range(n):
            if i == n - 1:
                row = [2 - n] + [1] * (n - 1)
            else:
                row = [0] + [1] * (n - 1)
                row[n - 1 - i] = 3 - n
            rows.append(tuple(scale * x for x in row))
    return tuple(rows)


def phase_shift_system(n: int) -> PhaseShiftSystem:
    if n < 3:
        raise ValueError("phase shift systems are defined for N >= 3")
    forward, inverse = _forward_matrix(n), _inverse_matrix(n)
    if _matmul(forward, inverse) != _identity(n):
        raise ArithmeticError(f"inverse matrix check failed for N={n}")
    return PhaseShiftSystem(n, forward, inverse)


@dataclass(frozen=True)
class PeriodLattice:
    """Lattice generators in units of pi."""

    n: int
    generators: tuple[tuple[Fraction, ...], ...]

    def radians(self) -> np.ndarray:
        """Generators as rows, in radians."""
        return np.pi * np.array(self.generators, dtype=float)

    def contains(self, shift_in_pi) -> bool:
        """Exact membership test for an integer/rational vector in units of pi."""
        basis = [[Fraction(x) for x in g] for g in self.generators]
        coeffs = _solve_exact(basis, [Fraction(x) for x in shift_in_pi])
        return coeffs is not None and all(c.denominator == 1 for c in coeffs)


def _solve_exact(columns: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction] | None:
    """Solve ``sum_j x_j columns[j] = rhs`` exactly; None if singular."""
    n = len(rhs)
    aug = [[columns[j][i] for j in range(len(columns))] + [rhs[i]] for i in range(n)]
    m = len(columns)
    row = 0
    for col in range(m):
        piv = next((r for r in range(row, n) if aug[r][col] != 0), None)
        if piv is None:
            return None
        aug[row], aug[piv] = aug[piv], aug[row]
        inv = 1 / aug[row][col]
        aug[row] = [x * inv for x in aug[row]]
        for r in range(n):
            if r != row and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[row])]
        row += 1
    if any(aug[r][m] != 0 for r in range(row, n)):
        return None
    return [aug[i][m] for i in range(m)]


def period_lattice(n: int) -> PeriodLattice:
    """Generators ``2*pi`` times the columns of the inverse phase-shift matrix.

    These make every single-down term phase a multiple of ``2*pi``.  For
    N = 3 and 4 they are exactly the phase differences that leave a Bernstein
    point fixed; for N >= 5 they are not (the three-down terms pick up
    nontrivial phases), see :func:`stabilizer_lattice`.
    """
    inv = phase_shift_system(n).inverse
    gens = tuple(tuple(2 * inv[i][j] for i in range(n)) for j in range(n))
    return PeriodLattice(n, gens)


def stabilizer_lattice(n: int) -> PeriodLattice:
    """Phase differences that fix every projective Bernstein point.

    A shift is a period iff all odd-parity term phases change by a common
    constant mod 2*pi, which forces ``delta = t*(1, ..., 1) + 2*pi*m`` with
    ``t`` a multiple of pi.
    """
    if n < 3:
        raise ValueError("N >= 3 required")
    gens = [tuple(Fraction(1) for _ in range(n))]
    for k in range(1, n):
        gens.append(tuple(Fraction(2 * (i == k)) for i in range(n)))
    return PeriodLattice(n, tuple(gens))


def is_period(n: int, shift_in_pi) -> bool:
    """Exact test: does the shift (units of pi) act trivially on Bernstein points?"""
    shift = [Fraction(x) for x in shift_in_pi]
    if len(shift) != n:
        raise ValueError("shift length must equal N")
    values = set()
    for i in odd_parity_indices(n):
        up_sum = sum((shift[k] for k in range(n) if not (i >> (n - 1 - k)) & 1), Fraction(0))
        values.add(up_sum % 2)
    return len(values) == 1


@dataclass(frozen=True)
class OrbitMembership:
    reachable: bool
    deltas: np.ndarray | None
    constant: float
    max_residual_mod_2pi: float

    def to_json(self) -> dict:
        return {
            "reachable": self.reachable,
            "deltas_over_pi": None if self.deltas is None else [float(d / np.pi) for d in self.deltas],
            "constant_over_pi": self.constant / np.pi,
            "max_residual_mod_2pi": self.max_residual_mod_2pi,
        }


def distance_mod_2pi(x):
    """Distance to the nearest multiple of 2*pi."""
    r = np.mod(x, TWO_PI)
    return np.minimum(r, TWO_PI - r)


def _solve_orbit(n: int, phases: np.ndarray) -> tuple[np.ndarray, float, np.ndarray]:
    """Best candidate ``(deltas, constant)`` and residual per odd-parity term."""
    labels = odd_parity_indices(n)
    theta = dict(zip(labels.tolist(), phases))
    single = np.array([theta[1 << (n - k)] for k in range(1, n + 1)])  # by particle

    # Single-down terms fix delta up to a common shift t; a three-down term fixes 2t.
    counts = down_counts(n)
    three = next(i for i in labels if counts[i] == 3)
    down3 = [k for k in range(1, n + 1) if (three >> (n - k)) & 1]
    two_t = sum(single[k - 1] for k in down3) - theta[three]
    t = 0.5 * two_t
    constant = float(single.sum() - (n - 1) * t)

    # Single-down phases in the gauge where the overall factor is removed,
    # ordered by increasing basis index, then inverted exactly.
    single_by_index = single[::-1]
    if n % 2 == 1:
        gauge = constant
    else:
        gauge = constant + (t - single[n - 1])
    system = phase_shift_system(n)
    deltas = system.inverse_array() @ (single_by_index - gauge)

    predicted = np.array(
        [constant + sum(deltas[k - 1] for k in range(1, n + 1) if not (i >> (n - k)) & 1) for i in labels]
    )
    return deltas, constant, distance_mod_2pi(phases - predicted)


def orbit_membership(n: int, t: TermPhaseVector | np.ndarray, tol: float = MEMBERSHIP_TOL) -> OrbitMembership:
    """Is the general Bernstein state with term phases ``t`` reachable from the
    special Bernstein state by a local phase transformation?

    When reachable, ``PhaseAssignment.from_deltas(result.deltas)`` applied to
    ``special_bernstein(n)`` gives ``general_bernstein(n, t)`` up to the global
    phase ``exp(i * result.constant)``.
    """
    if not isinstance(t, TermPhaseVector):
        t = TermPhaseVector(n, t)
    if t.n != n:
        raise ValueError(f"phase vector is for N={t.n}, not N={n}")
    deltas, constant, residual = _solve_orbit(n, t.phases)
    worst = float(residual.max())
    reachable = worst < tol
    return OrbitMembership(reachable, deltas if reachable else None, constant, worst)


def candidate_deltas(n: int, t: TermPhaseVector | np.ndarray) -> tuple[np.ndarray, float]:
    """Best-fit phase differences and constant even when ``t`` is off-orbit."""
    if not isinstance(t, TermPhaseVector):
        t = TermPhaseVector(n, t)
    deltas, constant, _ = _solve_orbit(n, t.phases)
    return deltas, constant


class DimensionGap(NamedTuple):
    orbit_dim: int
    bernstein_dim: int


def dimension_gap(n: int) -> DimensionGap:
    if n < 3:
        raise ValueError("N >= 3 required")
    return DimensionGap(n, 2 ** (n - 1) - 1)


def in_lattice_mod(n: int, diff: np.ndarray, lattice: PeriodLattice, tol: float = 1e-8) -> bool:
    """Is the real vector ``diff`` (radians) within ``tol`` of a lattice point?"""
    basis = lattice.radians().T
    coeffs = np.linalg.solve(basis, diff)
    return bool(np.all(np.abs(coeffs - np.round(coeffs)) < tol))

