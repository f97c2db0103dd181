"""Builders for Bernstein, GHZ and inhomogeneous Bernstein states."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .qstate import (
    MAX_STATE_QUBITS,
    Axis,
    StateVector,
    basis_change_z_to_x,
    down_counts,
    odd_parity_indices,
)

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class PhaseAssignment:
    """Local phase transformation ``diag(exp(i alpha_k), exp(i beta_k))`` per particle."""

    alphas: np.ndarray
    betas: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.alphas, dtype=float).reshape(-1)
        b = np.asarray(self.betas, dtype=float).reshape(-1)
        if a.shape != b.shape:
            raise ValueError("alphas and betas must have the same length")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise ValueError("phase angles must be finite")
        object.__setattr__(self, "alphas", a)
        object.__setattr__(self, "betas", b)

    @classmethod
    def from_deltas(cls, deltas) -> PhaseAssignment:
        d = np.asarray(deltas, dtype=float)
        return cls(d, np.zeros_like(d))

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> PhaseAssignment:
        return cls(rng.uniform(0, TWO_PI, n), rng.uniform(0, TWO_PI, n))

    @property
    def n(self) -> int:
        return self.alphas.size

    @property
    def deltas(self) -> np.ndarray:
        return self.alphas - self.betas

    def term_shifts(self) -> np.ndarray:
        """Phase shift picked up by every basis label, indexed by basis index."""
        n = self.n
        idx = np.arange(2**n)
        shifts = np.zeros(2**n)
        for k in range(1, n + 1):
            down = (idx >> (n - k)) & 1
            shifts += np.where(down, self.betas[k - 1], self.alphas[k - 1])
        return shifts


@dataclass(frozen=True)
class TermPhaseVector:
    """Phases of the ``2**(n-1)`` odd-down-parity terms, in increasing basis order."""

    n: int
    phases: np.ndarray = field(repr=False)

    def __post_init__(self):
        p = np.asarray(self.phases, dtype=float).reshape(-1)
        if p.size != 2 ** (self.n - 1):
            raise ValueError(f"expected {2 ** (self.n - 1)} term phases for N={self.n}, got {p.size}")
        object.__setattr__(self, "phases", np.mod(p, TWO_PI))

    @classmethod
    def zeros(cls, n: int) -> TermPhaseVector:
        return cls(n, np.zeros(2 ** (n - 1)))

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> TermPhaseVector:
        return cls(n, rng.uniform(0, TWO_PI, 2 ** (n - 1)))

    @classmethod
    def from_phase_assignment(cls, p: PhaseAssignment) -> TermPhaseVector:
        """Term phases of ``local_phase_transform(special_bernstein(n), p)``."""
        return cls(p.n, p.term_shifts()[odd_parity_indices(p.n)])

    @classmethod
    def of_state(cls, s: StateVector) -> TermPhaseVector:
        return cls(s.n_particles, np.angle(s.amplitudes[odd_parity_indices(s.n_particles)]))

    @property
    def labels(self) -> np.ndarray:
        return odd_parity_indices(self.n)


def _check_bernstein_n(n: int) -> int:
    if not isinstance(n, (int, np.integer)) or not 3 <= n <= MAX_STATE_QUBITS:
        raise ValueError(f"Bernstein states need 3 <= N <= {MAX_STATE_QUBITS}, got {n}")
    return int(n)


def special_bernstein(n: int) -> StateVector:
    """Equal-weight superposition of every label with an odd number of Down spins."""
    n = _check_bernstein_n(n)
    amps = np.zeros(2**n, dtype=complex)
    amps[odd_parity_indices(n)] = 2.0 ** (-(n - 1) / 2)
    return StateVector(n, amps)


def general_bernstein(n: int, t: TermPhaseVector | np.ndarray) -> StateVector:
    n = _check_bernstein_n(n)
    if not isinstance(t, TermPhaseVector):
        t = TermPhaseVector(n, t)
    if t.n != n:
        raise ValueError(f"phase vector is for N={t.n}, not N={n}")
    amps = np.zeros(2**n, dtype=complex)
    amps[odd_parity_indices(n)] = 2.0 ** (-(n - 1) / 2) * np.exp(1j * t.phases)
    return StateVector(n, amps)


def ghz(n: int, axis: Axis | str = Axis.Z, relative_sign: int = -1) -> StateVector:
    """``(|e+ ... e+⟩ + sign |e- ... e-⟩)/√2`` in the eigenbasis of ``axis``.

    For the x axis ``e+ = ←`` and ``e- = →``; the returned amplitudes are always
    in the z basis.
    """
    axis = Axis.parse(axis)
    if not isinstance(n, (int, np.integer)) or not 2 <= n <= MAX_STATE_QUBITS:
        raise ValueError(f"GHZ states need 2 <= N <= {MAX_STATE_QUBITS}, got {n}")
    if relative_sign not in (1, -1):
        raise ValueError("relative_sign must be +1 or -1")
    if axis is Axis.Y:
        raise ValueError("the GHZ builder supports the x and z axes only")
    amps = np.zeros(2**n, dtype=complex)
    amps[0] = 1 / np.sqrt(2)
    amps[-1] = relative_sign / np.sqrt(2)
    s = StateVector(int(n), amps)
    if axis is Axis.X:
        s = basis_change_z_to_x(s)
    return s


def inhomogeneous_bernstein3(q: float) -> StateVector:
    if not 0 < q <= 0.5:
        raise ValueError(f"q must lie in (0, 1/2], got {q}")
    by_downs = {
        0: 0.0,
        1: q,
        2: np.sqrt(q * (1 - 2 * q)),
        3: np.sqrt(1 - 3 * q * (1 - q)),
    }
    amps = np.array([by_downs[d] for d in down_counts(3)], dtype=complex)
    return StateVector(3, amps)


def local_phase_transform(s: StateVector, p: PhaseAssignment) -> StateVector:
    if p.n != s.n_particles:
        raise ValueError(f"phase assignment has {p.n} entries for a {s.n_particles}-particle state")
    return StateVector(s.n_particles, s.amplitudes * np.exp(1j * p.term_shifts()))
