"""Dense N-qubit state vectors and density matrices.

Basis convention: a computational-basis label is a sequence of spins, one per
particle, with particle 1 as the most significant bit and ``Up`` encoded as 0.
Particle indices in the public API are 1-based.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

NORM_TOL = 1e-12
EIG_TOL = 1e-10
RENORM_REPORT_TOL = 1e-9

MAX_STATE_QUBITS = 16
MAX_DENSITY_QUBITS = 12

SQRT_HALF = 1.0 / np.sqrt(2.0)


class SpinLabel(enum.IntEnum):
    UP = 0
    DOWN = 1

    @property
    def arrow(self) -> str:
        return "↑" if self is SpinLabel.UP else "↓"


PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}

HADAMARD = SQRT_HALF * np.array([[1, 1], [1, -1]], dtype=complex)

# Columns are the (+, -) eigenvectors of each Pauli operator.  Conjugating by
# ROTATION[axis]^dagger turns a measurement along ``axis`` into a z measurement.
ROTATION = {
    "x": HADAMARD,
    "y": np.diag([1, 1j]) @ HADAMARD,
    "z": np.eye(2, dtype=complex),
}


class Axis(enum.Enum):
    X = "x"
    Y = "y"
    Z = "z"

    @classmethod
    def parse(cls, value: Axis | str) -> Axis:
        if isinstance(value, Axis):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown axis {value!r}; expected x, y or z") from None

    @property
    def pauli(self) -> np.ndarray:
        return PAULI[self.value]

    @property
    def rotation(self) -> np.ndarray:
        return ROTATION[self.value]

    def projector(self, sign: int) -> np.ndarray:
        """Return ``(1 + sign * sigma) / 2``."""
        if sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        return 0.5 * (np.eye(2) + sign * self.pauli)


def parse_axes(axes: str | Sequence[Axis | str], n: int | None = None) -> tuple[Axis, ...]:
    parsed = tuple(Axis.parse(a) for a in axes)
    if n is not None and len(parsed) != n:
        raise ValueError(f"expected {n} axes, got {len(parsed)}")
    return parsed


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class StateVector:
    """Pure state of ``n_particles`` spin-1/2 particles in the z basis."""

    n_particles: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        n = self.n_particles
        if not isinstance(n, (int, np.integer)) or n < 1:
            raise ValueError("n_particles must be a positive integer")
        if n > MAX_STATE_QUBITS:
            raise ValueError(f"state vectors are capped at {MAX_STATE_QUBITS} particles")
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.shape != (2**n,):
            raise ValueError(f"expected {2**n} amplitudes for {n} particles, got {amps.size}")
        object.__setattr__(self, "n_particles", int(n))
        object.__setattr__(self, "amplitudes", _readonly(amps))

    @classmethod
    def from_amplitudes(cls, amplitudes, normalize: bool = True) -> StateVector:
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        n = int(round(np.log2(amps.size))) if amps.size else 0
        if amps.size < 2 or 2**n != amps.size:
            raise ValueError("amplitude count must be a power of two >= 2")
        if normalize:
            amps = _normalized(amps)
        return cls(n, amps)

    @property
    def dim(self) -> int:
        return 2**self.n_particles

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * self.n_particles)

    def ket(self, digits: int = 4, threshold: float = 1e-12) -> str:
        """Human-readable expansion, e.g. ``0.5|↑↑↓⟩ + 0.5|↑↓↑⟩``."""
        parts = []
        for i, a in enumerate(self.amplitudes):
            if abs(a) <= threshold:
                continue
            label = "".join(s.arrow for s in basis_pattern(i, self.n_particles))
            if abs(a.imag) <= threshold:
                coeff = f"{a.real:.{digits}g}"
            else:
                coeff = f"({a.real:.{digits}g}{a.imag:+.{digits}g}j)"
            parts.append(f"{coeff}|{label}⟩")
        return " + ".join(parts) if parts else "0"


@dataclass(frozen=True)
class DensityMatrix:
    """Density matrix over a set of particles.

    ``labels`` names the particles (1-based, in the original system) that the
    tensor factors refer to, so a reduced state keeps its particle numbering.
    """

    n_particles: int
    entries: np.ndarray = field(repr=False)
    labels: tuple[int, ...] = ()

    def __post_init__(self):
        m = int(self.n_particles)
        if m < 1:
            raise ValueError("n_particles must be positive")
        if m > MAX_DENSITY_QUBITS:
            raise ValueError(f"density matrices are capped at {MAX_DENSITY_QUBITS} particles")
        rho = np.array(self.entries, dtype=complex)
        if rho.shape != (2**m, 2**m):
            raise ValueError(f"expected a {2**m}x{2**m} matrix")
        labels = tuple(int(k) for k in self.labels) or tuple(range(1, m + 1))
        if len(labels) != m or len(set(labels)) != m:
            raise ValueError("labels must be distinct and one per particle")
        if not np.allclose(rho, rho.conj().T, atol=NORM_TOL, rtol=0):
            raise ValueError("density matrix is not hermitian")
        if abs(np.trace(rho) - 1) > 1e-9:
            raise ValueError(f"density matrix trace is {np.trace(rho).real}, not 1")
        object.__setattr__(self, "n_particles", m)
        object.__setattr__(self, "entries", _readonly(rho))
        object.__setattr__(self, "labels", labels)

    @property
    def dim(self) -> int:
        return 2**self.n_particles

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)

    def is_positive(self, tol: float = EIG_TOL) -> bool:
        return bool(self.eigenvalues().min() >= -tol)

    def axis_of(self, label: int) -> int:
        """Tensor-factor position of original particle ``label``."""
        try:
            return self.labels.index(label)
        except ValueError:
            raise ValueError(f"particle {label} is not part of this system {self.labels}") from None


def _normalized(amps: np.ndarray) -> np.ndarray:
    norm = np.linalg.norm(amps)
    if norm == 0:
        raise ValueError("state has all-zero amplitudes")
    return amps / norm


def _spin(value) -> SpinLabel:
    if isinstance(value, SpinLabel):
        return value
    if value in ("↑", "0", "u", "U", 0):
        return SpinLabel.UP
    if value in ("↓", "1", "d", "D", 1):
        return SpinLabel.DOWN
    raise ValueError(f"cannot interpret {value!r} as a spin label")


def parse_pattern(pattern: str | Iterable) -> tuple[SpinLabel, ...]:
    """Accept ``"↑↓↑"``, ``"010"`` or any iterable of SpinLabel / 0 / 1."""
    return tuple(_spin(p) for p in pattern)


def basis_index(pattern) -> int:
    spins = parse_pattern(pattern)
    if not spins:
        raise ValueError("pattern must contain at least one spin")
    index = 0
    for s in spins:
        index = (index << 1) | int(s)
    return index


def basis_pattern(index: int, n: int) -> tuple[SpinLabel, ...]:
    if not 0 <= index < 2**n:
        raise ValueError(f"index {index} out of range for {n} particles")
    return tuple(SpinLabel((index >> (n - k)) & 1) for k in range(1, n + 1))


def bit_of(index, particle: int, n: int):
    """Spin bit (0 = Up) of ``particle`` in basis ``index``; works on arrays."""
    return (index >> (n - particle)) & 1


def down_counts(n: int) -> np.ndarray:
    idx = np.arange(2**n)
    counts = np.zeros(2**n, dtype=int)
    for k in range(n):
        counts += (idx >> k) & 1
    return counts


def odd_parity_indices(n: int) -> np.ndarray:
    """Basis indices with an odd number of Down spins, increasing."""
    return np.flatnonzero(down_counts(n) % 2 == 1)


def make_state(n: int, terms: Iterable[tuple[object, complex]]) -> StateVector:
    amps = np.zeros(2**n, dtype=complex)
    seen = set()
    for pattern, amp in terms:
        spins = parse_pattern(pattern)
        if len(spins) != n:
            raise ValueError(f"pattern {pattern!r} does not have {n} spins")
        i = basis_index(spins)
        if i in seen:
            raise ValueError(f"duplicate pattern {pattern!r}")
        seen.add(i)
        amps[i] = amp
    return StateVector(n, _normalized(amps))


def inner_product(a: StateVector, b: StateVector) -> complex:
    if a.n_particles != b.n_particles:
        raise ValueError("states have different particle counts")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def overlap(a: StateVector, b: StateVector) -> float:
    """Projective fidelity ``|<a|b>|``; 1 means equal up to global phase."""
    return abs(inner_product(a, b))


def state_to_density(s: StateVector) -> DensityMatrix:
    amps = s.amplitudes
    return DensityMatrix(s.n_particles, np.outer(amps, amps.conj()))


def _check_particle(particle: int, n: int) -> int:
    if not isinstance(particle, (int, np.integer)) or not 1 <= particle <= n:
        raise ValueError(f"particle index {particle} out of range 1..{n}")
    return int(particle)


def _check_unitary(u: np.ndarray) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2):
        raise ValueError("local unitary must be 2x2")
    if not np.allclose(u.conj().T @ u, np.eye(2), atol=NORM_TOL, rtol=0):
        raise ValueError("matrix is not unitary")
    return u


def _apply_1q(amps: np.ndarray, n: int, particle: int, u: np.ndarray) -> np.ndarray:
    psi = amps.reshape((2,) * n)
    psi = np.tensordot(u, psi, axes=([1], [particle - 1]))
    return np.moveaxis(psi, 0, particle - 1).reshape(-1)


def apply_local_unitary(s: StateVector, particle: int, u) -> StateVector:
    particle = _check_particle(particle, s.n_particles)
    u = _check_unitary(u)
    return StateVector(s.n_particles, _apply_1q(s.amplitudes, s.n_particles, particle, u))


def apply_local_unitaries(s: StateVector, unitaries: dict[int, np.ndarray]) -> StateVector:
    amps = s.amplitudes
    for particle, u in unitaries.items():
        particle = _check_particle(particle, s.n_particles)
        amps = _apply_1q(amps, s.n_particles, particle, _check_unitary(u))
    return StateVector(s.n_particles, amps)


def basis_change_z_to_x(s: StateVector, particles: Iterable[int] | None = None) -> StateVector:
    """Re-express the selected particles in the (left, right) x basis.

    With ``|↑⟩ = (|←⟩+|→⟩)/√2`` and ``|↓⟩ = (|←⟩-|→⟩)/√2`` the coordinate map
    is the Hadamard matrix, so the transform is its own inverse.  ``None``
    selects every particle.  Output bit 0 stands for ``←``, bit 1 for ``→``.
    """
    n = s.n_particles
    selected = range(1, n + 1) if particles is None else sorted(set(particles))
    return apply_local_unitaries(s, {_check_particle(p, n): HADAMARD for p in selected})


def project_particle(s: StateVector, particle: int, axis: Axis | str, sign: int) -> StateVector:
    """Post-measurement state after observing ``sign`` along ``axis`` on one particle.

    The measured particle is removed; the result describes the others.
    """
    particle = _check_particle(particle, s.n_particles)
    if s.n_particles < 2:
        raise ValueError("need at least two particles")
    axis = Axis.parse(axis)
    # eigenvector for the outcome, as a bra on the measured factor
    vec = axis.rotation[:, 0 if sign == 1 else 1]
    psi = np.tensordot(vec.conj(), s.tensor(), axes=([0], [particle - 1]))
    return StateVector(s.n_particles - 1, _normalized(psi.reshape(-1)))


# -- JSON state files -------------------------------------------------------


def state_to_json(s: StateVector, threshold: float = 0.0, arrows: bool = True) -> dict:
    amps = []
    for i, a in enumerate(s.amplitudes):
        if abs(a) <= threshold or a == 0:
            continue
        spins = basis_pattern(i, s.n_particles)
        bits = "".join(x.arrow for x in spins) if arrows else "".join(str(int(x)) for x in spins)
        amps.append({"bits": bits, "re": float(a.real), "im": float(a.imag)})
    return {"n": s.n_particles, "amps": amps}


def state_from_json(obj: dict) -> tuple[StateVector, bool]:
    """Parse the JSON state format.

    Returns the normalized state and whether renormalization changed the norm
    by more than 1e-9.
    """
    try:
        n = int(obj["n"])
        entries = obj["amps"]
        terms = [(e["bits"], complex(float(e["re"]), float(e.get("im", 0.0)))) for e in entries]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed state object: {exc}") from exc
    if not 1 <= n <= MAX_STATE_QUBITS:
        raise ValueError(f"n={n} outside supported range 1..{MAX_STATE_QUBITS}")
    amps = np.zeros(2**n, dtype=complex)
    seen = set()
    for bits, amp in terms:
        spins = parse_pattern(bits)
        if len(spins) != n:
            raise ValueError(f"bit string {bits!r} does not have {n} spins")
        i = basis_index(spins)
        if i in seen:
            raise ValueError(f"duplicate bit string {bits!r}")
        seen.add(i)
        amps[i] = amp
    norm = np.linalg.norm(amps)
    if norm == 0:
        raise ValueError("state has all-zero amplitudes")
    return StateVector(n, amps / norm), bool(abs(norm - 1) > RENORM_REPORT_TOL)


def write_state(s: StateVector, path: str | Path) -> None:
    Path(path).write_text(json.dumps(state_to_json(s), ensure_ascii=False, indent=1) + "\n", encoding="utf-8")


def read_state(path: str | Path) -> tuple[StateVector, bool]:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: not valid JSON ({exc})") from exc
    return state_from_json(obj)
