"""Partial traces, partial transposes and the fragility analysis."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Literal

import numpy as np

from .constructions import PhaseAssignment, TermPhaseVector
from .phase_torus import candidate_deltas
from .qstate import (
    EIG_TOL,
    HADAMARD,
    MAX_DENSITY_QUBITS,
    PAULI,
    DensityMatrix,
    StateVector,
    apply_local_unitary,
    down_counts,
)

RESIDUAL_TOL = 1e-10
# bytes of complex128 partial transposes diagonalized per batch
_BATCH_BYTES = 64 * 2**20
# density eigenvalues and factor singular values below these count as zero
# when restricting a partial transpose to the marginal supports
_EIGEN_CUT = 1e-14
_SUPPORT_CUT = 1e-13
_RESTRICTED_MAX_ERROR = 1e-12


class EigensolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class BipartiteSplit:
    side_a: tuple[int, ...]
    side_b: tuple[int, ...]

    def __post_init__(self):
        a, b = tuple(sorted(set(self.side_a))), tuple(sorted(set(self.side_b)))
        if not a or not b:
            raise ValueError("both sides of a split must be nonempty")
        if set(a) & set(b):
            raise ValueError("split sides overlap")
        object.__setattr__(self, "side_a", a)
        object.__setattr__(self, "side_b", b)

    def check(self, rho: DensityMatrix) -> None:
        if set(self.side_a) | set(self.side_b) != set(rho.labels):
            raise ValueError(f"split {self.side_a}|{self.side_b} does not cover system {rho.labels}")

    def swapped(self) -> BipartiteSplit:
        return BipartiteSplit(self.side_b, self.side_a)


def all_splits(labels: Iterable[int]) -> list[BipartiteSplit]:
    """Every unordered bipartition; ``side_a`` holds the smallest label."""
    labels = sorted(labels)
    first, rest = labels[0], labels[1:]
    out = []
    for r in range(len(rest) + 1):
        for extra in itertools.combinations(rest, r):
            a = (first,) + extra
            b = tuple(x for x in labels if x not in a)
            if b:
                out.append(BipartiteSplit(a, b))
    return out


def single_splits(labels: Iterable[int]) -> list[BipartiteSplit]:
    """Each particle against the rest."""
    labels = sorted(labels)
    if len(labels) == 2:
        return [BipartiteSplit((labels[0],), (labels[1],))]
    return [BipartiteSplit((k,), tuple(x for x in labels if x != k)) for k in labels]


def partial_trace(rho: StateVector | DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Reduce to the particles in ``keep`` (original 1-based labels)."""
    keep = sorted(set(keep))
    if isinstance(rho, StateVector):
        n = rho.n_particles
        labels = tuple(range(1, n + 1))
    else:
        n = rho.n_particles
        labels = rho.labels
    if not keep or len(keep) >= n:
        raise ValueError("keep must be a nonempty proper subset of the particles")
    if not set(keep) <= set(labels):
        raise ValueError(f"keep {keep} not contained in {labels}")
    if len(keep) > MAX_DENSITY_QUBITS:
        raise ValueError(f"reduced dimension exceeds 2**{MAX_DENSITY_QUBITS}")
    kpos = [labels.index(k) for k in keep]
    tpos = [i for i in range(n) if i not in kpos]
    dk = 2 ** len(kpos)

    if isinstance(rho, StateVector):
        psi = np.transpose(rho.tensor(), kpos + tpos).reshape(dk, -1)
        out = psi @ psi.conj().T
    else:
        t = rho.entries.reshape((2,) * (2 * n))
        perm = kpos + tpos + [n + i for i in kpos] + [n + i for i in tpos]
        dt = 2 ** len(tpos)
        t = np.transpose(t, perm).reshape(dk, dt, dk, dt)
        out = np.einsum("ajbj->ab", t)
    out = 0.5 * (out + out.conj().T)
    return DensityMatrix(len(keep), out, tuple(keep))


def _pt_permutation(rho: DensityMatrix, side_b: Iterable[int]) -> list[int]:
    m = rho.n_particles
    perm = list(range(2 * m))
    for label in side_b:
        pos = rho.axis_of(label)
        perm[pos], perm[m + pos] = m + pos, pos
    return perm


def partial_transpose(rho: DensityMatrix, split: BipartiteSplit) -> np.ndarray:
    """Transpose the tensor factors in ``split.side_b``."""
    split.check(rho)
    m = rho.n_particles
    t = rho.entries.reshape((2,) * (2 * m))
    return np.transpose(t, _pt_permutation(rho, split.side_b)).reshape(rho.dim, rho.dim)


def _min_eigenvalues(mats: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.eigvalsh(mats)[..., 0]
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(str(exc)) from exc


def ppt_min_eigenvalue(rho: DensityMatrix, split: BipartiteSplit) -> float:
    return float(_min_eigenvalues(partial_transpose(rho, split)))


def _factor(rho: DensityMatrix) -> tuple[np.ndarray, float]:
    """Columns ``f_j`` with ``rho ≈ sum_j f_j f_j^†`` and the Frobenius error of the fit."""
    w, v = np.linalg.eigh(rho.entries)
    keep = w > _EIGEN_CUT
    return v[:, keep] * np.sqrt(w[keep]), float(np.sqrt(np.sum(w[~keep] ** 2)))


def _restricted_ppt_min(factor: np.ndarray, rho: DensityMatrix, split: BipartiteSplit) -> tuple[float, float] | None:
    """Minimum partial-transpose eigenvalue computed on the marginal supports.

    The partial transpose over B lives on ``supp(rho_A) ⊗ conj(supp(rho_B))``,
    so for low-rank states the eigenproblem shrinks to that product space.
    Returns ``(value, error_bound)``, or None when the supports are full.
    """
    m, r = rho.n_particles, factor.shape[1]
    pa = [rho.axis_of(k) for k in split.side_a]
    pb = [rho.axis_of(k) for k in split.side_b]
    da, db = 2 ** len(pa), 2 ** len(pb)
    t = np.transpose(factor.reshape((2,) * m + (r,)), pa + pb + [m]).reshape(da, db, r)
    ua, sa, _ = np.linalg.svd(t.reshape(da, db * r), full_matrices=False)
    ub, sb, _ = np.linalg.svd(t.transpose(1, 0, 2).reshape(db, da * r), full_matrices=False)
    ka, kb = sa > _SUPPORT_CUT, sb > _SUPPORT_CUT
    if ka.sum() * kb.sum() == da * db:
        return None
    # Frobenius norm of the discarded part of the factor; bounds the eigenvalue shift
    dropped = np.sqrt(np.sum(sa[~ka] ** 2)) + np.sqrt(np.sum(sb[~kb] ** 2))
    c = np.einsum("ia,jb,ijr->abr", ua[:, ka].conj(), ub[:, kb].conj(), t)
    na, nb = c.shape[:2]
    reduced = np.einsum("abr,cdr->abcd", c, c.conj())
    pt = reduced.transpose(0, 3, 2, 1).reshape(na * nb, na * nb)
    value = min(float(_min_eigenvalues(pt)), 0.0)
    return value, 2 * dropped + dropped**2


def ppt_minima(rho: DensityMatrix, splits: list[BipartiteSplit]) -> np.ndarray:
    """Minimum partial-transpose eigenvalue for each split.

    Splits whose marginal supports are proper subspaces are solved on those
    supports (agreeing with the dense solve to within 1e-12); the rest are
    diagonalized densely in batches.
    """
    for s in splits:
        s.check(rho)
    out = np.empty(len(splits))
    factor, fit_error = _factor(rho)
    dense = []
    for i, s in enumerate(splits):
        restricted = _restricted_ppt_min(factor, rho, s)
        if restricted is not None and restricted[1] + fit_error < _RESTRICTED_MAX_ERROR:
            out[i] = restricted[0]
        else:
            dense.append(i)
    per_batch = max(1, _BATCH_BYTES // (16 * rho.dim * rho.dim))
    for start in range(0, len(dense), per_batch):
        chunk = dense[start : start + per_batch]
        mats = np.stack([partial_transpose(rho, splits[i]) for i in chunk])
        out[chunk] = _min_eigenvalues(mats)
    return out


class GhzFrame(enum.Enum):
    """How a GHZ-orbit state is written as ``(|a_1...a_N⟩ + c|b_1...b_N⟩)/√2``."""

    Z = "z"  # weight on |↑...↑⟩ and |↓...↓⟩ only
    X_ODD = "x-odd"  # local-phase image of the special Bernstein state
    X_EVEN = "x-even"  # same after flipping particle 1
    NONE = "none"


@dataclass(frozen=True)
class SeparableDecomposition:
    """Two (N-1)-particle product states whose equal mixture should equal the
    reduced state, plus the entrywise residual of that claim."""

    product_state_1: StateVector
    product_state_2: StateVector
    factors_1: tuple[np.ndarray, ...] = field(repr=False)
    factors_2: tuple[np.ndarray, ...] = field(repr=False)
    residual: float
    frame: GhzFrame

    @property
    def certified(self) -> bool:
        return self.residual < RESIDUAL_TOL

    def mixture(self) -> np.ndarray:
        a, b = self.product_state_1.amplitudes, self.product_state_2.amplitudes
        return 0.5 * (np.outer(a, a.conj()) + np.outer(b, b.conj()))


def classify_frame(s: StateVector, tol: float = 1e-9) -> GhzFrame:
    n = s.n_particles
    mod = np.abs(s.amplitudes)
    present = mod > tol
    if present.sum() == 2 and present[0] and present[-1]:
        return GhzFrame.Z
    if n >= 3:
        parity = down_counts(n) % 2
        equal = 2.0 ** (-(n - 1) / 2)
        for frame, wanted in ((GhzFrame.X_ODD, 1), (GhzFrame.X_EVEN, 0)):
            on = parity == wanted
            if np.all(present == on) and np.all(np.abs(mod[on] - equal) < tol):
                return frame
    return GhzFrame.NONE


def _product(factors: list[np.ndarray]) -> np.ndarray:
    out = np.array([1.0 + 0j])
    for f in factors:
        out = np.kron(out, f)
    return out


def _ghz_factors(s: StateVector, frame: GhzFrame) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Single-particle vectors ``a_k``, ``b_k`` (orthonormal per particle)."""
    n = s.n_particles
    up, down = np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex)
    if frame is GhzFrame.Z:
        return [up] * n, [down] * n

    flip = frame is GhzFrame.X_EVEN
    target = apply_local_unitary(s, 1, PAULI["x"]) if flip else s
    deltas, _ = candidate_deltas(n, TermPhaseVector.of_state(target))
    phases = PhaseAssignment.from_deltas(deltas)
    left, right = HADAMARD[:, 0], HADAMARD[:, 1]
    a, b = [], []
    for k in range(n):
        u = np.diag([np.exp(1j * phases.alphas[k]), np.exp(1j * phases.betas[k])])
        a.append(u @ left)
        b.append(u @ right)
    if flip:
        a[0], b[0] = PAULI["x"] @ a[0], PAULI["x"] @ b[0]
    return a, b


def ghz_orbit_separable_decomposition(s: StateVector, traced: int) -> SeparableDecomposition:
    """Constructive separable decomposition of a one-particle reduction.

    A state of the form ``(|a_1...a_N⟩ + c|b_1...b_N⟩)/√2`` with
    ``⟨a_k|b_k⟩ = 0`` reduces, after tracing particle ``traced``, to the equal
    mixture of the two remaining product states.  The local-phase parameters
    of an x-frame state are recovered from its term phases and pushed through
    the x-basis change.  A residual above 1e-10 means ``s`` is not in the orbit.
    """
    n = s.n_particles
    if not 1 <= traced <= n:
        raise ValueError(f"traced particle {traced} out of range 1..{n}")
    if n < 2:
        raise ValueError("need at least two particles")
    frame = classify_frame(s)
    if n < 3 and frame is not GhzFrame.Z:
        raise ValueError("two-particle states are only decomposed in the z frame")
    # off-orbit inputs get the best-fit x-frame candidate; the residual exposes them
    a, b = _ghz_factors(s, GhzFrame.X_ODD if frame is GhzFrame.NONE else frame)
    keep = [k for k in range(1, n + 1) if k != traced]
    fa = [a[k - 1] for k in keep]
    fb = [b[k - 1] for k in keep]
    p1 = StateVector(n - 1, _product(fa))
    p2 = StateVector(n - 1, _product(fb))
    reduced = partial_trace(s, keep)
    mix = 0.5 * (np.outer(p1.amplitudes, p1.amplitudes.conj()) + np.outer(p2.amplitudes, p2.amplitudes.conj()))
    residual = float(np.abs(mix - reduced.entries).max())
    return SeparableDecomposition(p1, p2, tuple(fa), tuple(fb), residual, frame)


class Verdict(enum.Enum):
    SEPARABLE = "separable"
    ENTANGLED = "entangled"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class SplitResult:
    split: BipartiteSplit
    ppt_min: float


@dataclass(frozen=True)
class ParticleFragility:
    traced: int
    splits: tuple[SplitResult, ...]
    residual: float | None
    verdict: Verdict

    @property
    def min_ppt(self) -> float:
        return min((r.ppt_min for r in self.splits), default=0.0)

    def to_json(self) -> dict:
        return {
            "traced": self.traced,
            "splits": [{"a": list(r.split.side_a), "b": list(r.split.side_b), "ppt_min": r.ppt_min} for r in self.splits],
            "residual": self.residual,
            "verdict": self.verdict.value,
        }


@dataclass(frozen=True)
class FragilityReport:
    per_particle: dict[int, ParticleFragility]

    @property
    def fragile(self) -> bool:
        return all(p.verdict is Verdict.SEPARABLE for p in self.per_particle.values())

    def to_json(self) -> list[dict]:
        return [self.per_particle[k].to_json() for k in sorted(self.per_particle)]


def decide(
    ppt_mins: Iterable[float],
    residual: float | None,
    n_reduced: int,
    eig_tol: float = EIG_TOL,
    residual_tol: float = RESIDUAL_TOL,
) -> Verdict:
    ppt_mins = list(ppt_mins)
    if any(v < -eig_tol for v in ppt_mins):
        return Verdict.ENTANGLED
    if residual is not None and residual < residual_tol:
        return Verdict.SEPARABLE
    # PPT is sufficient for two qubits; a single qubit is trivially separable
    if n_reduced <= 2:
        return Verdict.SEPARABLE
    return Verdict.INCONCLUSIVE


def fragility_report(
    s: StateVector,
    splits: Literal["all", "single"] = "all",
    eig_tol: float = EIG_TOL,
    residual_tol: float = RESIDUAL_TOL,
) -> FragilityReport:
    """Trace out each particle in turn and analyse the reduced state.

    ``splits="single"`` restricts the PPT scan to one-vs-rest cuts, which keeps
    N near the cap tractable.
    """
    n = s.n_particles
    if n > MAX_DENSITY_QUBITS - 1:
        raise ValueError(f"fragility analysis is capped at N <= {MAX_DENSITY_QUBITS - 1}")
    if n < 2:
        raise ValueError("need at least two particles")
    frame = classify_frame(s)
    out = {}
    for traced in range(1, n + 1):
        keep = [k for k in range(1, n + 1) if k != traced]
        if len(keep) == 1:
            out[traced] = ParticleFragility(traced, (), None, Verdict.SEPARABLE)
            continue
        reduced = partial_trace(s, keep)
        cuts = all_splits(keep) if splits == "all" else single_splits(keep)
        mins = ppt_minima(reduced, cuts)
        residual = None
        if frame is not GhzFrame.NONE:
            residual = ghz_orbit_separable_decomposition(s, traced).residual
        results = tuple(SplitResult(c, float(v)) for c, v in zip(cuts, mins))
        out[traced] = ParticleFragility(traced, results, residual, decide(mins, residual, len(keep), eig_tol, residual_tol))
    return FragilityReport(out)
