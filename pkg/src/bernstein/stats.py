"""Projective-measurement statistics and the k-wise independence sweep."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .qstate import (
    Axis,
    DensityMatrix,
    StateVector,
    _apply_1q,
    odd_parity_indices,
    parse_axes,
)

PROB_TOL = 1e-9
MODULUS_TOL = 1e-9


class CertificateInconsistency(RuntimeError):
    """Support/modulus checks and the statistics sweep disagree."""


@dataclass(frozen=True)
class OutcomeQuery:
    """Joint outcome: each entry is ``(particle, axis, sign)`` with sign ±1."""

    entries: tuple[tuple[int, Axis, int], ...]

    def __post_init__(self):
        entries = tuple((int(p), Axis.parse(a), int(s)) for p, a, s in self.entries)
        if not entries:
            raise ValueError("query must name at least one particle")
        particles = [p for p, _, _ in entries]
        if len(set(particles)) != len(particles):
            raise ValueError(f"duplicate particle in query {particles}")
        if any(s not in (1, -1) for _, _, s in entries):
            raise ValueError("signs must be +1 or -1")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def parse(cls, pattern: str, axes: str | Sequence = "z") -> OutcomeQuery:
        """Build from dot notation such as ``"+•-"``.

        ``axes`` is one axis for every position or a single shared axis.  Use
        ``•`` or ``.`` for unmeasured particles.
        """
        if isinstance(axes, Axis) or (isinstance(axes, str) and len(axes) == 1):
            axes = [axes] * len(pattern)
        axes = parse_axes(axes, len(pattern))
        entries = []
        for k, (ch, ax) in enumerate(zip(pattern, axes), start=1):
            if ch in "•.·":
                continue
            if ch not in "+-−":
                raise ValueError(f"unexpected symbol {ch!r} in outcome pattern")
            entries.append((k, ax, 1 if ch == "+" else -1))
        return cls(tuple(entries))

    @property
    def particles(self) -> tuple[int, ...]:
        return tuple(p for p, _, _ in self.entries)

    def __str__(self) -> str:
        return " ".join(f"{p}{a.value}{'+' if s == 1 else '-'}" for p, a, s in self.entries)


def _rotated_probabilities(s: StateVector, axes: Sequence[Axis]) -> np.ndarray:
    """Outcome distribution after rotating each particle's axis onto z."""
    # the rotation tables are unitary by construction, so skip re-validation
    amps = s.amplitudes
    for k, axis in enumerate(axes, start=1):
        if axis is not Axis.Z:
            amps = _apply_1q(amps, s.n_particles, k, axis.rotation.conj().T)
    return np.abs(amps) ** 2


def outcome_distribution(s: StateVector) -> np.ndarray:
    return np.abs(s.amplitudes) ** 2


def _marginal(probs: np.ndarray, n: int, subset: Sequence[int]) -> np.ndarray:
    keep = sorted(subset)
    drop = tuple(k - 1 for k in range(1, n + 1) if k not in keep)
    return probs.reshape((2,) * n).sum(axis=drop).reshape(-1)


def marginal_table(s: StateVector | np.ndarray, subset: Iterable[int]) -> np.ndarray:
    """Marginal z-basis distribution of ``subset``; index bits follow sorted particle order.

    Accepts a state or a precomputed outcome distribution.
    """
    probs = outcome_distribution(s) if isinstance(s, StateVector) else np.asarray(s, dtype=float)
    n = int(round(np.log2(probs.size)))
    subset = sorted(set(subset))
    if not subset:
        raise ValueError("subset must be nonempty")
    if subset[0] < 1 or subset[-1] > n:
        raise ValueError(f"subset {subset} out of range 1..{n}")
    return _marginal(probs, n, subset)


def _rotated_density(rho: DensityMatrix, query: OutcomeQuery) -> tuple[np.ndarray, list[int]]:
    m = rho.n_particles
    u = np.array([[1.0 + 0j]])
    for pos in range(m):
        factor = np.eye(2, dtype=complex)
        for p, ax, _ in query.entries:
            if rho.axis_of(p) == pos:
                factor = ax.rotation.conj().T
        u = np.kron(u, factor)
    return u @ rho.entries @ u.conj().T, [rho.axis_of(p) for p in query.particles]


def joint_probability(s: StateVector | DensityMatrix, q: OutcomeQuery) -> float:
    """Probability of the joint projective outcome ``q``."""
    if isinstance(s, DensityMatrix):
        rotated, positions = _rotated_density(s, q)
        diag = np.real(np.diag(rotated)).reshape((2,) * s.n_particles)
        index = [slice(None)] * s.n_particles
        for pos, (_, _, sign) in zip(positions, q.entries):
            index[pos] = 0 if sign == 1 else 1
        return float(diag[tuple(index)].sum())
    n = s.n_particles
    if max(q.particles) > n or min(q.particles) < 1:
        raise ValueError(f"query {q} addresses particles outside 1..{n}")
    axes = [Axis.Z] * n
    for p, ax, _ in q.entries:
        axes[p - 1] = ax
    probs = _rotated_probabilities(s, axes).reshape((2,) * n)
    index = [slice(None)] * n
    for p, _, sign in q.entries:
        index[p - 1] = 0 if sign == 1 else 1
    return float(probs[tuple(index)].sum())


@dataclass(frozen=True)
class SizeVerdict:
    size: int
    independent: bool
    worst_deviation: float
    witness: OutcomeQuery | None = None

    def __post_init__(self):
        if self.independent == (self.witness is not None):
            raise ValueError("witness must be present exactly when independence fails")


@dataclass(frozen=True)
class IndependenceReport:
    max_checked: int
    verdicts: dict[int, SizeVerdict]
    n_wise_product: float
    n_wise_joint: float
    singles: np.ndarray = field(repr=False, default=None)

    def independent_through(self) -> int:
        """Largest size ``j`` such that every size up to ``j`` is independent."""
        best = 1
        for size in sorted(self.verdicts):
            if not self.verdicts[size].independent:
                break
            best = size
        return best

    def to_json(self) -> dict:
        return {
            "max_checked": self.max_checked,
            "per_size": [
                {
                    "size": v.size,
                    "independent": v.independent,
                    "worst_deviation": v.worst_deviation,
                    "witness": None if v.witness is None else str(v.witness),
                }
                for v in (self.verdicts[k] for k in sorted(self.verdicts))
            ],
            "n_wise": {"joint": self.n_wise_joint, "product": self.n_wise_product},
        }


def kwise_independence_report(
    s: StateVector,
    axes: str | Sequence[Axis | str] = "z",
    max_k: int | None = None,
    tol: float = PROB_TOL,
) -> IndependenceReport:
    """Compare every joint outcome probability on subsets of size ``2..max_k``
    with the product of the single-particle probabilities.

    Subsets are visited by increasing size, then lexicographically; sign
    patterns in basis order (all ``+`` first).  The witness for a failing size
    is the first pattern whose deviation reaches ``tol``.
    """
    n = s.n_particles
    if isinstance(axes, str) and len(axes) == 1:
        axes = axes * n
    axes = parse_axes(axes, n)
    max_k = n if max_k is None else int(max_k)
    if not 1 <= max_k <= n:
        raise ValueError(f"max_k must lie in 1..{n}")

    probs = _rotated_probabilities(s, axes)
    tensor = probs.reshape((2,) * n)
    singles = np.array([_marginal(probs, n, [k]) for k in range(1, n + 1)])  # (n, 2)

    verdicts = {}
    for size in range(2, max_k + 1):
        worst, witness = 0.0, None
        for subset in itertools.combinations(range(1, n + 1), size):
            drop = tuple(k - 1 for k in range(1, n + 1) if k not in subset)
            joint = tensor.sum(axis=drop).reshape(-1)
            product = singles[subset[0] - 1]
            for k in subset[1:]:
                product = np.multiply.outer(product, singles[k - 1]).reshape(-1)
            dev = np.abs(joint - product)
            worst = max(worst, float(dev.max()))
            if witness is None and dev.max() >= tol:
                pattern = int(np.argmax(dev >= tol))
                witness = OutcomeQuery(
                    tuple(
                        (k, axes[k - 1], 1 - 2 * ((pattern >> (size - 1 - j)) & 1))
                        for j, k in enumerate(subset)
                    )
                )
        verdicts[size] = SizeVerdict(size, witness is None, worst, witness)

    return IndependenceReport(
        max_checked=max_k,
        verdicts=verdicts,
        n_wise_product=float(np.prod(singles[:, 0])),
        n_wise_joint=float(probs[0]),
        singles=singles,
    )


class CertificateReason(enum.Enum):
    SUPPORT = "support"
    MODULUS = "modulus"
    INDEPENDENCE = "independence"
    N_WISE = "n_wise"


@dataclass(frozen=True)
class BernsteinCertificate:
    is_bernstein: bool
    reason: CertificateReason | None
    report: IndependenceReport = field(repr=False)

    def __bool__(self) -> bool:
        return self.is_bernstein


def _statistics_failure(report: IndependenceReport, n: int, tol: float) -> CertificateReason | None:
    if np.any(np.abs(report.singles[:, 0] - 0.5) >= tol):
        return CertificateReason.INDEPENDENCE
    for size in range(2, n):
        if not report.verdicts[size].independent:
            return CertificateReason.INDEPENDENCE
    if report.n_wise_joint >= tol:
        return CertificateReason.N_WISE
    return None


def bernstein_certificate(s: StateVector, tol: float = PROB_TOL) -> BernsteinCertificate:
    """Decide whether ``s`` realizes the homogeneous Bernstein distribution in z.

    Two independent routes are evaluated: the amplitude structure (odd-parity
    support with equal moduli) and the measured statistics (singles 1/2,
    independence through size N-1, zero probability of all-up).  They must
    agree; a disagreement raises :class:`CertificateInconsistency`.
    """
    n = s.n_particles
    if n < 3:
        raise ValueError("the certificate needs N >= 3")
    mod = np.abs(s.amplitudes)
    odd = np.zeros(2**n, dtype=bool)
    odd[odd_parity_indices(n)] = True

    # Missing odd terms are a support failure; unequal odd moduli are reported
    # as a modulus failure before any stray even-parity terms.
    reason = None
    if np.any(mod[odd] <= MODULUS_TOL):
        reason = CertificateReason.SUPPORT
    elif np.any(np.abs(mod[odd] - 2.0 ** (-(n - 1) / 2)) >= MODULUS_TOL):
        reason = CertificateReason.MODULUS
    elif np.any(mod[~odd] > MODULUS_TOL):
        reason = CertificateReason.SUPPORT

    report = kwise_independence_report(s, "z", n, tol)
    stats_reason = _statistics_failure(report, n, tol)
    if (reason is None) != (stats_reason is None):
        raise CertificateInconsistency(
            f"amplitude checks say {reason}, statistics say {stats_reason}"
        )
    return BernsteinCertificate(reason is None, reason, report)


@dataclass(frozen=True)
class Correlation:
    p1: float
    p2: float
    p12: float
    independent: bool


def correlation_check(rho: DensityMatrix, q1: OutcomeQuery, q2: OutcomeQuery, tol: float = PROB_TOL) -> Correlation:
    if set(q1.particles) & set(q2.particles):
        raise ValueError("queries must address disjoint particles")
    p1 = joint_probability(rho, q1)
    p2 = joint_probability(rho, q2)
    p12 = joint_probability(rho, OutcomeQuery(q1.entries + q2.entries))
    return Correlation(p1, p2, p12, abs(p12 - p1 * p2) < tol)
