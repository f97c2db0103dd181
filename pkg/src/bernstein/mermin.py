"""Generalized Mermin relations for GHZ_z states and their GF(2) contradictions.

Each relation ``prod_n m_{n,a_n} = sign`` is encoded by an exponent bitmask
over the 2N hypothetical outcomes ``(m_1x..m_Nx, m_1y..m_Ny)``; since every
``m**2 = 1``, multiplying relations XORs their masks.  A set of relations is a
contradiction when the masks cancel while the signs multiply to -1.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass
from math import comb

import numpy as np

from .constructions import ghz
from .qstate import PAULI, StateVector

EIGEN_TOL = 1e-10


class NotAnEigenstateError(ValueError):
    def __init__(self, axes: str, residual: float):
        super().__init__(f"state is not an eigenstate of {axes} (residual {residual:.3g})")
        self.axes = axes
        self.residual = residual


@dataclass(frozen=True)
class MerminRelation:
    axes: str
    exponent: int
    sign: int

    @property
    def n(self) -> int:
        return len(self.axes)

    @property
    def y_count(self) -> int:
        return self.axes.count("y")

    def exponent_vector(self) -> np.ndarray:
        """Bits in the order ``m_1x..m_Nx, m_1y..m_Ny``."""
        return np.array([(self.exponent >> (2 * self.n - 1 - i)) & 1 for i in range(2 * self.n)], dtype=np.uint8)

    def __str__(self) -> str:
        lhs = "".join(f"m{k}{a}" for k, a in enumerate(self.axes, start=1))
        return f"{lhs} = {self.sign:+d}"


def _exponent(axes: str) -> int:
    n = len(axes)
    mask = 0
    for k, a in enumerate(axes):
        bit = k if a == "x" else n + k
        mask |= 1 << (2 * n - 1 - bit)
    return mask


def predicted_sign(axes: str) -> int:
    """Eigenvalue on ``ghz(N, Z, -1)``: -1 when the number of y factors is 2k with k even."""
    k = axes.count("y") // 2
    return -1 if k % 2 == 0 else 1


def mermin_observables(n: int) -> list[MerminRelation]:
    if n < 3:
        raise ValueError("Mermin relations need N >= 3")
    rels = []
    for axes in itertools.product("xy", repeat=n):
        axes = "".join(axes)
        if axes.count("y") % 2 == 0:
            rels.append(MerminRelation(axes, _exponent(axes), predicted_sign(axes)))
    assert len(rels) == sum(comb(n, 2 * k) for k in range(n // 2 + 1))
    return rels


def apply_pauli_string(s: StateVector, axes: str) -> np.ndarray:
    n = s.n_particles
    if len(axes) != n:
        raise ValueError(f"axis string {axes!r} does not have {n} entries")
    psi = s.tensor()
    for k, a in enumerate(axes.lower()):
        if a not in PAULI:
            raise ValueError(f"unknown axis {a!r}")
        psi = np.moveaxis(np.tensordot(PAULI[a], psi, axes=([1], [k])), 0, k)
    return psi.reshape(-1)


def observable_eigenvalue(s: StateVector, axes: str, tol: float = EIGEN_TOL) -> float:
    """Eigenvalue of the Pauli product ``axes`` on ``s``; raises if ``s`` is not an eigenstate."""
    out = apply_pauli_string(s, axes)
    lam = np.vdot(s.amplitudes, out)
    residual = float(np.abs(out - lam * s.amplitudes).max())
    if residual > tol:
        raise NotAnEigenstateError(axes, residual)
    return float(lam.real)


@dataclass(frozen=True)
class ContradictionSet:
    relation_indices: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.relation_indices)


def _combos_by_mask(masks: list[int], size: int):
    for combo in itertools.combinations(range(len(masks)), size):
        x = 0
        for i in combo:
            x ^= masks[i]
        yield combo, x


def find_contradictions(n: int, max_size: int, relations: list[MerminRelation] | None = None) -> list[ContradictionSet]:
    """All relation subsets of size <= ``max_size`` whose masks XOR to zero and
    whose signs multiply to -1, sorted by size then lexicographically.

    Sizes up to 4 are enumerated directly; larger sizes meet in the middle,
    pairing an ordered lower half with an upper half that starts after it.
    """
    rels = mermin_observables(n) if relations is None else relations
    m = len(rels)
    if not 1 <= max_size <= m:
        raise ValueError(f"max_size must lie in 1..{m}")
    masks = [r.exponent for r in rels]
    negative = [r.sign < 0 for r in rels]
    found = []
    for size in range(2, max_size + 1, 2):  # every mask has one bit per particle, so odd sizes never cancel
        if size <= 4:
            candidates = (c for c, x in _combos_by_mask(masks, size) if x == 0)
        else:
            candidates = _meet_in_middle(masks, size)
        for combo in candidates:
            if sum(negative[i] for i in combo) % 2 == 1:
                found.append(ContradictionSet(tuple(combo)))
    found.sort(key=lambda c: (c.size, c.relation_indices))
    return found


def _meet_in_middle(masks: list[int], size: int):
    low = size // 2
    table = defaultdict(list)
    for combo, x in _combos_by_mask(masks, low):
        table[x].append(combo)
    for combo, x in _combos_by_mask(masks, size - low):
        for head in table.get(x, ()):
            if head[-1] < combo[0]:
                yield head + combo


@dataclass(frozen=True)
class RelationRow:
    relation: MerminRelation
    measured: float | None


@dataclass(frozen=True)
class RelationTableCheck:
    all_match: bool
    mismatches: list[RelationRow]
    rows: list[RelationRow]


def verify_relation_table(n: int, relative_sign: int = -1) -> RelationTableCheck:
    """Measure every relation on ``ghz(n, Z, relative_sign)`` and compare with
    the parity prediction (which assumes the -1 sign)."""
    if n > 12:
        raise ValueError("relation tables are limited to N <= 12")
    state = ghz(n, "z", relative_sign)
    rows, bad = [], []
    for rel in mermin_observables(n):
        try:
            measured = observable_eigenvalue(state, rel.axes)
        except NotAnEigenstateError:
            measured = None
        row = RelationRow(rel, measured)
        rows.append(row)
        if measured is None or round(measured) != rel.sign:
            bad.append(row)
    return RelationTableCheck(not bad, bad, rows)
