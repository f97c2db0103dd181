"""Brute-force reference computations, deliberately independent of the library."""

import itertools

import numpy as np

I2 = np.eye(2, dtype=complex)
SIGMA = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# Explicit term listings of the three-, four- and five-particle states
B3_TERMS = ["↑↑↓", "↑↓↑", "↓↑↑", "↓↓↓"]
B4_TERMS = ["↑↑↑↓", "↑↑↓↑", "↑↓↑↑", "↓↑↑↑", "↑↓↓↓", "↓↑↓↓", "↓↓↑↓", "↓↓↓↑"]
B5_TERMS = [
    "↑↑↑↑↓", "↑↑↑↓↑", "↑↑↓↑↑", "↑↓↑↑↑",
    "↓↑↑↑↑", "↑↑↓↓↓", "↑↓↑↓↓", "↑↓↓↑↓",
    "↑↓↓↓↑", "↓↑↑↓↓", "↓↑↓↑↓", "↓↑↓↓↑",
    "↓↓↑↑↓", "↓↓↑↓↑", "↓↓↓↑↑", "↓↓↓↓↓",
]
LISTED_TERMS = {3: B3_TERMS, 4: B4_TERMS, 5: B5_TERMS}

RHO23 = 0.25 * np.array([[1, 0, 0, 1], [0, 1, 1, 0], [0, 1, 1, 0], [1, 0, 0, 1]], dtype=complex)


def ket(arrows):
    """Kronecker product of single-spin kets."""
    up, down = np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex)
    out = np.array([1], dtype=complex)
    for a in arrows:
        out = np.kron(out, up if a == "↑" else down)
    return out


def listed_state(n):
    v = sum(ket(t) for t in LISTED_TERMS[n])
    return v / np.linalg.norm(v)


def full_projector(n, entries):
    """``prod (1 ± sigma)/2`` as an explicit 2^n x 2^n operator.

    ``entries`` is a list of (particle, axis_letter, sign).
    """
    factors = [I2] * n
    for p, axis, sign in entries:
        factors[p - 1] = 0.5 * (I2 + sign * SIGMA[axis])
    op = np.array([[1]], dtype=complex)
    for f in factors:
        op = np.kron(op, f)
    return op


def full_operator(n, letters):
    op = np.array([[1]], dtype=complex)
    for a in letters:
        op = np.kron(op, SIGMA[a])
    return op


def brute_probability(psi, n, entries):
    return float(np.real(np.vdot(psi, full_projector(n, entries) @ psi)))


def brute_partial_trace(rho, n, keep):
    """Explicit index summation over the traced particles."""
    keep = sorted(keep)
    traced = [k for k in range(1, n + 1) if k not in keep]
    dk = 2 ** len(keep)
    out = np.zeros((dk, dk), dtype=complex)

    def index(kbits, tbits):
        bits = [0] * n
        for k, b in zip(keep, kbits):
            bits[k - 1] = b
        for k, b in zip(traced, tbits):
            bits[k - 1] = b
        return int("".join(map(str, bits)), 2)

    for i, kb in enumerate(itertools.product((0, 1), repeat=len(keep))):
        for j, kb2 in enumerate(itertools.product((0, 1), repeat=len(keep))):
            out[i, j] = sum(rho[index(kb, tb), index(kb2, tb)] for tb in itertools.product((0, 1), repeat=len(traced)))
    return out


def brute_partial_transpose(rho, m, side_b_positions):
    """Transpose factors at 0-based positions by explicit index swapping."""
    d = 2**m
    out = np.zeros_like(rho)
    for i in range(d):
        for j in range(d):
            bi = [(i >> (m - 1 - k)) & 1 for k in range(m)]
            bj = [(j >> (m - 1 - k)) & 1 for k in range(m)]
            for k in side_b_positions:
                bi[k], bj[k] = bj[k], bi[k]
            out[int("".join(map(str, bi)), 2), int("".join(map(str, bj)), 2)] = rho[i, j]
    return out


def brute_contradictions(relations, max_size):
    """Every subset up to max_size via itertools; relations are (axes, sign)."""
    n = len(relations[0][0])
    found = []
    for size in range(1, max_size + 1):
        for combo in itertools.combinations(range(len(relations)), size):
            counts = np.zeros((n, 2), dtype=int)
            sign = 1
            for i in combo:
                axes, s = relations[i]
                sign *= s
                for k, a in enumerate(axes):
                    counts[k, 0 if a == "x" else 1] += 1
            if np.all(counts % 2 == 0) and sign == -1:
                found.append(combo)
    return found


def brute_bernstein(n):
    """Counting-law construction: all labels with an odd number of downs."""
    terms = ["".join(t) for t in itertools.product("↑↓", repeat=n) if t.count("↓") % 2 == 1]
    v = sum(ket(t) for t in terms)
    return v / np.linalg.norm(v)


def random_state(n, rng):
    v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return v / np.linalg.norm(v)
