import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bernstein.constructions import ghz, special_bernstein
from bernstein.qstate import (
    HADAMARD,
    Axis,
    DensityMatrix,
    SpinLabel,
    StateVector,
    apply_local_unitary,
    basis_change_z_to_x,
    basis_index,
    basis_pattern,
    inner_product,
    make_state,
    overlap,
    project_particle,
    read_state,
    state_from_json,
    state_to_density,
    state_to_json,
    write_state,
)

from oracles import B3_TERMS, ket, random_state

U, D = SpinLabel.UP, SpinLabel.DOWN


@pytest.mark.parametrize(
    "pattern, index",
    [((U, U, U), 0), ((U, U, D), 1), ((D, U, U), 4), ("↓↓↓", 7), ("0101", 5)],
)
def test_basis_index(pattern, index):
    assert basis_index(pattern) == index


def test_basis_index_rejects_empty():
    with pytest.raises(ValueError):
        basis_index(())


@pytest.mark.parametrize("n", range(1, 13))
def test_basis_index_roundtrip(n):
    indices = [basis_index(basis_pattern(i, n)) for i in range(2**n)]
    assert indices == list(range(2**n))


def test_make_state_three_particle_listing():
    s = make_state(3, [(t, 1) for t in B3_TERMS])
    np.testing.assert_allclose(s.amplitudes[[1, 2, 4, 7]], 0.5, atol=1e-15)
    assert np.count_nonzero(s.amplitudes) == 4


def test_make_state_small():
    assert np.allclose(make_state(1, [((U,), 1)]).amplitudes, [1, 0])
    bell = make_state(2, [((U, U), 1), ((D, D), 1)])
    np.testing.assert_allclose(bell.amplitudes, [2**-0.5, 0, 0, 2**-0.5])


def test_make_state_errors():
    with pytest.raises(ValueError, match="duplicate"):
        make_state(2, [("↑↑", 1), ("00", 2)])
    with pytest.raises(ValueError, match="all-zero"):
        make_state(2, [("↑↑", 0)])


def test_inner_product():
    b3 = special_bernstein(3)
    assert inner_product(b3, b3) == pytest.approx(1, abs=1e-12)
    assert inner_product(make_state(1, [("↑", 1)]), make_state(1, [("↓", 1)])) == 0
    assert overlap(b3, ghz(3, "x", -1)) == pytest.approx(1, abs=1e-12)
    with pytest.raises(ValueError):
        inner_product(b3, ghz(4))


def test_state_to_density():
    up = state_to_density(make_state(1, [("↑", 1)]))
    np.testing.assert_array_equal(up.entries, np.diag([1, 0]))

    rho = state_to_density(special_bernstein(3)).entries
    support = [1, 2, 4, 7]
    expected = np.zeros((8, 8))
    expected[np.ix_(support, support)] = 0.25
    np.testing.assert_allclose(rho, expected, atol=1e-15)
    assert np.count_nonzero(np.abs(rho) > 1e-15) == 16


def test_density_idempotent_random():
    rng = np.random.default_rng(1)
    for n in range(1, 7):
        rho = state_to_density(StateVector(n, random_state(n, rng))).entries
        np.testing.assert_allclose(rho @ rho, rho, atol=1e-10)
        assert np.trace(rho).real == pytest.approx(1, abs=1e-12)


def test_density_matrix_validation():
    with pytest.raises(ValueError, match="hermitian"):
        DensityMatrix(1, [[0.5, 1], [0, 0.5]])
    with pytest.raises(ValueError, match="trace"):
        DensityMatrix(1, np.eye(2))
    assert not DensityMatrix(1, [[1.5, 0], [0, -0.5]]).is_positive()


def test_local_unitary_identity_and_diagonal():
    rng = np.random.default_rng(2)
    s = StateVector(3, random_state(3, rng))
    np.testing.assert_allclose(apply_local_unitary(s, 2, np.eye(2)).amplitudes, s.amplitudes)

    a, b = 0.3, -1.1
    out = apply_local_unitary(s, 2, np.diag([np.exp(1j * a), np.exp(1j * b)]))
    for i in range(8):
        phase = np.exp(1j * (b if (i >> 1) & 1 else a))
        assert out.amplitudes[i] == pytest.approx(s.amplitudes[i] * phase, abs=1e-14)


def test_local_unitary_matches_kron():
    rng = np.random.default_rng(3)
    s = StateVector(4, random_state(4, rng))
    u = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))[0]
    full = np.kron(np.kron(np.eye(2), np.eye(2)), np.kron(u, np.eye(2)))
    np.testing.assert_allclose(apply_local_unitary(s, 3, u).amplitudes, full @ s.amplitudes, atol=1e-14)


def test_local_unitary_errors():
    s = special_bernstein(3)
    with pytest.raises(ValueError, match="unitary"):
        apply_local_unitary(s, 1, [[1, 1], [0, 1]])
    with pytest.raises(ValueError, match="out of range"):
        apply_local_unitary(s, 4, np.eye(2))
    with pytest.raises(ValueError, match="out of range"):
        apply_local_unitary(s, 0, np.eye(2))


def test_hadamard_on_ghz_x_coordinates_gives_b3():
    # amplitudes of (|←←←⟩ - |→→→⟩)/√2 in x coordinates
    x_coords = ghz(3, "z", -1)
    s = x_coords
    for k in (1, 2, 3):
        s = apply_local_unitary(s, k, HADAMARD)
    assert overlap(s, special_bernstein(3)) == pytest.approx(1, abs=1e-12)


@pytest.mark.parametrize("n", range(3, 13))
def test_basis_change_of_bernstein_is_ghz(n):
    x = basis_change_z_to_x(special_bernstein(n))
    expected = np.zeros(2**n)
    expected[0], expected[-1] = 2**-0.5, -(2**-0.5)
    np.testing.assert_allclose(x.amplitudes, expected, atol=1e-12)


def test_basis_change_empty_subset_is_identity():
    s = special_bernstein(4)
    np.testing.assert_array_equal(basis_change_z_to_x(s, []).amplitudes, s.amplitudes)
    with pytest.raises(ValueError):
        basis_change_z_to_x(s, [5])


@pytest.mark.parametrize("n", range(2, 9))
def test_basis_change_involution(n):
    rng = np.random.default_rng(n)
    for _ in range(100):
        s = StateVector(n, random_state(n, rng))
        subset = [k for k in range(1, n + 1) if rng.random() < 0.5]
        twice = basis_change_z_to_x(basis_change_z_to_x(s, subset), subset)
        np.testing.assert_allclose(twice.amplitudes, s.amplitudes, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(
    n=st.integers(1, 6),
    seed=st.integers(0, 2**32 - 1),
    axis=st.sampled_from(["x", "y", "z"]),
)
def test_local_maps_preserve_norm(n, seed, axis):
    rng = np.random.default_rng(seed)
    s = StateVector(n, random_state(n, rng))
    u = Axis(axis).rotation
    k = int(rng.integers(1, n + 1))
    assert apply_local_unitary(s, k, u).norm() == pytest.approx(1, abs=1e-12)
    assert basis_change_z_to_x(s, [k]).norm() == pytest.approx(1, abs=1e-12)


def test_axis_eigenvectors():
    for axis in Axis:
        r = axis.rotation
        np.testing.assert_allclose(axis.pauli @ r[:, 0], r[:, 0], atol=1e-15)
        np.testing.assert_allclose(axis.pauli @ r[:, 1], -r[:, 1], atol=1e-15)
        np.testing.assert_allclose(axis.projector(1) + axis.projector(-1), np.eye(2))
    # |↑⟩ = (|↗⟩ + i|↙⟩)/√2 with the y eigenvectors up to phase
    ne, sw = Axis.Y.rotation[:, 0], Axis.Y.rotation[:, 1]
    up = (ne + 1j * (-1j * sw)) / np.sqrt(2)
    np.testing.assert_allclose(np.abs(up), [1, 0], atol=1e-15)


def test_project_particle_conditional_state():
    up_branch = project_particle(special_bernstein(3), 1, "z", 1)
    assert overlap(up_branch, make_state(2, [("↑↓", 1), ("↓↑", 1)])) == pytest.approx(1, abs=1e-12)
    down_branch = project_particle(special_bernstein(3), 1, "z", -1)
    assert overlap(down_branch, make_state(2, [("↑↑", 1), ("↓↓", 1)])) == pytest.approx(1, abs=1e-12)


def test_json_roundtrip(tmp_path):
    s = special_bernstein(4)
    path = tmp_path / "b4.json"
    write_state(s, path)
    obj = json.loads(path.read_text(encoding="utf-8"))
    assert obj["n"] == 4 and len(obj["amps"]) == 8
    back, renormalized = read_state(path)
    assert not renormalized
    np.testing.assert_allclose(back.amplitudes, s.amplitudes, atol=1e-15)


def test_json_reader_normalizes_and_flags():
    s, renorm = state_from_json({"n": 2, "amps": [{"bits": "00", "re": 1, "im": 0}, {"bits": "11", "re": 0, "im": 1}]})
    assert renorm
    np.testing.assert_allclose(s.amplitudes, [2**-0.5, 0, 0, 1j * 2**-0.5])
    _, renorm = state_from_json(state_to_json(special_bernstein(3), arrows=False))
    assert not renorm


@pytest.mark.parametrize(
    "obj",
    [
        {"n": 2},
        {"n": 2, "amps": [{"bits": "0", "re": 1, "im": 0}]},
        {"n": 2, "amps": [{"bits": "0x", "re": 1, "im": 0}]},
        {"n": 2, "amps": [{"bits": "00", "re": 0, "im": 0}]},
        {"n": 2, "amps": [{"bits": "00", "re": 1}, {"bits": "↑↑", "re": 1}]},
        {"n": 40, "amps": []},
    ],
)
def test_json_reader_rejects(obj):
    with pytest.raises(ValueError):
        state_from_json(obj)


def test_ket_rendering():
    assert make_state(2, [("↑↓", 1)]).ket() == "1|↑↓⟩"
    assert ket("↓")[1] == 1
