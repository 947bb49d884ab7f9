import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ghzlocc.gates import cnot, hadamard
from ghzlocc.qstate import (
    Bipartition,
    StateVector,
    Unitary,
    ZeroProbabilityError,
    apply_gate,
    basis_state,
    entanglement_entropy,
    make_state,
    measure_computational,
    outcome_probabilities,
    random_state,
    state_distance,
)
from oracles import dense_operator, entropy_from_density, random_unitary, reduced_density

S2 = 1 / np.sqrt(2)
GHZ = np.array([S2, 0, 0, 0, 0, 0, 0, S2])


def test_make_state_basis():
    s = make_state([1, 0])
    assert s.num_qubits == 1
    np.testing.assert_array_equal(s.amplitudes, [1, 0])


def test_make_state_ghz():
    s = make_state(GHZ)
    assert s.num_qubits == 3
    assert abs(s.norm - 1) < 1e-15


def test_make_state_renormalizes_drift():
    s = make_state([1 + 4e-10, 0])
    assert abs(s.norm - 1) < 1e-15


@pytest.mark.parametrize("amps", [[0, 0], [1, 0, 0], [1], [2, 0], [1, 1]])
def test_make_state_rejects(amps):
    with pytest.raises(ValueError):
        make_state(amps)


def test_state_is_immutable():
    s = make_state([1, 0])
    with pytest.raises(ValueError):
        s.amplitudes[0] = 0


def test_unitary_rejects_non_unitary():
    with pytest.raises(ValueError):
        Unitary([[1, 1], [0, 1]])
    with pytest.raises(ValueError):
        Unitary(np.eye(3))


def test_cnot_truth_table():
    out = apply_gate(basis_state("10"), cnot(), [0, 1])
    np.testing.assert_array_equal(out.amplitudes, basis_state("11").amplitudes)


def test_h_then_two_cnots_is_ghz():
    s = apply_gate(basis_state("000"), hadamard(), [0])
    s = apply_gate(s, cnot(), [0, 1])
    s = apply_gate(s, cnot(), [0, 2])
    assert state_distance(s, make_state(GHZ))[0] < 1e-15


def test_apply_gate_reversed_wires_matches_dense():
    rng = np.random.default_rng(5)
    g = random_unitary(4, rng)
    s = random_state(3, rng)
    got = apply_gate(s, Unitary(g), [2, 0]).amplitudes
    want = dense_operator(g, [2, 0], 3) @ s.amplitudes
    assert np.max(np.abs(got - want)) < 1e-12


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6).flatmap(lambda n: st.tuples(
    st.just(n),
    st.integers(1, n).flatmap(lambda k: st.permutations(range(n)).map(lambda p: p[:k])),
    st.integers(0, 2**32 - 1))))
def test_apply_gate_matches_dense_oracle(case):
    n, wires, seed = case
    rng = np.random.default_rng(seed)
    g = random_unitary(2 ** len(wires), rng)
    s = random_state(n, rng)
    out = apply_gate(s, Unitary(g), wires)
    want = dense_operator(g, list(wires), n) @ s.amplitudes
    assert np.max(np.abs(out.amplitudes - want)) < 1e-12
    assert abs(out.norm - 1) < 1e-12


@pytest.mark.parametrize("wires,n", [([0, 0], 2), ([2], 2), ([0], 2), ([-1, 0], 2)])
def test_apply_gate_bad_wires(wires, n):
    gate = cnot() if len(wires) == 2 else Unitary(np.eye(4))
    with pytest.raises(ValueError):
        apply_gate(random_state(n, 0), gate, wires)


def test_measure_plus_forced_zero():
    plus_and_0 = make_state([S2, 0, S2, 0])
    outcome, p, post = measure_computational(plus_and_0, 0, forced_outcome=0)
    assert (outcome, p) == (0, pytest.approx(0.5))
    np.testing.assert_allclose(post.amplitudes, [1, 0])


def test_measure_ghz_wire0_forced_one():
    outcome, p, post = measure_computational(make_state(GHZ), 0, forced_outcome=1)
    assert outcome == 1 and p == pytest.approx(0.5)
    np.testing.assert_allclose(post.amplitudes, basis_state("11").amplitudes, atol=1e-15)


def test_measure_impossible_outcome():
    with pytest.raises(ZeroProbabilityError):
        measure_computational(basis_state("00"), 0, forced_outcome=1)


@given(st.integers(2, 5), st.integers(0, 2**32 - 1), st.data())
@settings(max_examples=40, deadline=None)
def test_measurement_completeness(n, seed, data):
    s = random_state(n, seed)
    wire = data.draw(st.integers(0, n - 1))
    p0, p1 = outcome_probabilities(s, wire)
    assert abs(p0 + p1 - 1) < 1e-12
    _, q0, post0 = measure_computational(s, wire, forced_outcome=0)
    _, q1, post1 = measure_computational(s, wire, forced_outcome=1)
    assert (q0, q1) == (p0, p1)
    # re-inserting the collapsed branches rebuilds the original state
    psi = np.moveaxis(s.amplitudes.reshape((2,) * n), wire, 0).reshape(2, -1)
    np.testing.assert_allclose(np.sqrt(q0) * post0.amplitudes, psi[0], atol=1e-12)
    np.testing.assert_allclose(np.sqrt(q1) * post1.amplitudes, psi[1], atol=1e-12)


def test_sampling_is_seed_deterministic():
    s = random_state(4, 3)
    a = [measure_computational(s, w % 4, rng=np.random.default_rng(11))[0] for w in range(20)]
    b = [measure_computational(s, w % 4, rng=np.random.default_rng(11))[0] for w in range(20)]
    assert a == b


def test_sampling_follows_born_rule():
    s = make_state([np.sqrt(0.2), np.sqrt(0.8), 0, 0])
    rng = np.random.default_rng(0)
    ones = sum(measure_computational(s, 1, rng=rng)[0] for _ in range(4000))
    assert abs(ones / 4000 - 0.8) < 0.03


@pytest.mark.parametrize("s1,s2,expected", [
    ([1, 0], [1, 0], (0.0, 1.0)),
    ([1, 0], [-1, 0], (2.0, 1.0)),
    ([1, 0], [0, 1], (1.0, 0.0)),
])
def test_state_distance(s1, s2, expected):
    assert state_distance(make_state(s1), make_state(s2)) == pytest.approx(expected)


def test_state_distance_mismatch():
    with pytest.raises(ValueError):
        state_distance(basis_state("0"), basis_state("00"))


def test_entropy_product_state():
    s = basis_state("00")
    assert entanglement_entropy(s, Bipartition.from_side([0], 2)) == pytest.approx(0, abs=1e-12)


def test_entropy_bell_and_ghz():
    bell = make_state([S2, 0, 0, S2])
    assert entanglement_entropy(bell, Bipartition.from_side([0], 2)) == pytest.approx(1, abs=1e-12)
    assert entanglement_entropy(make_state(GHZ), Bipartition.from_side([0], 3)) == pytest.approx(1, abs=1e-12)


@pytest.mark.parametrize("a,b", [(set(), {0, 1}), ({0}, {0, 1}), ({0}, {2})])
def test_invalid_bipartition(a, b):
    with pytest.raises(ValueError):
        Bipartition(frozenset(a), frozenset(b))


def test_entropy_cut_must_match_state():
    with pytest.raises(ValueError):
        entanglement_entropy(basis_state("000"), Bipartition.from_side([0], 2))


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 5), st.integers(0, 2**32 - 1), st.data())
def test_entropy_matches_density_matrix_and_is_symmetric(n, seed, data):
    s = random_state(n, seed)
    side = data.draw(st.sets(st.integers(0, n - 1), min_size=1, max_size=n - 1))
    cut = Bipartition.from_side(side, n)
    e = entanglement_entropy(s, cut)
    assert abs(e - entanglement_entropy(s, cut.swapped())) < 1e-10
    assert abs(e - entropy_from_density(reduced_density(s.amplitudes, sorted(side), n))) < 1e-9
    assert -1e-12 <= e <= min(len(cut.side_a), len(cut.side_b)) + 1e-12


def test_state_vector_rejects_bad_length():
    with pytest.raises(ValueError):
        StateVector(np.ones(3))
