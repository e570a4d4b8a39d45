import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from coherent_constraints.errors import ConfigurationError, ContractError
from coherent_constraints.fock import (
    OperatorMatrix,
    TruncationSpec,
    below_edge_mask,
    build_canonical_ops,
    commutator,
    ground_state,
    hermitian_eig,
    matrix_exp_skewh,
    normal_ordered_power,
)


def _herm(seed, n):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return 0.5 * (a + a.conj().T)


def test_two_level_position_entries():
    Q = build_canonical_ops(TruncationSpec(1, 2))[0].Q.entries
    assert np.allclose(Q, np.array([[0, 1], [1, 0]]) / np.sqrt(2), atol=1e-15)


def test_commutator_away_from_edge():
    ops = build_canonical_ops(TruncationSpec(1, 40))[0]
    c = commutator(ops.Q.entries, ops.P.entries)
    assert np.max(np.abs(c[:-1, :-1] - 1j * np.eye(39))) <= 1e-12


def test_distinct_modes_commute():
    ops = build_canonical_ops(TruncationSpec(2, 10))
    assert np.max(np.abs(commutator(ops[0].Q.entries, ops[1].P.entries))) == 0.0


@given(st.integers(2, 12), st.integers(1, 2))
def test_canonical_commutator_every_mode(levels, modes):
    spec = TruncationSpec(modes, levels)
    ops = build_canonical_ops(spec)
    keep = below_edge_mask(spec)
    for j in range(modes):
        c = commutator(ops[j].Q.entries, ops[j].P.entries) - 1j * np.eye(spec.dim)
        assert np.max(np.abs(c[np.ix_(keep, keep)])) <= 1e-12


def test_dimension_cap():
    with pytest.raises(ConfigurationError):
        TruncationSpec(3, 40)
    with pytest.raises(ConfigurationError):
        TruncationSpec(1, 0)


def test_non_hermitian_flag_rejected():
    with pytest.raises(ContractError):
        OperatorMatrix(np.array([[0, 1], [0, 0]], dtype=complex), hermitian=True)


def test_eig_diagonal():
    w, v = hermitian_eig(np.diag([3.0, 1.0, 2.0]))
    assert np.allclose(w, [1, 2, 3])
    assert np.allclose(np.abs(v.entries), np.eye(3)[:, [1, 2, 0]])


def test_eig_number_operator():
    n = build_canonical_ops(TruncationSpec(1, 40))[0].number
    w, _ = hermitian_eig(n)
    assert np.array_equal(w, np.arange(40.0))


@given(st.integers(0, 2**31), st.integers(2, 50))
def test_eig_reconstruction(seed, n):
    a = _herm(seed, n)
    w, v = hermitian_eig(a)
    rec = (v.entries * w) @ v.entries.conj().T
    assert np.linalg.norm(rec - a) <= 1e-10 * np.linalg.norm(a)
    assert np.all(np.diff(w) >= 0)


def test_exp_examples():
    assert np.allclose(matrix_exp_skewh(np.diag([1.0, 2.0]), 0.0).entries, np.eye(2))
    u = matrix_exp_skewh(np.diag([1.0, 2.0]), np.pi).entries
    assert np.allclose(u, np.diag([np.exp(-1j * np.pi), np.exp(-2j * np.pi)]), atol=1e-14)


@given(st.integers(0, 2**31), st.floats(-2, 2), st.floats(-2, 2))
def test_exp_group_property(seed, s, t):
    a = _herm(seed, 12)
    lhs = matrix_exp_skewh(a, s + t).entries
    rhs = matrix_exp_skewh(a, s).entries @ matrix_exp_skewh(a, t).entries
    assert np.linalg.norm(lhs - rhs) <= 1e-9


@given(st.integers(0, 2**31), st.floats(-3, 3))
def test_exp_unitary(seed, t):
    a = _herm(seed, 20)
    u = matrix_exp_skewh(a, t).entries
    assert np.linalg.norm(u @ matrix_exp_skewh(a, -t).entries - np.eye(20)) <= 1e-10


def test_ground_state_is_vacuum():
    g = ground_state(TruncationSpec(2, 5))
    assert g[0] == 1 and np.count_nonzero(g) == 1


def test_normal_ordered_number():
    # :P² + Q²:/2 is a†a
    spec = TruncationSpec(1, 15)
    h = 0.5 * (normal_ordered_power(spec, 0, "P", 2).entries + normal_ordered_power(spec, 0, "Q", 2).entries)
    assert np.allclose(h, np.diag(np.arange(15.0)), atol=1e-13)
