import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from coherent_constraints.coherent import coherent_vector, label
from coherent_constraints.errors import ContractError, IllConditionedIntervalError, NumericWarning
from coherent_constraints.fock import OperatorMatrix, TruncationSpec, build_canonical_ops, hermitian_eig
from coherent_constraints.models.su2 import su2_constraint, su2_projector
from coherent_constraints.projector import (
    ConstraintSpec,
    Projector,
    Route,
    SincQuadrature,
    commutes_with_phases,
    compat_check,
    group_average_quadrature,
    group_average_u1,
    momentum_window_projector,
    rank1_min_uncertainty,
    sinc_average_matrix,
    sinc_integral,
    sinc_total_weight,
    spectral_interval,
    weyl_integral_projector,
)


def _P(levels):
    return build_canonical_ops(TruncationSpec(1, levels))[0].P


def _axioms(E: Projector):
    e = E.matrix.entries
    dim = e.shape[0]
    assert np.linalg.norm(e @ e - e) <= 1e-10 * dim
    assert np.linalg.norm(e - e.conj().T) <= 1e-12 * dim
    assert abs(np.trace(e).real - E.rank) <= 1e-8


def test_spectral_interval_counts_eigenvalues():
    P = _P(60)
    w, _ = hermitian_eig(P)
    E = spectral_interval(ConstraintSpec(P, 0.5))
    assert E.rank == np.count_nonzero(np.abs(w) < 0.5)
    assert E.route is Route.SPECTRAL_INTERVAL
    _axioms(E)


def test_spectral_interval_defining_inequality():
    P = _P(40)
    E = spectral_interval(ConstraintSpec(P, 0.5))
    w, v = hermitian_eig(E.matrix)
    psi = v.entries[:, w > 0.5]
    p2 = P.entries @ P.entries
    ratios = np.einsum("ij,ik,kj->j", psi.conj(), p2, psi).real
    assert np.all(ratios <= 0.25 + 1e-12)


def test_spectral_interval_extremes():
    P = _P(20)
    radius = np.max(np.abs(hermitian_eig(P)[0]))
    assert spectral_interval(ConstraintSpec(P, radius + 1.0)).rank == 20
    phi = OperatorMatrix(np.diag([1.0, 2.0, -3.0]), hermitian=True)
    assert spectral_interval(ConstraintSpec(phi, 0.5)).rank == 0


def test_ill_conditioned_interval_suggests_delta():
    phi = OperatorMatrix(np.diag([0.0, 1.0, 2.0]), hermitian=True)
    with pytest.raises(IllConditionedIntervalError) as info:
        spectral_interval(ConstraintSpec(phi, 1.0 + 1e-8))
    d = info.value.suggested_delta
    assert abs(d - 1.0) > 1e-3
    spectral_interval(ConstraintSpec(phi, d))


def test_constraint_spec_validation():
    with pytest.raises(ContractError):
        ConstraintSpec((np.eye(2), np.eye(3)), 0.5)
    with pytest.raises(ContractError):
        ConstraintSpec(np.eye(2), 0.0)
    with pytest.raises(ContractError):
        ConstraintSpec(np.array([[0.0, 1.0], [0.0, 0.0]]), 0.5)


def test_sinc_matches_spectral():
    P = _P(40)
    raw = sinc_average_matrix(P, 0.5).entries
    ref = spectral_interval(ConstraintSpec(P, 0.5)).matrix.entries
    assert np.linalg.norm(raw - ref) <= 1e-6
    E = sinc_integral(P, 0.5)
    assert np.linalg.norm(E.matrix.entries - ref) <= 1e-12
    _axioms(E)


def test_sinc_diagonal_indicator():
    E = sinc_integral(np.diag([0.0, 1.0]), 0.5)
    assert np.allclose(E.matrix.entries, np.diag([1.0, 0.0]))


def test_sinc_large_delta_identity():
    P = _P(10)
    assert sinc_integral(P, 50.0).rank == 10


def test_sinc_half_line_mode_agrees():
    phi = np.diag([-0.8, -0.1, 0.3, 1.2])
    a = sinc_average_matrix(phi, 0.5, SincQuadrature("fourier")).entries
    b = sinc_average_matrix(phi, 0.5).entries
    assert np.max(np.abs(a - b)) <= 1e-6


def test_sinc_total_weight_is_one():
    for d in (0.05, 0.5, 3.0):
        assert sinc_total_weight(d) == pytest.approx(1.0, abs=1e-8)


def test_sinc_edge_eigenvalue_warns():
    with pytest.warns(NumericWarning):
        sinc_integral(np.diag([0.5, 2.0]), 0.5, SincQuadrature(max_doublings=2))


@pytest.mark.parametrize("two_s, rank", [(1, 2), (2, 3), (0.7, 0)])
def test_su2_group_average_rank(two_s, rank):
    spec = TruncationSpec(2, 6)
    E = su2_projector(spec, two_s / 2)
    assert E.rank == rank
    assert E.route is Route.GROUP_AVG_U1
    _axioms(E)


def test_group_average_quadrature_cross_check():
    spec = TruncationSpec(2, 6)
    phi = su2_constraint(spec, 1.0)
    exact = group_average_u1(phi, np.pi).matrix.entries
    quad = group_average_quadrature(phi, np.pi).entries
    assert np.max(np.abs(exact - quad)) <= 1e-12


def test_group_average_rejects_irregular_spectrum():
    with pytest.raises(ContractError):
        group_average_u1(np.diag([0.0, 1.0, 2.5]), 2 * np.pi)


def test_rank1_trace_and_minimum(rng):
    spec = TruncationSpec(1, 40)
    E = rank1_min_uncertainty(label(1.0, 2.0), spec)
    assert abs(np.trace(E.matrix.entries).real - 1) <= 1e-10
    ops = build_canonical_ops(spec)[0]
    one = np.eye(40)
    dev = (ops.P.entries - one) @ (ops.P.entries - one) + (ops.Q.entries - 2 * one) @ (ops.Q.entries - 2 * one)
    v = coherent_vector(label(1.0, 2.0), spec)
    assert np.vdot(v, dev @ v).real == pytest.approx(1.0, abs=1e-9)
    for _ in range(50):
        x = rng.normal(size=30) + 1j * rng.normal(size=30)
        x = np.concatenate([x / np.linalg.norm(x), np.zeros(10)])
        assert np.vdot(x, dev @ x).real >= 1.0 - 1e-9


def test_weyl_integral_projector_is_rank_one():
    target = label(1.0, 2.0)
    w = weyl_integral_projector(target, 40).entries
    ref = rank1_min_uncertainty(target, TruncationSpec(1, 40)).matrix.entries
    assert np.max(np.abs(w - ref)) <= 1e-8


def test_momentum_window_projector():
    E = momentum_window_projector(40, -0.5, 0.5).entries
    w = np.linalg.eigvalsh(E)
    assert np.all(w >= -1e-12) and np.all(w <= 1 + 1e-12)
    assert np.allclose(E, E.conj().T)


def test_projector_contract_rejects_non_projector():
    with pytest.raises(ContractError):
        Projector(OperatorMatrix(np.diag([0.5, 1.0]), hermitian=True), 1, Route.SPECTRAL_INTERVAL)


@given(st.floats(-4, 4))
def test_constraint_phases_leave_subspace_fixed(tau):
    spec = TruncationSpec(2, 6)
    phi = su2_constraint(spec, 1.0)
    E = su2_projector(spec, 1.0)
    assert commutes_with_phases(E, phi, [tau]) <= 1e-10


def test_compat_for_commuting_hamiltonian():
    spec = TruncationSpec(2, 6)
    phi = su2_constraint(spec, 1.0)
    E = su2_projector(spec, 1.0)
    # any function of the constraint preserves its eigenspaces
    H = phi.entries @ phi.entries + 0.3 * phi.entries
    assert compat_check(E, H, 1.7) <= 1e-10
