import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from coherent_constraints.coherent import CoherentLabel, PhaseConvention, coherent_vector, label, overlap_closed
from coherent_constraints.errors import ContractError, StatisticalError
from coherent_constraints.fock import OperatorMatrix, TruncationSpec
from coherent_constraints.models.momentum import momentum_toy
from coherent_constraints.models.second_class import second_class_full, second_class_system
from coherent_constraints.models.su2 import su2_constraint, su2_hamiltonian, su2_projected_kernel, su2_projector
from coherent_constraints.projector import ConstraintSpec
from coherent_constraints.propagator import (
    LambdaMeasure,
    LambdaSchedule,
    LatticeConvention,
    PropagatorResult,
    PropagatorRoute,
    SincWeight,
    exact_projected,
    lambda_averaged,
    lambda_scheduled,
    reduced_evolution,
    trotter_interleaved,
)

HALF = PhaseConvention.ALPHA_PQ_HALF
SU2_SPEC = TruncationSpec(2, 10)
A = CoherentLabel((0.3, -0.2), (0.4, 0.1), HALF)
B = CoherentLabel((-0.1, 0.25), (0.2, -0.3), HALF)


def test_identity_projector_gives_overlap():
    a, b = label(0.2, 0.5), label(-0.3, 0.1)
    eye = np.eye(30)
    val = exact_projected((a, b), np.zeros((30, 30)), eye, 0.0).value
    assert val == pytest.approx(overlap_closed(a, b), abs=1e-12)


@pytest.mark.parametrize("s", [0.5, 1.0])
def test_su2_static_kernel(s):
    E = su2_projector(SU2_SPEC, s)
    val = exact_projected((A, B), np.zeros((100, 100)), E.matrix, 0.0).value
    assert val == pytest.approx(su2_projected_kernel((A, B), s), abs=1e-8)


def test_second_class_routes():
    sys_ = second_class_system()
    pair = (label(0.5, 1.5), label(1.2, 2.2))
    ref = second_class_full(pair, 0.7)
    assert reduced_evolution(pair, sys_.H, sys_.E.matrix, 0.7).value == pytest.approx(ref, abs=1e-10)
    # H does not preserve the range of a second-class E, so the plain route differs
    assert abs(exact_projected(pair, sys_.H, sys_.E.matrix, 0.7).value - ref) > 1e-3
    t0 = reduced_evolution(pair, sys_.H, sys_.E.matrix, 0.0).value
    assert t0 == pytest.approx(second_class_full(pair, 0.0), abs=1e-12)


def test_trotter_first_order_convergence():
    sys_ = second_class_system()
    pair = (label(0.5, 1.5), label(1.2, 2.2))
    # a two-dimensional range that H does not preserve
    v = np.stack([coherent_vector(label(1.0, 2.0), sys_.spec), coherent_vector(label(0.0, 0.0), sys_.spec)], 1)
    q, _ = np.linalg.qr(v)
    E = q @ q.conj().T
    ref = reduced_evolution(pair, sys_.H, E, 1.0).value
    errs = [abs(trotter_interleaved(pair, sys_.H, E, 1.0, n).value - ref) for n in (128, 256)]
    assert 1.7 <= errs[0] / errs[1] <= 2.3


def test_trotter_single_factor_at_zero_time():
    sys_ = second_class_system()
    pair = (label(0.5, 1.5), label(1.2, 2.2))
    val = trotter_interleaved(pair, sys_.H, sys_.E.matrix, 0.0, 1).value
    assert val == pytest.approx(second_class_full(pair, 0.0), abs=1e-12)


@given(st.integers(1, 40))
def test_trotter_exact_when_commuting(n):
    H = su2_hamiltonian(SU2_SPEC)
    E = su2_projector(SU2_SPEC, 1.0)
    ref = exact_projected((A, B), H, E.matrix, 1.3).value
    assert trotter_interleaved((A, B), H, E.matrix, 1.3, n).value == pytest.approx(ref, abs=1e-12)


def test_lattice_conventions():
    assert LatticeConvention.EPS_T_OVER_N.factors(4) == 4
    assert LatticeConvention.EPS_T_OVER_N_PLUS_1.epsilon(1.0, 4) == pytest.approx(0.2)
    with pytest.raises(ContractError):
        LambdaSchedule(4, np.zeros((4, 1)), convention=LatticeConvention.EPS_T_OVER_N_PLUS_1)
    with pytest.raises(ContractError):
        LambdaSchedule(2, np.array([[np.nan], [0.0]]))


def test_zero_schedule_is_trotter():
    toy = momentum_toy(40)
    pair = (label(0.1, 0.3), label(-0.2, 0.0))
    sched = LambdaSchedule.zeros(8)
    a = lambda_scheduled(pair, toy.H, toy.phis, sched, toy.E.matrix, 0.9).value
    b = trotter_interleaved(pair, toy.H, np.eye(40), 0.9, 8).value
    # without multipliers the lattice is e^{-iTH} E
    c = exact_projected(pair, toy.H, toy.E.matrix, 0.9).value
    assert a == pytest.approx(c, abs=1e-12)
    assert abs(b) > 0


@pytest.mark.parametrize("placement", ["initial", "final"])
@given(seed=st.integers(0, 1000))
def test_su2_gauge_independence(placement, seed):
    H = su2_hamiltonian(SU2_SPEC)
    phi = su2_constraint(SU2_SPEC, 1.0)
    E = su2_projector(SU2_SPEC, 1.0)
    base = exact_projected((A, B), H, E.matrix, 1.1).value
    sched = LambdaSchedule.random(16, 1, seed, scale=3.0)
    val = lambda_scheduled((A, B), H, ConstraintSpec(phi, 0.5), sched, E.matrix, 1.1, placement).value
    assert abs(val - base) <= 1e-10


def test_bad_placement():
    toy = momentum_toy(20)
    with pytest.raises(ContractError):
        lambda_scheduled((label(0, 0), label(0, 0)), toy.H, toy.phis, LambdaSchedule.zeros(2), toy.E.matrix,
                         1.0, "middle")


def test_single_slice_average_matches_exact():
    toy = momentum_toy(60, 0.5)
    pair = (label(0.1, 0.3), label(-0.2, 0.0))
    ref = exact_projected(pair, toy.H, toy.E.matrix, 1.0).value
    m = LambdaMeasure("single_slice", SincWeight(0.5))
    assert lambda_averaged(pair, toy.H, toy.phis, m, 1.0, 8).value == pytest.approx(ref, abs=1e-5)


def test_every_slice_average_matches_interleaved():
    sys_ = second_class_system()
    pair = (label(0.5, 1.5), label(1.2, 2.2))
    P = OperatorMatrix(np.eye(sys_.spec.dim), hermitian=True)
    from coherent_constraints.propagator import WeylGaussianWeight

    phis = ConstraintSpec((P,), 0.5)
    m = LambdaMeasure("every_slice", WeylGaussianWeight(sys_.target))
    val = lambda_averaged(pair, sys_.H, phis, m, 0.8, 6).value
    ref = trotter_interleaved(pair, sys_.H, sys_.E.matrix, 0.8, 6).value
    assert val == pytest.approx(ref, abs=1e-5)


def test_monte_carlo_reproducible_and_bounded():
    toy = momentum_toy(40, 0.5)
    pair = (label(0.1, 0.3), label(-0.2, 0.0))
    m = LambdaMeasure("monte_carlo", SincWeight(0.5), samples=20000, seed=7, xi_max=32.0)
    r1 = lambda_averaged(pair, toy.H, toy.phis, m, 1.0, 4)
    r2 = lambda_averaged(pair, toy.H, toy.phis, m, 1.0, 4)
    assert r1.value == r2.value
    assert abs(r1.value - r1.details["truncated_domain_value"]) <= 5 * r1.residual_budget


def test_monte_carlo_stderr_threshold():
    toy = momentum_toy(40, 0.5)
    pair = (label(0.1, 0.3), label(-0.2, 0.0))
    m = LambdaMeasure("monte_carlo", SincWeight(0.5), samples=50, seed=1, max_stderr=1e-6)
    with pytest.raises(StatisticalError) as info:
        lambda_averaged(pair, toy.H, toy.phis, m, 1.0, 4)
    assert info.value.stderr > 1e-6


def test_sinc_weight_total():
    assert SincWeight(0.3).total_weight() == pytest.approx(1.0, abs=1e-8)


def test_reduced_evolution_unitary_in_subspace():
    H = su2_hamiltonian(SU2_SPEC)
    E = su2_projector(SU2_SPEC, 1.0).matrix.entries
    v = E @ coherent_vector(A, SU2_SPEC)
    v = v / np.linalg.norm(v)
    val = reduced_evolution((v, v), H, E, 0.0).value
    assert abs(val) == pytest.approx(1.0, abs=1e-9)
    # the evolved state keeps unit norm: sum |<e_k|U|v>|² over a basis of the range
    w, vecs = np.linalg.eigh(E)
    basis = vecs[:, w > 0.5]
    amps = [reduced_evolution((basis[:, k], v), H, E, 2.0) for k in range(basis.shape[1])]
    assert sum(abs(a.value) ** 2 for a in amps) == pytest.approx(1.0, abs=1e-9)
    assert amps[0].route is PropagatorRoute.REDUCED_EVOLUTION


def test_result_budget_nonnegative():
    with pytest.raises(ContractError):
        PropagatorResult(0j, PropagatorRoute.EXACT_PROJECTED, None, -1.0)


def test_dimension_mismatch():
    with pytest.raises(ContractError):
        exact_projected((np.ones(3), np.ones(3)), np.eye(3), np.eye(4), 1.0)
