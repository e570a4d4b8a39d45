import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import special

from coherent_constraints.models.momentum import (
    fock_spectral_sandwich,
    leading_projected_P_kernel,
    oracle_limit_kernel,
    oracle_projected_P_kernel,
    projected_P_kernel,
)
from coherent_constraints.rkhs import gram, hermitian_symmetry_error, psd_margin, reduce_limit_delta


def test_diagonal_origin_is_erf():
    exact, _ = oracle_projected_P_kernel(((0.0, 0.3), (0.0, 0.3)), 0.1)
    assert exact == pytest.approx(special.erf(0.1), abs=1e-12)
    assert exact.real == pytest.approx(0.1124629, abs=1e-7)


def test_leading_gap_is_second_order_relative():
    pair = ((0.3, 0.5), (-0.2, -0.4))
    gaps = []
    deltas = [0.2, 0.1, 0.05]
    for d in deltas:
        exact, lead = oracle_projected_P_kernel(pair, d)
        gaps.append(abs(exact - lead) / abs(exact))
    slope = np.polyfit(np.log(deltas), np.log(gaps), 1)[0]
    assert abs(slope - 2) <= 0.2


def test_leading_form_removable_point():
    assert leading_projected_P_kernel(((0, 1.0), (0, 1.0)), 0.1) == pytest.approx(0.2 / np.sqrt(np.pi))


def test_matches_fock_sandwich():
    pair = ((0.4, 1.0), (-0.3, 0.2))
    exact, _ = oracle_projected_P_kernel(pair, 0.1)
    assert fock_spectral_sandwich(pair, 0.1) == pytest.approx(exact, abs=1e-7)


def test_vectorized_kernel_matches_quadrature():
    K = projected_P_kernel(0.2)
    pair = ((0.4, 1.0), (-0.3, 0.2))
    assert K(*pair) == pytest.approx(oracle_projected_P_kernel(pair, 0.2)[0], abs=1e-13)


@given(st.integers(0, 2**31))
def test_projected_kernel_psd_hermitian(seed):
    x = np.random.default_rng(seed).uniform(-2, 2, size=(20, 2))
    K = projected_P_kernel(0.3)
    assert psd_margin(gram(K, x)) >= -1e-10
    assert hermitian_symmetry_error(K, x) <= 1e-12


def test_limit_kernel_values():
    assert oracle_limit_kernel(((0, 5.0), (0, -1.0))) == 1
    assert oracle_limit_kernel(((1.0, 0.0), (0.0, 0.0))) == pytest.approx(0.6065307, abs=1e-7)


def test_limit_extrapolation_reproduces_oracle():
    res = reduce_limit_delta(projected_P_kernel, 0.2, (0.0, 0.0), prefactor=np.sqrt(np.pi) / 2)
    assert res.sigma == 1
    for pair in [((0.0, 0.0), (0.0, 0.0)), ((1.0, 0.5), (0.0, -1.0)), ((-0.5, 2.0), (0.7, 1.0))]:
        assert res.kernel(*pair) == pytest.approx(oracle_limit_kernel(pair), abs=1e-6)
