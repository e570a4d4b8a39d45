import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import special

from coherent_constraints.bessel import bessel_i, bessel_i_all


@given(st.floats(-50, 50), st.floats(-50, 50), st.integers(0, 60))
def test_matches_scipy(re, im, m):
    z = complex(re, im)
    # absolute accuracy on the exponentially scaled function e^{-|Re z|} I_m(z)
    got = bessel_i(m, z) * np.exp(-abs(z.real))
    assert abs(got - special.ive(m, z)) <= 1e-12


def test_negative_order_and_zero():
    assert bessel_i(-3, 1.2 + 0.4j) == bessel_i(3, 1.2 + 0.4j)
    assert np.array_equal(bessel_i_all(3, 0), [1, 0, 0, 0])


def test_generating_identity():
    z = 2.0 - 1.5j
    vals = bessel_i_all(60, z)
    assert vals[0] + 2 * vals[1:].sum() == pytest.approx(np.exp(z), rel=1e-14)


def test_negative_order_limit_rejected():
    with pytest.raises(ValueError):
        bessel_i_all(-1, 1.0)


def test_tiny_argument():
    assert bessel_i(0, 3e-286j) == 1
    assert bessel_i(1, 1e-8) == pytest.approx(5e-9, rel=1e-14)
