import warnings

import numpy as np
import pytest

from coherent_constraints.errors import NumericWarning
from coherent_constraints.quadrature import gauss_legendre, periodic_trapezoid, phase_space_measure, refine_until


def test_gauss_legendre_polynomial_exact():
    x, w = gauss_legendre(-1.0, 2.0, panels=3, order=8)
    assert np.sum(w * x**15) == pytest.approx((2.0**16 - 1) / 16, rel=1e-13)


def test_periodic_trapezoid_exact_for_low_harmonics():
    x, w = periodic_trapezoid(16)
    assert np.sum(w * np.cos(3 * x) ** 2) == pytest.approx(np.pi, rel=1e-14)


def test_phase_space_measure_total_mass():
    pts, wts = phase_space_measure(2.0, modes=2, panels=1, order=4).nodes()
    assert pts.shape == (4**4, 4)
    assert wts.sum() == pytest.approx(4.0**4 / (2 * np.pi) ** 2)


def test_refine_until_converges_and_warns():
    val, change, n = refine_until(lambda n: 1.0 / n, 1, 1e-2, max_doublings=10)
    assert change < 1e-2 and val == 1.0 / n
    with pytest.warns(NumericWarning):
        refine_until(lambda n: float(n), 1, 1e-3, max_doublings=2)
