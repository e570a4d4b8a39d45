import numpy as np
import pytest

from coherent_constraints.acceptance import flpr_label_sets
from coherent_constraints.errors import ConfigurationError, TruncationError
from coherent_constraints.models.flpr import (
    FLPRLabel,
    FLPRParams,
    dropped_m_bound,
    flpr_closed,
    flpr_gauge_leakage,
    flpr_numeric,
    oscillator_factors,
    sector_projectors,
    sector_space,
)
from coherent_constraints.propagator import LambdaSchedule

PARAMS = FLPRParams(1.0, 1.0, 0.05, 12)
SETS = flpr_label_sets()


def test_params_validation():
    with pytest.raises(ConfigurationError):
        FLPRParams(1.0, 1.0, 0.2, 12)
    with pytest.raises(ConfigurationError):
        FLPRParams(-1.0)
    with pytest.raises(ConfigurationError):
        FLPRParams(m_cutoff=0)


def test_cutoff_too_small_raises():
    l2, l1 = FLPRLabel(0, 0, 5.0, 0), FLPRLabel(0, 0, 5.0, 0)
    with pytest.raises(TruncationError):
        flpr_closed(l2, l1, FLPRParams(1.0, 1.0, 0.05, 2), 0.0)
    assert dropped_m_bound(PARAMS, *SETS[0]) < 1e-12


@pytest.mark.parametrize("T", [0.0, 0.5])
@pytest.mark.parametrize("i", range(3))
def test_closed_matches_numeric(i, T):
    l2, l1 = SETS[i]
    assert abs(flpr_closed(l2, l1, PARAMS, T) - flpr_numeric(l2, l1, PARAMS, T)) <= 1e-5


def test_equal_position_third_factor():
    # q₃'' = q₃' and p₃ = 0 for the m = 0 window: 2δ/√π times the Gaussian
    lab = FLPRLabel(0, 0, 0.0, 0.3)
    lead = flpr_closed(lab, lab, PARAMS, 0.0, leading=True)
    assert lead.real == pytest.approx(2 * 0.05 / np.sqrt(np.pi), rel=1e-12)


def test_sector_ranks_match_eigencount():
    space = sector_space(8)
    projs = sector_projectors(space, range(-7, 8))
    w = np.linalg.eigvalsh(space.L3.entries)
    for m, E in projs.items():
        assert E.rank == np.count_nonzero(np.abs(w - m) < 1e-8)
    assert sum(E.rank for E in projs.values()) == space.dim


def test_oscillator_factors_depend_on_omega_t_only():
    l2, l1 = SETS[0]
    ms = np.arange(-4, 5)
    a = oscillator_factors(l2, l1, ms, 1.0, 0.7)
    assert np.allclose(oscillator_factors(l2, l1, ms, 2.0, 0.35), a, atol=1e-14)
    # integer spectrum of n₁ + n₂: period 2π/ω
    assert np.allclose(oscillator_factors(l2, l1, ms, 2.0, np.pi), oscillator_factors(l2, l1, ms, 2.0, 0.0),
                       atol=1e-12)


def test_leakage_shrinks_with_delta():
    l2, l1 = SETS[0]
    scheds = [LambdaSchedule.random(16, 1, s, scale=3.0) for s in range(2)]
    leak = [flpr_gauge_leakage(l2, l1, FLPRParams(2.5, 1.0, d, 12), 0.5, scheds)["state"] for d in (0.2, 0.1)]
    assert 1.6 <= leak[0] / leak[1] <= 2.4


def test_zero_schedule_route_close_to_exact():
    l2, l1 = SETS[1]
    ex = flpr_numeric(l2, l1, PARAMS, 0.5)
    sch = flpr_numeric(l2, l1, PARAMS, 0.5, route="scheduled", schedule=LambdaSchedule.zeros(8))
    assert abs(ex - sch) <= 1e-8
