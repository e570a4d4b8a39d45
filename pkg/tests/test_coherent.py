import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from coherent_constraints.coherent import (
    CoherentLabel,
    PhaseConvention,
    auto_levels,
    coherent_vector,
    expectation,
    label,
    one_form_check,
    overlap_closed,
    resolution_of_unity,
)
from coherent_constraints.errors import ContractError, TruncationError
from coherent_constraints.fock import TruncationSpec, build_canonical_ops, ground_state

coord = st.floats(-2.5, 2.5)


@pytest.mark.parametrize("conv", list(PhaseConvention))
def test_origin_is_fiducial(conv):
    spec = TruncationSpec(1, 20)
    v = coherent_vector(label(0.0, 0.0, conv), spec)
    assert np.allclose(v, ground_state(spec), atol=1e-15)


def test_unit_norm_auto_levels():
    v = coherent_vector(label(0.0, 1.0))
    assert abs(np.linalg.norm(v) - 1) <= 1e-10


def test_expectation_values():
    lab = label(1.0, 2.0)
    spec = TruncationSpec(1, auto_levels([lab], 1e-14))
    v = coherent_vector(lab, spec)
    ops = build_canonical_ops(spec)[0]
    assert abs(expectation(v, ops.Q) - 2.0) <= 1e-9
    assert abs(expectation(v, ops.P) - 1.0) <= 1e-9


def test_closed_overlap_value():
    assert overlap_closed(label(0.0, 1.0), label(0.0, 0.0)) == pytest.approx(np.exp(-0.25), abs=1e-15)
    assert overlap_closed(label(0.3, -1.0), label(0.3, -1.0)) == pytest.approx(1.0)


def test_numeric_overlap_grid():
    grid = [label(p, q) for p in np.linspace(-2, 2, 5) for q in np.linspace(-2, 2, 5)]
    spec = TruncationSpec(1, auto_levels(grid))
    vecs = [coherent_vector(x, spec) for x in grid]
    ref = vecs[7]
    worst = max(abs(np.vdot(v, ref) - overlap_closed(x, grid[7])) for x, v in zip(grid, vecs))
    assert worst <= 1e-10


@given(coord, coord, coord, coord)
def test_overlap_hermitian_and_bounded(p2, q2, p1, q1):
    a, b = label(p2, q2), label(p1, q1)
    ab, ba = overlap_closed(a, b), overlap_closed(b, a)
    assert ab == np.conj(ba)
    assert abs(ab) <= 1.0
    if (p2, q2) != (p1, q1) and abs(p2 - p1) + abs(q2 - q1) > 1e-6:
        assert abs(ab) < 1.0


def test_closed_overlap_needs_zero_phase():
    with pytest.raises(ContractError):
        overlap_closed(label(0.0, 1.0, PhaseConvention.ALPHA_PQ), label(0.0, 0.0, PhaseConvention.ALPHA_PQ))


def test_truncation_error_suggests_levels():
    with pytest.raises(TruncationError) as info:
        coherent_vector(label(3.0, 3.0), TruncationSpec(1, 5))
    assert info.value.suggested_levels > 5


def test_one_form_origin():
    assert abs(one_form_check(label(0.0, 0.0), 1e-3)[0]) <= 1e-10


def test_one_form_second_order():
    lab = label(1.0, 2.0)
    spec = TruncationSpec(1, 60)
    err = [abs(one_form_check(lab, h, spec)[0] - 1.0) for h in (1e-2, 5e-3)]
    assert abs(one_form_check(lab, 1e-3, spec)[0] - 1.0) <= 1e-5
    assert 3.5 <= err[0] / err[1] <= 4.5


def test_label_validation():
    with pytest.raises(ContractError):
        CoherentLabel((0.0, 1.0), (0.0,))
    with pytest.raises(ContractError):
        CoherentLabel(np.nan, 0.0)


def test_from_z_roundtrip():
    lab = CoherentLabel.from_z(0.5 - 0.25j)
    assert np.allclose(lab.z, [0.5 - 0.25j])


def test_resolution_of_unity_low_block():
    block = resolution_of_unity(8.0, 20)
    assert np.max(np.abs(block[:10, :10] - np.eye(10))) <= 1e-6
