import numpy as np
import pytest

from coherent_constraints.coherent import label
from coherent_constraints.errors import ContractError
from coherent_constraints.models.second_class import (
    expected_action,
    hamiltonian_symbol,
    path_action,
    path_integral_value,
    random_path,
    second_class_full,
    second_class_system,
    weyl_projector_error,
    wrapped_difference,
)
from coherent_constraints.propagator import reduced_evolution


def test_symbol_value():
    assert hamiltonian_symbol(1.0, 2.0) == 4.5


def test_normal_ordered_expectation_is_symbol():
    sys_ = second_class_system()
    from coherent_constraints.coherent import coherent_vector

    v = coherent_vector(label(1.0, 2.0), sys_.spec)
    assert np.vdot(v, sys_.H.entries @ v).real == pytest.approx(4.5, abs=1e-9)


def test_target_values():
    t = ((1.0, 2.0), (1.0, 2.0))
    assert second_class_full(t, 0.0) == pytest.approx(1.0)
    assert second_class_full(t, 1.0) == pytest.approx(np.exp(-4.5j))


@pytest.mark.parametrize("pair", [((0.5, 1.5), (1.2, 2.3)), ((-0.4, 0.7), (2.0, 1.1))])
@pytest.mark.parametrize("T", [0.0, 1.0])
def test_reduced_evolution_matches(pair, T):
    sys_ = second_class_system()
    labs = tuple(label(*x) for x in pair)
    got = reduced_evolution(labs, sys_.H, sys_.E, T).value
    assert got == pytest.approx(second_class_full(pair, T), abs=1e-8)


def test_path_independence(rng):
    sys_ = second_class_system()
    pair = ((0.5, 1.5), (1.2, 2.3))
    actions = [path_action(random_path(pair, 6, rng), 0.8, sys_) for _ in range(5)]
    ref = expected_action(pair, 0.8)
    assert max(wrapped_difference(a, ref) for a in actions) <= 1e-10
    val = path_integral_value(random_path(pair, 4, rng), 0.8, sys_)
    assert val == pytest.approx(second_class_full(pair, 0.8), abs=1e-10)


def test_random_path_endpoints(rng):
    path = random_path(((0.1, 0.2), (0.3, 0.4)), 3, rng)
    assert path.shape == (4, 2)
    assert tuple(path[0]) == (0.3, 0.4) and tuple(path[-1]) == (0.1, 0.2)
    with pytest.raises(ContractError):
        random_path(((0, 0), (0, 0)), 0, rng)


def test_wrapped_difference():
    assert wrapped_difference(np.pi - 0.1, -np.pi + 0.1) == pytest.approx(0.2)


def test_weyl_integral_projector():
    assert weyl_projector_error() <= 1e-8
