import pytest

from coherent_constraints.errors import ConfigurationError
from coherent_constraints.experiments import REGISTRY, catalogue, resolve

NAMES = [e.name for e in catalogue()]


def test_catalogue_is_stable_and_large():
    assert len(NAMES) >= 12
    assert NAMES == [e.name for e in catalogue()]
    assert len(set(NAMES)) == len(NAMES)


@pytest.mark.parametrize("name", NAMES)
def test_anchor_resolves(name):
    assert callable(resolve(REGISTRY[name].anchor)) or resolve(REGISTRY[name].anchor) is not None


@pytest.mark.parametrize("name", NAMES)
def test_defaults_pass(name):
    rows = REGISTRY[name].run({}, 0)
    assert rows
    assert all(r.passed for r in rows), [(r.quantity, r.residual, r.tolerance) for r in rows if not r.passed]


def test_unknown_parameter_rejected():
    with pytest.raises(ConfigurationError):
        REGISTRY["su2-kernel"].run({"spin": 1}, 0)


def test_bad_value_rejected():
    with pytest.raises(ConfigurationError):
        REGISTRY["su2-kernel"].run({"s": "one"}, 0)


def test_string_values_are_coerced():
    rows = REGISTRY["su2-kernel"].run({"s": "1.5"}, 0)
    rank = next(r for r in rows if r.quantity == "rank")
    assert rank.value == 4
