import cmath
import json
import math

import pytest
from hypothesis import given, strategies as st

from delayadm.errors import (
    DelayNonPositive,
    EigenvalueOutOfRange,
    ParseError,
    ValidationError,
)
from delayadm.model import (
    ComponentParams,
    Constant,
    DiagonalDelaySystem,
    Explicit,
    Geometric,
    Power,
    ToleranceProfile,
    parse_complex,
    parse_system_spec,
    reduce_params,
    serialize_system,
    validate_component,
)

finite = st.floats(-1e3, 1e3, allow_nan=False)
complexes = st.builds(complex, finite, finite)


def test_tolerance_defaults():
    t = ToleranceProfile()
    assert (t.quad_tol, t.root_tol, t.branch_tol, t.boundary_eps) == (1e-9, 1e-12, 1e-9, 1e-6)
    with pytest.raises(ValidationError):
        ToleranceProfile(quad_tol=0.0)


def test_reduce_examples():
    assert reduce_params(-1, 0.3, 1) == (-1.0, 0.3 + 0j)
    a, g = reduce_params(-1 + 1j * math.pi, 1, 1)
    assert a == -1 and abs(g - (-1)) < 1e-15
    a, g = reduce_params(1j, 1j, math.pi / 2)
    assert a == 0 and abs(g - 1) < 1e-15 and abs(abs(g) - 1) < 1e-15


@given(complexes, complexes, st.floats(1e-3, 50))
def test_reduce_preserves_modulus(lam, gamma, tau):
    _, g = reduce_params(lam, gamma, tau)
    assert abs(abs(g) - abs(gamma)) <= 1e-14 * max(1.0, abs(gamma))


def test_reduce_rejects_bad_tau():
    with pytest.raises(DelayNonPositive):
        reduce_params(0, 1, 0)


def test_validate_examples():
    validate_component(ComponentParams(-1, 0.3, 1, 1))
    with pytest.raises(EigenvalueOutOfRange):
        validate_component(ComponentParams(2, 0, 1, 1))
    with pytest.raises(DelayNonPositive):
        validate_component(ComponentParams(0, -1, 1, 0))


def test_boundary_hypothesis_flag():
    p = validate_component(ComponentParams(0.5, -0.1, 1, 2.0))
    assert p.boundary_hypothesis
    assert not ComponentParams(0.4, -0.1, 1, 2.0).boundary_hypothesis


def test_non_finite_rejected():
    with pytest.raises(ValidationError):
        ComponentParams(float("nan"), 0)
    with pytest.raises(ValidationError):
        ComponentParams(0, complex(0, float("inf")))


@pytest.mark.parametrize("text,value", [
    ("1+2i", 1 + 2j), ("-0.5-i", -0.5 - 1j), ("3", 3), ("2.5i", 2.5j), ("i", 1j), ("1 - 2j", 1 - 2j),
])
def test_parse_complex(text, value):
    assert parse_complex(text) == value


def test_rules():
    assert Power(-1, 2)(3) == -9
    assert Geometric(0.5)(2) == 0.25
    assert Geometric(0.5, 4)(1) == 2
    assert Constant(0.1)(7) == 0.1
    assert Explicit((1, 2, 3))(2) == 2


HEAT = """{
  "tau": 1,
  "preset": "heat",
  "N": 50,
  "gamma_rule": {"kind": "constant", "value": 0.1},
  "b_rule": {"kind": "geometric", "base": 0.5}
}"""


def test_heat_spec():
    sys_ = parse_system_spec(HEAT)
    assert sys_.N == 50
    for k in (1, 7, 50):
        c = sys_.component(k)
        assert c.lam == -k * k and c.gamma == 0.1 and c.b == 0.5 ** k


def test_spec_errors():
    with pytest.raises(ValidationError):
        parse_system_spec('{"tau": 1, "explicit_components": []}')
    mixed = {"tau": 1, "explicit_components": [
        {"lambda": -1, "gamma": 0.1}, {"lambda": -2, "gamma": 0.1, "tau": 2}]}
    with pytest.raises(ValidationError):
        parse_system_spec(json.dumps(mixed))
    with pytest.raises(ParseError) as err:
        parse_system_spec('{"tau": 1,\n "N": }')
    assert err.value.line == 2
    with pytest.raises(ParseError) as err:
        parse_system_spec('{"tau": 1, "N": 3, "bogus": 1}')
    assert err.value.field == "bogus"
    with pytest.raises(ValidationError):
        DiagonalDelaySystem(1.0, 0, "heat", gamma_rule=Constant(0.1), b_rule=Constant(1))


@given(
    st.floats(0.1, 5),
    st.integers(1, 40),
    st.sampled_from(["generic", "heat", "direct"]),
    complexes,
    st.floats(0.1, 0.99),
)
def test_round_trip(tau, N, preset, g, rho):
    lam = None if preset == "heat" else Power(-1.0, 2.0)
    gam = None if preset == "direct" else Constant(g)
    sys_ = DiagonalDelaySystem(tau, N, preset, lam, gam, Geometric(rho))
    again = parse_system_spec(serialize_system(sys_))
    assert again.to_dict() == sys_.to_dict()


def test_round_trip_explicit():
    comps = (ComponentParams(-1 + 1j, 0.3j, 2 - 1j, 1.5), ComponentParams(-4, 0.2, 1, 1.5))
    sys_ = DiagonalDelaySystem(1.5, 2, explicit=comps)
    again = parse_system_spec(serialize_system(sys_))
    assert again.components() == list(comps)


def test_direct_component_mapping():
    sys_ = DiagonalDelaySystem(1.0, 5, "direct", Power(-1.0, -2.0), None, Geometric(0.9))
    c = sys_.component(2)
    assert c.lam == 0 and c.gamma == -0.25 and abs(c.b - 0.81) < 1e-15


def test_rotation_is_exact_complex_product():
    lam, gamma, tau = 0.3 - 2j, 1 + 1j, 0.7
    _, g = reduce_params(lam, gamma, tau)
    assert g == gamma * cmath.exp(-1j * lam.imag * tau)
