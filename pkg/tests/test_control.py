import pytest
from hypothesis import given
from hypothesis import strategies as st

from swarmdyn import (
    BangBang,
    Constant,
    ContinuousRarest,
    ControlledRarity,
    Inverted,
    control_value,
)

populations = st.floats(min_value=0.0, max_value=1e6, allow_nan=False)


def test_rarest_first_ratio():
    assert control_value(ContinuousRarest(), 1.0, 3.0) == 0.75


def test_bang_bang_exact_tie_returns_half():
    assert control_value(BangBang(tie_tol=0.0), 5.0, 5.0) == 0.5


def test_bang_bang_extremes():
    pol = BangBang(tie_tol=0.0)
    assert pol.value(1.0, 2.0) == 1.0
    assert pol.value(2.0, 1.0) == 0.0


def test_controlled_rarity_example():
    assert control_value(ControlledRarity(k=2.0), 2.0, 1.0) == 0.5


def test_constant_returns_its_value():
    assert Constant(0.3).value(10.0, 0.0) == 0.3


def test_inverted_complements():
    assert Inverted(ContinuousRarest()).value(1.0, 3.0) == 0.25


def test_empty_swarm_is_a_tie():
    for pol in (ContinuousRarest(), BangBang(), ControlledRarity(k=3.0)):
        assert pol.value(0.0, 0.0) == 0.5


def test_diagonal_agreement():
    # the three rarest-first-compatible rules coincide on x_a = x_b
    for x in (0.0, 0.5, 7.25):
        assert ContinuousRarest().value(x, x) == 0.5
        assert BangBang().value(x, x) == 0.5
        assert Constant(0.5).value(x, x) == 0.5


@given(populations, populations)
def test_values_stay_in_unit_interval(x_a, x_b):
    for pol in (
        Constant(0.7),
        ContinuousRarest(),
        BangBang(),
        ControlledRarity(k=0.25),
        Inverted(ContinuousRarest()),
    ):
        assert 0.0 <= pol.value(x_a, x_b) <= 1.0


@given(populations, populations, st.floats(min_value=0.01, max_value=100))
def test_controlled_rarity_monotone_in_k(x_a, x_b, k):
    # larger k shifts pushes away from the a segment
    assert ControlledRarity(k=2 * k).value(x_a, x_b) <= ControlledRarity(k=k).value(x_a, x_b) + 1e-12


def test_validation():
    with pytest.raises(ValueError):
        Constant(1.5)
    with pytest.raises(ValueError):
        ControlledRarity(k=0.0)
    with pytest.raises(ValueError):
        BangBang(tie_tol=-1.0)
    with pytest.raises(ValueError):
        control_value(ContinuousRarest(), -1.0, 2.0)
