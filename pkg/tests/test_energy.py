import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ecoslice.energy import Configuration, PowerParams, base_station_power, power_table, slice_energy
from ecoslice.env import action_space
from ecoslice.traffic import SliceSpec

P = PowerParams()
SPECS = (SliceSpec(0, "Facebook", 1.2, 10.0), SliceSpec(1, "YouTube", 1.6, 1.0),
         SliceSpec(2, "Google", 1.4, 15.0), SliceSpec(3, "EcoSlice", 1.0, 11.0, True))


@pytest.mark.parametrize("psi, rho, expected", [(1.0, 1.0, 881.0), (1.6, 0.0, 222.4), (1.2, 0.3, 433.92)])
def test_slice_energy_examples(psi, rho, expected):
    assert slice_energy(SliceSpec(0, "s", psi, 1.0), rho, P) == pytest.approx(expected, rel=1e-12)


def test_slice_energy_domain():
    with pytest.raises(ValueError):
        slice_energy(SPECS[0], 1.2, P)
    with pytest.raises(ValueError):
        slice_energy(SPECS[0], -0.1, P)


def test_station_examples():
    all_on = Configuration((True,) * 4)
    assert base_station_power(all_on, SPECS, [0.25] * 4, P) == pytest.approx(1705.4, rel=1e-12)
    eco = Configuration((False, False, False, True))
    assert base_station_power(eco, SPECS, [0, 0, 0, 1.0], P) == pytest.approx(899.0, rel=1e-12)


def test_eco_must_stay_on():
    with pytest.raises(ValueError, match="EcoSlice"):
        base_station_power(Configuration((True, True, True, False)), SPECS, [0.25] * 4, P)


def test_params_positive():
    with pytest.raises(ValueError):
        PowerParams(p_static=0)


rho_st = st.lists(st.floats(0, 1), min_size=4, max_size=4).filter(lambda v: sum(v) > 0).map(
    lambda v: np.array(v) / sum(v))


@settings(max_examples=100, deadline=None)
@given(rho_st)
def test_table_matches_scalar_and_floor(rho):
    configs = action_space(SPECS)
    active = np.array([c.active for c in configs])
    table = power_table(active, np.array([s.psi for s in SPECS]), np.tile(rho, (len(configs), 1)), P)
    for k, c in enumerate(configs):
        p = base_station_power(c, SPECS, rho, P)
        assert table[k] == pytest.approx(p, rel=1e-12)
        assert p >= P.p_static


@settings(max_examples=100, deadline=None)
@given(rho_st, st.integers(0, 2))
def test_switching_a_slice_on_costs_power(rho, i):
    off = [False, False, False, True]
    on = list(off)
    on[i] = True
    assert base_station_power(Configuration(on), SPECS, rho, P) > base_station_power(Configuration(off), SPECS, rho, P)
