import math

import pytest

from wifipower import rf
from wifipower.units import Distance, Frequency, GainDbi, PowerDbm

F_CH6 = Frequency(2.437e9)


def fspl_oracle(d_m: float, f_hz: float) -> float:
    # independent evaluation of the textbook formula
    return 20.0 * math.log10(4.0 * math.pi * d_m * f_hz / 299792458.0)


def test_fspl_known_points():
    assert rf.fspl_db(Distance(1.0), F_CH6) == pytest.approx(40.1849, abs=1e-3)
    assert rf.fspl_db(Distance(6.1), F_CH6) == pytest.approx(55.8915, abs=1e-3)
    for d in (0.5, 1.0, 2.0, 3.048, 6.1, 12.0):
        assert rf.fspl_db(Distance(d), F_CH6) == pytest.approx(
            fspl_oracle(d, 2.437e9), rel=1e-12
        )


def test_fspl_doubling_is_inverse_square():
    a = rf.fspl_db(Distance(1.0), F_CH6)
    b = rf.fspl_db(Distance(2.0), F_CH6)
    assert b - a == pytest.approx(20.0 * math.log10(2.0), abs=1e-9)


def test_fspl_rejects_non_positive():
    with pytest.raises(ValueError):
        rf.fspl_db(Distance(0.0), F_CH6)


def test_received_power_budget():
    # 36 dBm EIRP, 2 dBi receive antenna, 6.1 m, no wall
    link = rf.LinkGeometry(Distance(6.1), F_CH6)
    p = rf.received_power(PowerDbm(36.0), GainDbi(2.0), link)
    assert p.value == pytest.approx(38.0 - 55.8915, abs=1e-3)
    # stock-router parameters at ten feet land below -20 dBm
    link10 = rf.LinkGeometry(Distance.from_feet(10.0), F_CH6)
    p10 = rf.received_power(PowerDbm(23.0 + 4.04), GainDbi(2.0), link10)
    assert p10.value == pytest.approx(-20.8, abs=0.1)


def test_wall_attenuation_is_additive():
    base = rf.LinkGeometry(Distance(3.0), F_CH6, rf.WallMaterial.NONE)
    glass = rf.LinkGeometry(Distance(3.0), F_CH6, rf.WallMaterial.DOUBLE_PANE_GLASS)
    p0 = rf.received_power(PowerDbm(36.0), GainDbi(2.0), base)
    p1 = rf.received_power(PowerDbm(36.0), GainDbi(2.0), glass)
    assert p0.value - p1.value == pytest.approx(3.0, abs=1e-12)


def test_wall_ordering():
    order = [
        rf.WallMaterial.NONE,
        rf.WallMaterial.DOUBLE_PANE_GLASS,
        rf.WallMaterial.WOODEN_DOOR,
        rf.WallMaterial.HOLLOW_WALL,
        rf.WallMaterial.DOUBLE_SHEETROCK,
    ]
    atts = [w.attenuation_db for w in order]
    assert atts[0] == 0.0
    assert atts == sorted(atts)


def test_range_for_threshold_known_points():
    # frozen from the closed-form inversion at the battery-free sensitivity
    d = rf.range_for_threshold(PowerDbm(36.0), GainDbi(2.0), F_CH6, PowerDbm(-17.8))
    assert d.meters == pytest.approx(6.0361, abs=1e-3)
    assert 18.0 < d.feet < 22.0
    # 1.5 dB better sensitivity stretches range by 10**(1.5/20)
    d2 = rf.range_for_threshold(PowerDbm(36.0), GainDbi(2.0), F_CH6, PowerDbm(-19.3))
    assert d2.meters / d.meters == pytest.approx(10 ** (1.5 / 20.0), rel=1e-9)


def test_range_threshold_above_budget_is_no_solution():
    with pytest.raises(rf.NoSolutionError):
        rf.range_for_threshold(PowerDbm(36.0), GainDbi(2.0), F_CH6, PowerDbm(50.0))


def test_received_power_strictly_decreasing_and_round_trip():
    prev = None
    for d in (0.5, 1.0, 2.0, 4.0, 8.0, 16.0):
        p = rf.received_power(
            PowerDbm(36.0), GainDbi(2.0), rf.LinkGeometry(Distance(d), F_CH6)
        )
        if prev is not None:
            assert p.value < prev
        prev = p.value
        # inversion round-trips the exact distance
        back = rf.range_for_threshold(PowerDbm(36.0), GainDbi(2.0), F_CH6, p)
        assert back.meters == pytest.approx(d, rel=1e-9)


def test_channel_centers():
    assert rf.CHANNEL_FREQ_HZ == {1: 2.412e9, 6: 2.437e9, 11: 2.462e9}
