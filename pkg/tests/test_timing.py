import pytest

from pracsim.timing import (
    DEFAULT_TIMINGS,
    Timings,
    acts_per_trefi,
    alert_duration,
    attack_window,
    check_level,
    inter_alert_acts,
    ta2a,
    window_acts,
)


def test_default_values():
    t = DEFAULT_TIMINGS
    assert (t.tRC, t.tREFI, t.tRFC, t.tREFW) == (52, 3900, 410, 32_000_000)
    assert (t.tAboWindow, t.tRFM, t.refGroups) == (180, 350, 8192)


def test_acts_per_trefi():
    # (3900 - 410) / 52 = 67.1
    assert acts_per_trefi() == 67


@pytest.mark.parametrize("level", [1, 2, 4])
def test_ta2a_and_m(level):
    assert inter_alert_acts(level) == 3 + level
    assert ta2a(DEFAULT_TIMINGS, level) == 180 + 402 * level
    assert alert_duration(DEFAULT_TIMINGS, level) == 180 + 350 * level


def test_attack_window():
    assert attack_window() == 32_000_000 - 8192 * 410 == 28_641_280


def test_window_acts_covers_before_rfm_acts():
    assert window_acts() == 3


@pytest.mark.parametrize("bad", [0, 3, 8])
def test_check_level_rejects(bad):
    with pytest.raises(ValueError):
        check_level(bad)


def test_timings_validation():
    with pytest.raises(ValueError):
        Timings(tRC=0)
    with pytest.raises(TypeError):
        Timings(tRC=52.0)
    with pytest.raises(ValueError):
        Timings(tRFC=4000)
    with pytest.raises(ValueError):
        Timings(tREFI=4000)  # 4000 * 8192 > 32 ms


def test_round_trip():
    t = Timings(tREFI=3_900_000, refGroups=8)
    assert Timings.from_dict(t.to_dict()) == t
    with pytest.raises(KeyError):
        Timings.from_dict({"tBogus": 1})
