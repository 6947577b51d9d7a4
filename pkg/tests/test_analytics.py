import math
from fractions import Fraction

import pytest

from pracsim import analytics as an
from pracsim.timing import DEFAULT_TIMINGS

T = DEFAULT_TIMINGS
# published T_RH-safe thresholds, by (ATH, level)
PUBLISHED = {(32, 1): 69, (32, 2): 56, (32, 4): 50,
             (64, 1): 99, (64, 2): 87, (64, 4): 82,
             (128, 1): 161, (128, 2): 150, (128, 4): 145}


def oracle_nc(ath, level):
    """Largest N with N*ATH*tRC + N*tA2A/L <= window, by exact search."""
    window = T.tREFW - T.refGroups * T.tRFC
    per_row = Fraction(ath * T.tRC) + Fraction(T.tAboWindow + (T.tRFM + T.tRC) * level, level)
    n = 0
    while (n + 1) * per_row <= window:
        n += 1
    return n


@pytest.mark.parametrize("ath,level", sorted(PUBLISHED))
def test_nc_matches_exact_search(ath, level):
    assert an.nc(ath, level) == oracle_nc(ath, level)


def test_nc_known_values():
    assert an.nc(64, 1) == 7325
    assert an.nc(128, 1) == 3957


@pytest.mark.parametrize("ath,level", sorted(PUBLISHED))
def test_t_rh_safe_against_published(ath, level):
    m = 3 + level
    exact = ath + math.log(oracle_nc(ath, level)) / math.log(m / 3) + m
    assert an.RatchetModel(ath, level).t_rh_safe_exact == pytest.approx(exact)
    assert abs(an.t_rh_safe(ath, level) - PUBLISHED[ath, level]) <= 1


def test_t_rh_safe_exact_cells():
    assert an.t_rh_safe(64, 1) == 99
    assert an.t_rh_safe(128, 1) == 161


def test_ratchet_time_is_linear():
    model = an.RatchetModel(64, 2)
    assert an.ratchet_time(0, model) == 0
    assert an.ratchet_time(10, model) == pytest.approx(10 * an.ratchet_time(1, model))
    with pytest.raises(ValueError):
        an.ratchet_time(-1, model)
    with pytest.raises(ValueError):
        an.RatchetModel(0)


def test_round_half_up():
    assert [an.round_half_up(x) for x in (0.5, 1.5, 2.5, 2.49)] == [1, 2, 3, 2]


def test_feinting_bound_exact_harmonic():
    for k in range(1, 6):
        periods = an.feinting_periods(k)
        assert periods == 28_641_280 // (k * 3900)
        h = sum(Fraction(1, i) for i in range(1, periods + 1))
        assert an.feinting_bound(k) == pytest.approx(float(67 * k * h), rel=1e-12)
    with pytest.raises(ValueError):
        an.feinting_periods(0)


def test_saturation_throughput():
    assert an.alert_saturation_throughput(1) == pytest.approx(4 / 11, abs=0.01)
    for level in (1, 2, 4):
        assert an.alert_saturation_throughput(level) == pytest.approx(
            (3 + level) * 52 / (180 + 402 * level))


def test_kernel_closed_forms():
    assert an.rfm_units(1) == 7
    assert an.kernel_throughput("single_row") == pytest.approx(69 / 76)
    assert an.kernel_throughput("multi_row") == pytest.approx(325 / 360)
    assert an.kernel_throughput("tsa", banks=1) > an.kernel_throughput("tsa", banks=17)
    assert an.kernel_throughput("tsa", banks=1000) == pytest.approx(an.alert_saturation_throughput(1))
    with pytest.raises(ValueError):
        an.kernel_throughput("bogus")


def test_benign_model():
    model = an.benign_slowdown_model(0.996)
    assert model.acts_per_alert == pytest.approx(65 / 0.004)
    assert model.acts_per_alert > 6500
    lost = 180 + 350 - 3 * 52
    assert model.loss == pytest.approx(lost / (model.acts_per_alert * 52 + lost))
    assert an.benign_slowdown_model(1.0).loss == 0.0
    with pytest.raises(ValueError):
        an.benign_slowdown_model(1.5)


@pytest.mark.parametrize("level,per_bank,per_chip", [(1, 7, 224), (2, 10, 320), (4, 16, 512)])
def test_storage(level, per_bank, per_chip):
    assert an.bytes_per_bank(level) == per_bank
    assert an.bytes_per_chip(level) == per_chip
