import bisect

import pytest
from hypothesis import given, settings, strategies as st

from pracsim.adversaries import Fuzz, Idle, SingleRowKernel
from pracsim.controller import SubChannel, mitigation_rate_config
from pracsim.policies import Moat, NoMitigation, Panopticon
from pracsim.timing import DEFAULT_TIMINGS as T, ta2a

TREFI = T.tREFI


def moat_channel(**kw):
    kw.setdefault("n_banks", 1)
    kw.setdefault("series", False)
    level = kw.get("level", 1)
    return SubChannel(lambda: Moat(64, entries=level), **kw)


def test_mitigation_rate_config():
    assert mitigation_rate_config(None) is None
    assert mitigation_rate_config(5) == 5
    with pytest.raises(ValueError):
        mitigation_rate_config(7)


def test_idle_channel_only_refreshes():
    sc = moat_channel()
    r = sc.run(Idle(), 100 * TREFI)
    assert r.acts == 0 and r.alerts == 0
    assert abs(r.refs - 100) <= 1
    assert sc.banks[0].bank.refresh_pointer == r.refs % sc.banks[0].bank.n_groups
    assert r.throughput == 0.0


def test_unmitigated_hammering_has_full_rate():
    sc = SubChannel(NoMitigation, n_banks=1, series=False)
    r = sc.run(SingleRowKernel(), 1000 * TREFI)
    assert r.alerts == 0
    assert r.throughput == pytest.approx(1.0, abs=0.01)
    assert r.acts == pytest.approx(67 * 1000, rel=0.01)


def test_ideal_alert_mitigates_at_ath_plus_one():
    sc = moat_channel(ideal_alert=True)
    r = sc.run(SingleRowKernel(), 50 * TREFI)
    assert r.max_acts == 65
    assert r.stall_ns == r.rfms * T.tRFM


def test_alert_window_allows_before_rfm_acts():
    # the row crosses ATH, then three more ACTs fit in the window, then the gate one
    sc = moat_channel()
    r = sc.run(SingleRowKernel(), 50 * TREFI)
    assert r.max_acts == 65 + 3
    assert r.alerts > 0


def test_gradual_mitigation_every_k_refs():
    sc = moat_channel(mitigation_period=5)
    # 40 ACTs per row sits between ETH and ATH, so only proactive mitigation acts
    seq = iter([1000] * 40 + [2000] * 40)
    sc.run(type("A", (Idle,), {"next_demand": lambda self, sc: {0: next(seq, None)}})(), 30 * TREFI)
    assert sc.stats.alerts == 0
    assert sc.stats.proactive_mitigations >= 2


def test_postponement_limit():
    for mode, limit in (("strict", 0), ("postpone2", 2)):
        sc = SubChannel(NoMitigation, n_banks=1, postpone=mode, series=False)
        r = sc.run(SingleRowKernel(), 200 * TREFI)
        assert sc.stats.max_postponed == limit
        assert abs(r.refs - sc.clock // TREFI) <= 3


def test_panopticon_gradual_keeps_up_with_slow_rows():
    sc = SubChannel(lambda: Panopticon(), n_banks=1, mitigation_period=4, series=False)
    r = sc.run(SingleRowKernel(), 200 * TREFI)
    # one insertion per 128 ACTs, one removal per 4 tREFI: no overflow at one row
    assert r.proactive_mitigations > 0


def test_series_and_trace_csv():
    sc = SubChannel(lambda: Moat(64), n_banks=1, trace=True)
    sc.run(SingleRowKernel(), 20 * TREFI)
    lines = sc.series_csv().splitlines()
    assert lines[0].startswith("# pracsim") and lines[1] == "trefi_index,alerts,acts,stall_ns"
    assert sum(int(x.split(",")[1]) for x in lines[2:]) == sc.stats.alerts
    trace = sc.trace_csv().splitlines()
    assert len(trace) == 2 + sc.stats.acts


def test_report_json_round_trip():
    import json
    sc = moat_channel()
    r = sc.run(SingleRowKernel(), 20 * TREFI, t_rh=99)
    data = json.loads(r.to_json())
    assert data["schemaVersion"] == 1
    assert data["attack_success"] is False
    assert data["max_acts"] == r.max_acts


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([1, 2, 4]), st.integers(1, 3))
def test_alert_protocol_invariants(seed, level, banks):
    """ALERTs are at least tA2A apart and at least L ACTs separate them."""
    sc = moat_channel(level=level, n_banks=banks, mitigation_period=5, trace=True)
    sc.run(Fuzz(seed, banks=banks), 60 * TREFI)
    times = sc.alert_times
    acts = [t for t, _, _ in sc.trace]
    for a, b in zip(times, times[1:]):
        assert b - a >= ta2a(T, level)
        between = bisect.bisect_left(acts, b) - bisect.bisect_left(acts, a)
        assert between >= level
    assert sc.stats.rfms == level * sc.stats.alerts


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_runs_are_deterministic(seed):
    def once():
        sc = moat_channel(mitigation_period=5)
        return sc.run(Fuzz(seed), 40 * TREFI).to_dict(), sc.series_rows()
    assert once() == once()
