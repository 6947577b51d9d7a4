import numpy as np
import pytest

from pracsim import analytics as an
from pracsim.adversaries import (
    BenignWorkload,
    Feinting,
    Fuzz,
    Jailbreak,
    MultiRowKernel,
    Ratchet,
    RandomizedJailbreak,
    ResetStraddle,
    Tsa,
    heavy_band_probability,
    phase1_enqueues,
    randomized_jailbreak_monte_carlo,
)
from pracsim.controller import SubChannel
from pracsim.policies import IdealTracker, Moat, NoMitigation, Panopticon
from pracsim.repro import load, run_config
from pracsim.timing import DEFAULT_TIMINGS as T

TREFI = T.tREFI


def test_multi_row_kernel_cycles():
    k = MultiRowKernel(rows=3, base_row=10, spacing=2, banks=2)
    assert [k.next_demand(None) for _ in range(4)] == [
        {0: 10, 1: 10}, {0: 12, 1: 12}, {0: 14, 1: 14}, {0: 10, 1: 10}]


def test_jailbreak_reaches_queue_depth_times_period():
    sc = SubChannel(lambda: Panopticon(), n_banks=1, mitigation_period=4, series=False)
    adv = Jailbreak()
    r = sc.run(adv, T.tREFW, t_rh=128)
    assert r.attack_row == adv.target
    assert r.max_acts == 9 * 4 * 32
    assert r.attack_success


def test_phase1_enqueue_band():
    """Scalar oracle: walk the 32 increments and look for a multiple of 128."""
    inits = np.arange(256)
    expected = [any((c + i) % 128 == 0 for i in range(1, 33)) for c in range(256)]
    assert phase1_enqueues(inits).tolist() == expected
    assert set(np.flatnonzero(expected)) == set(range(96, 128)) | set(range(224, 256))


def test_heavy_band_probability():
    assert heavy_band_probability((192, 255)) == 2.0 ** -16
    assert heavy_band_probability((0, 255)) == 1.0


def test_monte_carlo_chunks_consistently():
    a = randomized_jailbreak_monte_carlo(5000, np.random.default_rng(3), decoys=2)
    b = randomized_jailbreak_monte_carlo(5000, np.random.default_rng(3), decoys=2, chunk=1000)
    assert a == b
    # two decoys: success probability 1/16
    assert a["estimate"] == pytest.approx(1 / 16, abs=4 * (1 / 16 * 15 / 16 / 5000) ** 0.5)


def test_randomized_jailbreak_forced_decoys_enqueue():
    rng = np.random.default_rng(11)
    sc = SubChannel(lambda: Panopticon(init_mode="random"), n_banks=1, mitigation_period=4,
                    rng=rng, series=False)
    adv = RandomizedJailbreak(np.random.default_rng(5), forced=True)
    counters = list(sc.banks[0].bank.counters)
    r = sc.run(adv, T.tREFW, t_rh=128)
    assert all(phase1_enqueues(counters[d]) for d in adv.decoys)
    assert adv.target not in adv.decoys
    assert 0 <= adv.begin < 4 * TREFI
    assert r.max_acts <= 1152


def test_feinting_small_pool_against_harmonic_model():
    k, pool = 1, 50
    sc = SubChannel(IdealTracker, n_banks=1, mitigation_period=k, series=False)
    adv = Feinting(pool)
    r = sc.run(adv, pool * k * TREFI)
    assert r.attack_row == adv.survivor
    model = 67 * k * an.harmonic(pool)
    assert r.max_acts == pytest.approx(model, rel=0.05)


def test_feinting_rejects_oversized_pool():
    sc = SubChannel(IdealTracker, n_banks=1, mitigation_period=1, rows=64)
    with pytest.raises(ValueError):
        Feinting(65).start(sc)


def test_reset_straddle_schedule():
    sc = SubChannel(NoMitigation, n_banks=1, reset_mode="unsafe", series=False)
    adv = ResetStraddle(acts=60, group=4)
    sc.run(adv, 16 * TREFI)
    bank = sc.banks[0].bank
    assert adv.row == 39
    assert sc.stats.acts == 120
    assert bank.ledger.current(39) == 120 and bank.effective(39) == 60


def test_tsa_needs_enough_banks():
    sc = SubChannel(lambda: Moat(64), n_banks=2)
    with pytest.raises(ValueError):
        Tsa(banks=4).start(sc)


def test_fuzz_zero_profile_never_alerts():
    for seed in range(5):
        sc = SubChannel(lambda: Moat(64), n_banks=1, mitigation_period=5, series=False)
        r = sc.run(Fuzz(seed, profile="zero"), 256 * TREFI)
        assert r.alerts == 0
        assert r.max_acts <= Fuzz.ZERO_CAP


def test_fuzz_rejects_unknown_profile():
    with pytest.raises(ValueError):
        Fuzz(0, profile="wild")


def test_benign_workload_is_seeded():
    def demands(seed):
        sc = SubChannel(lambda: Moat(64), n_banks=1)
        w = BenignWorkload(seed, banks=1)
        w.start(sc)
        return [w.next_demand(sc) for _ in range(50)]
    assert demands(1) == demands(1)
    assert demands(1) != demands(2)


def test_ratchet_rejects_bad_arguments():
    with pytest.raises(ValueError):
        Ratchet(0)
    with pytest.raises(ValueError):
        Ratchet(10, spread="zigzag")


# -- Ratchet against the closed-form bound ------------------------------------

GRID = [(ath, level) for ath in (32, 64, 128) for level in (1, 2, 4)]
_grid_cache: dict = {}


def ratchet_at_nc(config_dir, ath, level):
    if (ath, level) not in _grid_cache:
        cfg = load(config_dir, "moat64_ratchet").with_overrides(
            level=level,
            policy={"kind": "moat", "ath": ath, "entries": level},
            adversary={"kind": "ratchet", "pool": "auto", "ath": ath},
        )
        _, adv, r = run_config(cfg)
        _grid_cache[ath, level] = (adv, r)
    return _grid_cache[ath, level]


@pytest.mark.parametrize("ath,level", GRID)
def test_ratchet_never_exceeds_bound(config_dir, ath, level):
    adv, r = ratchet_at_nc(config_dir, ath, level)
    assert adv.pool == an.nc(ath, level)
    assert r.max_acts > ath + 3 + level  # ratcheting beats a single-row attack
    assert r.max_acts <= an.t_rh_safe(ath, level) + 1


# cells where the simulated attack falls more than 3 below the model
SHORT = {(32, 2), (32, 4), (64, 4), (128, 2), (128, 4)}


@pytest.mark.parametrize("ath,level", [
    pytest.param(*cell, marks=pytest.mark.xfail(
        strict=True, reason="each ALERT retires L pool rows, so the pool thins faster than the model assumes"))
    if cell in SHORT else cell
    for cell in GRID
])
def test_ratchet_tracks_bound(config_dir, ath, level):
    _, r = ratchet_at_nc(config_dir, ath, level)
    assert abs(r.max_acts - an.t_rh_safe(ath, level)) <= 3


def test_ratchet_micro_case(config_dir):
    _, adv, r = run_config(load(config_dir, "moat64_ratchet_micro"))
    assert r.max_acts == 64 + 15
    assert r.attack_row == adv.primed[-1]
