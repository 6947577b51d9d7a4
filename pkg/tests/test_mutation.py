"""The acceptance checks must notice a subtly wrong tracker."""

from pracsim.adversaries import SingleRowKernel
from pracsim.controller import SubChannel
from pracsim.policies import Moat
from pracsim.repro import ideal_single_row_peak
from pracsim.timing import DEFAULT_TIMINGS as T


def test_correct_tracker_peaks_at_ath_plus_one():
    assert ideal_single_row_peak() == 65


def test_off_by_one_threshold_is_caught(monkeypatch):
    monkeypatch.setattr(Moat, "above_ath", lambda self, count: count >= self.ath)
    # the upper bound alone would still hold ...
    assert ideal_single_row_peak() <= 66
    # ... but the tightness probe flags the mutation
    assert ideal_single_row_peak() != 65


def test_mutation_also_shifts_windowed_peak(monkeypatch):
    def peak():
        sc = SubChannel(lambda: Moat(64), n_banks=1, series=False)
        return sc.run(SingleRowKernel(), 50 * T.tREFI).max_acts
    before = peak()
    monkeypatch.setattr(Moat, "above_ath", lambda self, count: count >= self.ath)
    assert peak() == before - 1
