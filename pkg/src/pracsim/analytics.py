"""Closed-form models that simulation results are checked against.

Covers the Ratchet bound (priming time, ALERT time, critical pool size and
the resulting safe threshold), the harmonic feinting model, throughput under
ALERT-based performance attacks, the benign slowdown model and tracker
storage arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .timing import (
    BEFORE_RFM_ACTS,
    DEFAULT_TIMINGS,
    Timings,
    acts_per_trefi,
    attack_window,
    check_level,
    inter_alert_acts,
    ta2a,
)


def round_half_up(x: float) -> int:
    """Round to nearest, halves away from zero (Python's round() is banker's)."""
    return math.floor(x + 0.5)


# -- Ratchet bound ----------------------------------------------------------


@dataclass(frozen=True)
class RatchetModel:
    ath: int
    level: int = 1
    timings: Timings = field(default=DEFAULT_TIMINGS)

    def __post_init__(self):
        if self.ath < 1:
            raise ValueError(f"ATH must be at least 1, got {self.ath}")
        check_level(self.level)

    @property
    def m(self) -> int:
        return inter_alert_acts(self.level)

    @property
    def ta2a(self) -> int:
        return ta2a(self.timings, self.level)

    @property
    def nc(self) -> int:
        return nc(self.ath, self.level, self.timings)

    @property
    def t_rh_safe_exact(self) -> float:
        return self.ath + math.log(self.nc, self.m / BEFORE_RFM_ACTS) + self.m

    @property
    def t_rh_safe(self) -> int:
        return round_half_up(self.t_rh_safe_exact)


def ratchet_time(n: int, model: RatchetModel) -> float:
    """Priming plus ALERT time for a pool of ``n`` rows, in ns."""
    if n < 0:
        raise ValueError("pool size must be non-negative")
    t = model.timings
    return n * model.ath * t.tRC + n / model.level * model.ta2a


def nc(ath: int, level: int = 1, t: Timings = DEFAULT_TIMINGS) -> int:
    """Largest pool whose Ratchet attack fits in one refresh window."""
    model = RatchetModel(ath, level, t)
    budget = attack_window(t)
    n = int(budget // (ath * t.tRC + model.ta2a / level))
    # guard against float error at the boundary
    while ratchet_time(n + 1, model) <= budget:
        n += 1
    while n > 0 and ratchet_time(n, model) > budget:
        n -= 1
    return n


def t_rh_safe(ath: int, level: int = 1, t: Timings = DEFAULT_TIMINGS) -> int:
    return RatchetModel(ath, level, t).t_rh_safe


# -- feinting ---------------------------------------------------------------


def harmonic(n: int) -> float:
    return math.fsum(1.0 / i for i in range(1, n + 1))


def feinting_periods(k: int, t: Timings = DEFAULT_TIMINGS) -> int:
    """Mitigation periods (one aggressor per ``k`` tREFI) inside one window."""
    if k < 1:
        raise ValueError("mitigation period must be at least one tREFI")
    return attack_window(t) // (k * t.tREFI)


def feinting_bound(k: int, t: Timings = DEFAULT_TIMINGS) -> float:
    """Harmonic approximation of the feinting survivor count, a*H_P."""
    a = k * acts_per_trefi(t)
    return a * harmonic(feinting_periods(k, t))


# -- throughput -------------------------------------------------------------


def alert_saturation_throughput(level: int = 1, t: Timings = DEFAULT_TIMINGS) -> float:
    """Normalized ACT throughput when ALERTs run back to back.

    M = 3 + L activations fit in every tA2A. Counting tA2A in whole tRC units
    (11 at L=1) gives the familiar 4/11.
    """
    return inter_alert_acts(level) * t.tRC / ta2a(t, level)


def rfm_units(level: int = 1, t: Timings = DEFAULT_TIMINGS) -> int:
    """Stall of one ALERT's RFMs in whole tRC units."""
    return math.ceil(check_level(level) * t.tRFM / t.tRC)


KERNELS = ("single_row", "multi_row", "tsa")


def kernel_throughput(kernel: str, ath: int = 64, t: Timings = DEFAULT_TIMINGS,
                      level: int = 1, rows: int = 5, banks: int = 1) -> float:
    """Normalized throughput of the performance-attack kernels, in tRC units.

    ``single_row``: ATH+1 ACTs raise an ALERT, M more fit around it, and the
    RFMs stall the bank; ``multi_row`` cycles ``rows`` rows so each ALERT
    costs only the RFM stall; ``tsa`` is a first-order model where every bank
    primes its rows and every bank's ALERTs stall the whole sub-channel. The
    TSA model ignores rows that MOAT retires in waiting banks at each RFM, so
    it is a pessimistic bound, never below the saturation throughput.
    """
    r = rfm_units(level, t)
    if kernel == "single_row":
        acts = ath + 1 + inter_alert_acts(level)
        return acts / (acts + r)
    per_row = ath + 1
    if kernel == "multi_row":
        return rows * per_row / (rows * per_row + rows * r)
    if kernel == "tsa":
        if banks < 1:
            raise ValueError("banks must be positive")
        busy = rows * per_row * t.tRC
        stall = rows * banks * level * t.tRFM
        return max(busy / (busy + stall), alert_saturation_throughput(level, t))
    raise ValueError(f"unknown kernel {kernel!r}; expected one of {KERNELS}")


@dataclass(frozen=True)
class BenignModel:
    acts_per_alert: float
    throughput: float

    @property
    def loss(self) -> float:
        return 1.0 - self.throughput


def benign_slowdown_model(benign_fraction: float, ath: int = 64, level: int = 1,
                          t: Timings = DEFAULT_TIMINGS) -> BenignModel:
    """One ALERT per (ATH+1)/(1-benign_fraction) ACTs, each costing its lost ACT slots.

    An ALERT blocks the channel for the ABO window plus L RFMs, of which the
    Before-RFM ACTs recover three slots.
    """
    if not 0.0 <= benign_fraction <= 1.0:
        raise ValueError("benign_fraction must lie in [0, 1]")
    if benign_fraction == 1.0:
        return BenignModel(math.inf, 1.0)
    apa = (ath + 1) / (1.0 - benign_fraction)
    lost = t.tAboWindow + check_level(level) * t.tRFM - BEFORE_RFM_ACTS * t.tRC
    return BenignModel(apa, apa * t.tRC / (apa * t.tRC + lost))


# -- storage ----------------------------------------------------------------

BANKS_PER_CHIP = 32


def bytes_per_bank(level: int = 1) -> int:
    """MOAT-L SRAM: L CTA entries (row id + count) and the CMA, in bytes."""
    return 3 * check_level(level) + 4


def bytes_per_chip(level: int = 1, banks: int = BANKS_PER_CHIP) -> int:
    return bytes_per_bank(level) * banks
