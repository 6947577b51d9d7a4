"""Mitigation policies reacting to PRAC counter updates, REF and RFM.

Every policy sees the same narrow view: the post-increment counter of the
row being precharged, plus the REF/RFM boundaries driven by the controller.

    on_act(row, count)      -> Verdict
    on_ref()                -> rows mitigated inside this REF (drain-all only)
    on_mitigation_slot()    -> row whose gradual mitigation starts now
    on_alert()              -> ALERT asserted: commit to the rows the RFMs will mitigate
    on_rfm(n)               -> rows mitigated by the n RFMs of an ALERT
    alert_pending           -> does the bank still want an ALERT?
"""

from __future__ import annotations

import enum
import heapq
from collections import deque

import numpy as np

from .bank import BankState, ResetMode


class Verdict(enum.Enum):
    NONE = 0
    RAISE_ALERT = 1


NONE = Verdict.NONE
RAISE_ALERT = Verdict.RAISE_ALERT


class Policy:
    name = "policy"
    # whether completing a mitigation also zeroes the aggressor's PRAC counter
    resets_counter = True
    # counter-reset mode applied by the bank's refresh engine
    reset_mode = ResetMode.NONE
    # a row picked at a period boundary is refreshed over the following period
    gradual = True

    def bind(self, bank: BankState, rng: np.random.Generator | None = None) -> None:
        self.bank = bank

    def on_act(self, row: int, count: int) -> Verdict:
        return NONE

    def on_ref(self) -> list[int]:
        return []

    def on_mitigation_slot(self) -> int | None:
        return None

    def on_alert(self) -> None:
        pass

    def on_mitigated(self, row: int) -> None:
        """A victim refresh of ``row`` just completed (any source)."""

    def on_rfm(self, n: int) -> list[int]:
        return []

    @property
    def alert_pending(self) -> bool:
        return False


class NoMitigation(Policy):
    name = "none"


class InitMode(str, enum.Enum):
    ZEROED = "zeroed"
    RANDOM = "random"


class PanopticonVariant(str, enum.Enum):
    GRADUAL = "gradual"
    DRAIN_ALL = "drain_all"


class Panopticon(Policy):
    """Per-bank FIFO of rows whose free-running counter toggled the threshold bit.

    A row is queued every time its counter reaches a multiple of
    ``threshold``. When the queue is full the new entry is held back and an
    ALERT is requested; it is inserted after the ALERT dequeues the head.
    Duplicates are allowed.
    """

    name = "panopticon"
    resets_counter = False

    def __init__(
        self,
        threshold: int = 128,
        capacity: int = 8,
        init_mode: InitMode | str = InitMode.ZEROED,
        variant: PanopticonVariant | str = PanopticonVariant.GRADUAL,
        init_high: int = 255,
        ref_budget: int = 2,
    ):
        if threshold <= 0 or capacity <= 0:
            raise ValueError("threshold and capacity must be positive")
        self.threshold = threshold
        self.capacity = capacity
        self.init_mode = InitMode(init_mode)
        self.variant = PanopticonVariant(variant)
        self.init_high = init_high
        self.ref_budget = ref_budget
        self.queue: deque[int] = deque()
        self.overflow: deque[int] = deque()
        self._drain = False

    def bind(self, bank, rng=None):
        super().bind(bank, rng)
        if self.init_mode is InitMode.RANDOM:
            if rng is None:
                raise ValueError("randomized Panopticon needs an RNG")
            bank.counters[:] = rng.integers(0, self.init_high + 1, size=bank.rows).tolist()

    def on_act(self, row, count):
        if count % self.threshold:
            return NONE
        if len(self.queue) < self.capacity:
            self.queue.append(row)
            return NONE
        self.overflow.append(row)
        return RAISE_ALERT

    def _refill(self) -> None:
        while self.overflow and len(self.queue) < self.capacity:
            self.queue.append(self.overflow.popleft())

    def _pop(self, n: int) -> list[int]:
        out = []
        while self.queue and len(out) < n:
            out.append(self.queue.popleft())
            self._refill()
        return out

    def on_ref(self):
        if self.variant is not PanopticonVariant.DRAIN_ALL:
            return []
        rows = self._pop(self.ref_budget)
        self._drain = bool(self.queue)
        return rows

    def on_mitigation_slot(self):
        if self.variant is PanopticonVariant.DRAIN_ALL:
            return None
        rows = self._pop(1)
        return rows[0] if rows else None

    def on_rfm(self, n):
        rows = self._pop(n)
        if not self.queue:
            self._drain = False
        return rows

    @property
    def alert_pending(self):
        return bool(self.overflow) or (self._drain and bool(self.queue))


class Moat(Policy):
    """Dual-threshold tracker keeping the ``entries`` highest-count rows.

    Rows above ``eth`` compete for the current-tracked set (CTA); a row above
    ``ath`` requests an ALERT. At each mitigation-period boundary the highest
    entry is latched into the CMA for gradual mitigation. When an ALERT is
    asserted the tracked rows are latched for the RFMs, which frees the CTA
    to track rows activated during the ALERT window.
    """

    name = "moat"
    resets_counter = True
    reset_mode = ResetMode.SAFE

    def __init__(self, ath: int = 64, eth: int | None = None, entries: int = 1):
        if eth is None:
            eth = ath // 2
        if not 0 <= eth < ath:
            raise ValueError(f"need 0 <= ETH < ATH, got ETH={eth}, ATH={ath}")
        if entries <= 0:
            raise ValueError("entries must be positive")
        self.ath = ath
        self.eth = eth
        self.entries = entries
        # row -> tracked count; insertion order breaks ties in favour of incumbents
        self.cta: dict[int, int] = {}
        self.cma: int | None = None
        # rows committed to the RFMs of the ALERT in flight
        self.reactive: list[int] = []

    def on_act(self, row, count):
        cta = self.cta
        tracked = cta.get(row)
        if tracked is not None:
            # the CTA copy counts alongside the array counter
            count = max(tracked + 1, count)
            cta[row] = count
        elif count > self.eth:
            if len(cta) < self.entries:
                cta[row] = count
            else:
                low_row = min(cta, key=cta.__getitem__)
                if count > cta[low_row]:
                    del cta[low_row]
                    cta[row] = count
        return RAISE_ALERT if self.above_ath(count) else NONE

    def above_ath(self, count: int) -> bool:
        return count > self.ath

    def _take_max(self) -> int:
        row = max(self.cta, key=self.cta.__getitem__)
        del self.cta[row]
        return row

    def on_mitigation_slot(self):
        if not self.cta:
            self.cma = None
            return None
        self.cma = self._take_max()
        return self.cma

    def on_mitigated(self, row):
        # the counter was just reset, so any tracked copy is stale
        self.cta.pop(row, None)

    def on_alert(self):
        while self.cta and len(self.reactive) < self.entries:
            self.reactive.append(self._take_max())

    def on_rfm(self, n):
        budget = min(n, self.entries)
        rows = self.reactive[:budget]
        self.reactive = self.reactive[budget:]
        while self.cta and len(rows) < budget:
            rows.append(self._take_max())
        # an RFM with nothing tracked finishes the row already under mitigation
        if self.cma is not None and (self.cma in rows or len(rows) < budget):
            if self.cma not in rows:
                rows.append(self.cma)
            self.cma = None
        return rows

    @property
    def alert_pending(self):
        return any(self.above_ath(c) for c in self.cta.values())


class IdealTracker(Policy):
    """Oracle-grade per-row counting: mitigates the globally hottest row each slot.

    Used as the target of feinting; never raises ALERTs.
    """

    name = "ideal"
    resets_counter = True
    gradual = False

    def bind(self, bank, rng=None):
        super().bind(bank, rng)
        self._heap: list[tuple[int, int]] = []

    def on_act(self, row, count):
        heapq.heappush(self._heap, (-count, row))
        return NONE

    def on_mitigation_slot(self):
        heap = self._heap
        effective = self.bank.effective
        while heap:
            neg, row = heapq.heappop(heap)
            if -neg == effective(row) and -neg > 0:
                return row
        return None
