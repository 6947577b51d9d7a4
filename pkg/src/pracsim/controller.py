"""Sub-channel memory controller with the ALERT-Back-Off protocol.

Time advances in tRC-sized ACT slots. Between slots the controller issues
REFs when they fall due and services ALERTs: after assertion the channel
keeps operating for ``tAboWindow`` ns, then stalls for L RFMs, then must see
L more activations before the next assertion.
"""

from __future__ import annotations

import csv
import enum
import io
import json
from dataclasses import dataclass, field, asdict
from typing import Callable, Iterable

import numpy as np

from .bank import BankState, ResetMode
from .policies import Policy, RAISE_ALERT
from .timing import DEFAULT_TIMINGS, Timings, acts_per_trefi, check_level

SCHEMA_VERSION = 1
MITIGATION_PERIODS = (1, 2, 3, 4, 5, 10)


class AboState(str, enum.Enum):
    NORMAL = "normal"
    WINDOW = "window"


class PostponeMode(str, enum.Enum):
    STRICT = "strict"
    POSTPONE2 = "postpone2"


MAX_POSTPONED = 2


def mitigation_rate_config(k: int | None) -> int | None:
    """Validate "one aggressor per k tREFI"; ``None`` leaves mitigation to ALERTs alone.

    Each REF donates one victim-row refresh, so a policy needing four victim
    refreshes (Panopticon) runs at k=4 and one that also resets the counter
    (MOAT) at k=5.
    """
    if k is None:
        return None
    if k not in MITIGATION_PERIODS:
        raise ValueError(f"mitigation period must be one of {MITIGATION_PERIODS} or None, got {k!r}")
    return k


@dataclass
class BankSlot:
    bank: BankState
    policy: Policy
    inflight: int | None = None


@dataclass
class Stats:
    acts: int = 0
    alerts: int = 0
    rfms: int = 0
    refs: int = 0
    stall_ns: int = 0
    proactive_mitigations: int = 0
    reactive_mitigations: int = 0
    ref_mitigations: int = 0
    max_postponed: int = 0


@dataclass
class SimReport:
    schemaVersion: int
    policy: str
    adversary: str
    level: int
    banks: int
    elapsed_ns: int
    acts: int
    alerts: int
    rfms: int
    refs: int
    stall_ns: int
    proactive_mitigations: int
    reactive_mitigations: int
    ref_mitigations: int
    throughput: float
    max_unmitigated: list
    attack_bank: int
    attack_row: int
    max_acts: int
    t_rh: int | None
    attack_success: bool | None
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


class SubChannel:
    def __init__(
        self,
        policy_factory: Callable[[], Policy],
        n_banks: int = 32,
        level: int = 1,
        mitigation_period: int | None = None,
        timings: Timings = DEFAULT_TIMINGS,
        postpone: PostponeMode | str = PostponeMode.STRICT,
        ideal_alert: bool = False,
        rows: int = 65536,
        rows_per_group: int = 8,
        reset_mode: ResetMode | str | None = None,
        rng: np.random.Generator | None = None,
        trace: bool = False,
        series: bool = True,
    ):
        if n_banks <= 0:
            raise ValueError("n_banks must be positive")
        self.t = timings
        self.level = check_level(level)
        self.mitigation_period = mitigation_rate_config(mitigation_period)
        self.postpone = PostponeMode(postpone)
        self.ideal_alert = ideal_alert
        self.banks: list[BankSlot] = []
        for _ in range(n_banks):
            policy = policy_factory()
            mode = policy.reset_mode if reset_mode is None else ResetMode(reset_mode)
            bank = BankState(rows, rows_per_group, mode)
            policy.bind(bank, rng)
            self.banks.append(BankSlot(bank, policy))
        self.policy_name = self.banks[0].policy.name

        self.clock = 0
        self.next_ref_due = 0
        self.postponed = 0
        self.ref_index = 0
        self.abo_state = AboState.NORMAL
        self.window_end = 0
        self.gate_remaining = 0
        self.pending_alert_banks: set[int] = set()
        self.alert_times: list[int] = []
        self.stats = Stats()
        self.banks_used: set[int] = set()
        self.trace: list[tuple[int, int, int]] | None = [] if trace else None
        self.series: dict[int, list[int]] | None = {} if series else None
        # (kind, bank, row) for the events of the latest step, readable by adversaries.
        # kinds: ref/proactive/rfm (mitigations), latch, alert, refresh
        self.events: list[tuple[str, int, int]] = []

    # -- observable helpers -------------------------------------------------

    def slots_until_ref(self) -> int:
        """Whole ACT slots that fit before the next REF is due."""
        return max(0, (self.next_ref_due - self.clock) // self.t.tRC)

    def window_slots(self) -> int:
        if self.abo_state is not AboState.WINDOW:
            return 0
        return max(0, (self.window_end - self.clock) // self.t.tRC)

    # -- internals ----------------------------------------------------------

    def _series_add(self, when: int, col: int, amount: int) -> None:
        if self.series is None:
            return
        idx = when // self.t.tREFI
        row = self.series.get(idx)
        if row is None:
            row = self.series[idx] = [0, 0, 0]
        row[col] += amount

    def _mitigate(self, b: int, row: int, kind: str) -> None:
        slot = self.banks[b]
        slot.bank.victim_refresh(row, reset_counter=slot.policy.resets_counter)
        slot.policy.on_mitigated(row)
        self.events.append((kind, b, row))

    def _refresh(self, count: int) -> None:
        t = self.t
        period = self.mitigation_period
        stats = self.stats
        for _ in range(count):
            self.clock += t.tRFC
            self.ref_index += 1
            stats.refs += 1
            boundary = period is not None and self.ref_index % period == 0
            for b, slot in enumerate(self.banks):
                slot.bank.refresh_group()
                for row in slot.policy.on_ref():
                    stats.ref_mitigations += 1
                    self._mitigate(b, row, "ref")
                if boundary:
                    if slot.inflight is not None:
                        stats.proactive_mitigations += 1
                        self._mitigate(b, slot.inflight, "proactive")
                    row = slot.policy.on_mitigation_slot()
                    if row is not None:
                        if slot.policy.gradual:
                            slot.inflight = row
                            self.events.append(("latch", b, row))
                        else:
                            stats.proactive_mitigations += 1
                            self._mitigate(b, row, "proactive")
                if slot.policy.alert_pending:
                    self.pending_alert_banks.add(b)
        self.events.append(("refresh", -1, count))

    def _service_ref(self, demanded: bool) -> bool:
        """Issue (or postpone) a REF if the next ACT would cross its due time."""
        t = self.t
        if self.clock + t.tRC <= self.next_ref_due:
            return False
        if (
            self.postpone is PostponeMode.POSTPONE2
            and demanded
            and self.postponed < MAX_POSTPONED
        ):
            self.postponed += 1
            self.stats.max_postponed = max(self.stats.max_postponed, self.postponed)
            self.next_ref_due += t.tREFI
            return True
        if self.clock < self.next_ref_due:
            self.clock = self.next_ref_due
        batch = self.postponed + 1
        self.postponed = 0
        self.next_ref_due += t.tREFI
        self._refresh(batch)
        return True

    def _assert_alert(self) -> None:
        self.stats.alerts += 1
        self.alert_times.append(self.clock)
        self._series_add(self.clock, 0, 1)
        self.events.append(("alert", -1, self.clock))
        for slot in self.banks:
            slot.policy.on_alert()
        if self.ideal_alert:
            self.window_end = self.clock
            self._run_rfms()
        else:
            self.abo_state = AboState.WINDOW
            self.window_end = self.clock + self.t.tAboWindow

    def _run_rfms(self) -> None:
        t = self.t
        level = self.level
        start = max(self.clock, self.window_end)
        self.clock = start + t.tRFM * level
        stall = t.tRFM * level
        self.stats.stall_ns += stall
        self.stats.rfms += level
        self._series_add(start, 2, stall)
        for b, slot in enumerate(self.banks):
            for row in slot.policy.on_rfm(level):
                self.stats.reactive_mitigations += 1
                if slot.inflight == row:
                    slot.inflight = None
                self._mitigate(b, row, "rfm")
        self.abo_state = AboState.NORMAL
        self.gate_remaining = 0 if self.ideal_alert else level
        self.pending_alert_banks = {
            b for b, slot in enumerate(self.banks) if slot.policy.alert_pending
        }
        if self.ideal_alert and self.pending_alert_banks:
            self._assert_alert()

    def _maybe_alert(self) -> None:
        if (
            self.pending_alert_banks
            and self.abo_state is AboState.NORMAL
            and self.gate_remaining == 0
        ):
            self._assert_alert()

    def _settle(self, demanded: bool) -> None:
        """Run every event due before the next ACT slot can start."""
        t = self.t
        while True:
            if self.abo_state is AboState.WINDOW and self.clock + t.tRC > self.window_end:
                start = max(self.clock, self.window_end)
                if self.next_ref_due <= start and self._service_ref(demanded):
                    continue
                self._run_rfms()
                self._maybe_alert()
                continue
            if self._service_ref(demanded):
                self._maybe_alert()
                continue
            return

    # -- public -------------------------------------------------------------

    def step(self, demands: dict[int, int] | None) -> list[tuple[int, int, int]]:
        """Advance one ACT slot, issuing the demanded activations.

        ``demands`` maps bank index to row. Returns ``(bank, row, count)`` for
        every ACT issued in the slot.
        """
        self.events = []
        self._settle(bool(demands))
        t = self.t
        issued = []
        if demands:
            now = self.clock
            raised = False
            banks = self.banks
            trace = self.trace
            for b, row in demands.items():
                if row is None:
                    continue
                slot = banks[b]
                count = slot.bank.activate(row)
                if slot.policy.on_act(row, count) is RAISE_ALERT:
                    self.pending_alert_banks.add(b)
                    raised = True
                issued.append((b, row, count))
                if trace is not None:
                    trace.append((now, b, row))
            n = len(issued)
            if n:
                self.banks_used.update(b for b, _, _ in issued)
                self.stats.acts += n
                self._series_add(now, 1, n)
                if self.gate_remaining:
                    self.gate_remaining = max(0, self.gate_remaining - n)
        self.clock += t.tRC
        if self.pending_alert_banks:
            self._maybe_alert()
        return issued

    def finish(self) -> None:
        """Complete an ALERT that is still open."""
        if self.abo_state is AboState.WINDOW:
            self._run_rfms()

    def throughput(self) -> float:
        """ACTs issued relative to an ALERT-free channel over the same elapsed time."""
        banks = max(1, len(self.banks_used))
        baseline = banks * acts_per_trefi(self.t) * self.clock / self.t.tREFI
        return self.stats.acts / baseline if baseline else 0.0

    def max_unmitigated(self) -> list[tuple[int, int]]:
        return [slot.bank.max_unmitigated_acts() for slot in self.banks]

    def series_rows(self) -> list[tuple[int, int, int, int]]:
        if not self.series:
            return []
        return [(i, *self.series[i]) for i in sorted(self.series)]

    def series_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# pracsim alert-rate series v{SCHEMA_VERSION}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["trefi_index", "alerts", "acts", "stall_ns"])
        w.writerows(self.series_rows())
        return buf.getvalue()

    def trace_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# pracsim command trace v{SCHEMA_VERSION}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["clock_ns", "bank", "row"])
        w.writerows(self.trace or [])
        return buf.getvalue()

    def run(self, adversary, horizon: int, t_rh: int | None = None) -> SimReport:
        """Drive ``adversary`` until it is done or ``horizon`` ns have elapsed."""
        adversary.start(self)
        while self.clock < horizon and not adversary.done:
            self.step(adversary.next_demand(self))
        self.finish()
        return self.report(adversary, t_rh)

    def report(self, adversary=None, t_rh: int | None = None) -> SimReport:
        per_bank = self.max_unmitigated()
        attack_bank = max(range(len(per_bank)), key=lambda b: (per_bank[b][1], -b))
        attack_row, max_acts = per_bank[attack_bank]
        s = self.stats
        return SimReport(
            schemaVersion=SCHEMA_VERSION,
            policy=self.policy_name,
            adversary=getattr(adversary, "name", "none"),
            level=self.level,
            banks=len(self.banks),
            elapsed_ns=self.clock,
            acts=s.acts,
            alerts=s.alerts,
            rfms=s.rfms,
            refs=s.refs,
            stall_ns=s.stall_ns,
            proactive_mitigations=s.proactive_mitigations,
            reactive_mitigations=s.reactive_mitigations,
            ref_mitigations=s.ref_mitigations,
            throughput=round(self.throughput(), 6),
            max_unmitigated=[list(x) for x in per_bank],
            attack_bank=attack_bank,
            attack_row=attack_row,
            max_acts=max_acts,
            t_rh=t_rh,
            attack_success=None if t_rh is None else max_acts > t_rh,
            extra=dict(getattr(adversary, "extra", {}) or {}),
        )
