"""One DRAM bank: PRAC counters, the refresh engine and the damage ledger.

The ledger is the ground truth used to decide whether an attack succeeded.
Policies and adversaries never look at it.
"""

from __future__ import annotations

import enum

COUNTER_MAX = (1 << 24) - 1
BLAST_RADIUS = 2


class ResetMode(str, enum.Enum):
    SAFE = "safe"
    UNSAFE = "unsafe"
    NONE = "none"


class DamageLedger:
    """Per-row activations since the row's victims were last refreshed.

    Refresh sweeps the bank group by group, so a row is cleared by the REF
    that covers the last of its victims: the REF of group g clears rows
    ``[g*G - radius, g*G + G - radius)``. Mitigating a row clears that row.
    ``peak`` keeps the largest value each row ever reached, which is what
    attack success is judged on.
    """

    def __init__(self, rows: int, blast_radius: int = BLAST_RADIUS):
        if rows <= 0:
            raise ValueError("rows must be positive")
        self.rows = rows
        self.blast_radius = blast_radius
        self.acts = [0] * rows
        self.peak: dict[int, int] = {}

    def record_act(self, row: int) -> int:
        acts = self.acts
        value = acts[row] + 1
        acts[row] = value
        peak = self.peak
        if value > peak.get(row, 0):
            peak[row] = value
        return value

    def sweep(self, first: int, stop: int) -> None:
        """Clear rows whose victims the refresh pointer has now fully covered."""
        first = max(0, first)
        stop = min(self.rows, stop)
        if stop > first:
            self.acts[first:stop] = [0] * (stop - first)

    def mitigate(self, aggressor: int) -> list[int]:
        self.acts[aggressor] = 0
        r = self.blast_radius
        return [v for v in range(aggressor - r, aggressor + r + 1)
                if v != aggressor and 0 <= v < self.rows]

    def max_unmitigated_acts(self) -> tuple[int, int]:
        """Row with the highest peak count and that count (lowest row on ties)."""
        best_row, best = 0, 0
        for row, value in self.peak.items():
            if value > best or (value == best and row < best_row):
                best_row, best = row, value
        return best_row, best

    def current(self, row: int) -> int:
        return self.acts[row]


class BankState:
    """PRAC counter array plus the contiguous-group refresh engine."""

    def __init__(
        self,
        rows: int = 65536,
        rows_per_group: int = 8,
        reset_mode: ResetMode | str = ResetMode.NONE,
        blast_radius: int = BLAST_RADIUS,
    ):
        if rows <= 0 or rows_per_group <= 0 or rows % rows_per_group:
            raise ValueError(f"rows ({rows}) must be a positive multiple of rows_per_group ({rows_per_group})")
        self.rows = rows
        self.rows_per_group = rows_per_group
        self.n_groups = rows // rows_per_group
        self.reset_mode = ResetMode(reset_mode)
        self.counters = [0] * rows
        # Safe mode keeps the last two rows of the latest refreshed group here
        self.shadow: dict[int, int] = {}
        self.refresh_pointer = 0
        self.ledger = DamageLedger(rows, blast_radius)
        self._zeros = [0] * rows_per_group

    def _check_row(self, row: int) -> None:
        if not 0 <= row < self.rows:
            raise IndexError(f"row {row} outside bank of {self.rows} rows")

    def effective(self, row: int) -> int:
        """Counter value the tracker sees for ``row`` (shadow replica if present)."""
        shadow = self.shadow
        if row in shadow:
            return shadow[row]
        return self.counters[row]

    def activate(self, row: int) -> int:
        """Count one activation; returns the post-increment effective counter."""
        if not 0 <= row < self.rows:
            self._check_row(row)
        self.ledger.record_act(row)
        shadow = self.shadow
        if row in shadow:
            value = shadow[row]
            if value < COUNTER_MAX:
                value += 1
                shadow[row] = value
            return value
        counters = self.counters
        value = counters[row]
        if value < COUNTER_MAX:
            value += 1
            counters[row] = value
        return value

    def group_rows(self, group: int) -> range:
        start = group * self.rows_per_group
        return range(start, start + self.rows_per_group)

    def refresh_group(self) -> int:
        """Refresh the group under the pointer, apply the counter-reset mode, advance."""
        group = self.refresh_pointer
        rows = self.group_rows(group)
        start, stop = rows.start, rows.stop
        mode = self.reset_mode
        if mode is ResetMode.SAFE:
            # previous shadow rows are now safe: their neighbours in this group get refreshed
            self.shadow = {r: self.counters[r] for r in rows[-2:]}
            self.counters[start:stop] = self._zeros
        elif mode is ResetMode.UNSAFE:
            self.counters[start:stop] = self._zeros
        radius = self.ledger.blast_radius
        # the bank's last rows have no victims past the edge
        self.ledger.sweep(start - radius, stop if stop == self.rows else stop - radius)
        self.refresh_pointer = (group + 1) % self.n_groups
        return group

    def reset_counter(self, row: int) -> None:
        if row in self.shadow:
            self.shadow[row] = 0
        self.counters[row] = 0

    def victim_refresh(self, aggressor: int, reset_counter: bool = True) -> list[int]:
        """Refresh the aggressor's neighbours; optionally zero its counter.

        Panopticon keeps free-running counters, so it passes ``reset_counter=False``.
        """
        self._check_row(aggressor)
        victims = self.ledger.mitigate(aggressor)
        if reset_counter:
            self.reset_counter(aggressor)
        return victims

    def max_unmitigated_acts(self) -> tuple[int, int]:
        return self.ledger.max_unmitigated_acts()

    def snapshot(self) -> dict:
        """Debug view: nonzero counters, shadow replicas and ledger state."""
        return {
            "refresh_pointer": self.refresh_pointer,
            "reset_mode": self.reset_mode.value,
            "counters": {str(r): c for r, c in enumerate(self.counters) if c},
            "shadow": {str(r): c for r, c in self.shadow.items()},
            "ledger": {str(r): c for r, c in enumerate(self.ledger.acts) if c},
            "ledger_peak": {str(r): c for r, c in sorted(self.ledger.peak.items())},
        }
