"""Attack-pattern generators.

An adversary is asked for one set of demands per ACT slot::

    adv.start(sc)                 # once, before the first slot
    adv.next_demand(sc) -> {bank: row} or None

It may look at anything the defense algorithm would let it reconstruct:
the refresh schedule, the event list of the previous slot, PRAC counters and
tracker registers (deterministic functions of its own activity). Reading the
counter array stands in for mirroring it. The damage ledger is never read.
Randomized Panopticon's initial counters are secret, so the randomized
Jailbreak only peeks at them in its explicit forced-success test mode.
"""

from __future__ import annotations

import math
from collections import deque

import numpy as np

from .controller import MAX_POSTPONED, AboState, PostponeMode
from .timing import BEFORE_RFM_ACTS, acts_per_trefi

MITIGATION_EVENTS = ("ref", "proactive", "rfm")


def mitigated_rows(sc, bank: int | None = None):
    """(bank, row) pairs whose victim refresh completed in the previous slot."""
    for kind, b, row in sc.events:
        if kind in MITIGATION_EVENTS and (bank is None or b == bank):
            yield b, row


def refreshed(sc) -> bool:
    return any(kind == "refresh" for kind, _, _ in sc.events)


class Adversary:
    name = "adversary"

    def __init__(self):
        self.done = False
        self.extra: dict = {}

    def start(self, sc) -> None:
        pass

    def next_demand(self, sc) -> dict[int, int] | None:
        return None


class Idle(Adversary):
    """Issues nothing; the channel only refreshes."""

    name = "idle"


# -- performance kernels ----------------------------------------------------


class SingleRowKernel(Adversary):
    """Every bank in ``banks`` activates the same row back to back."""

    name = "single_row"

    def __init__(self, row: int = 1000, banks: int = 1):
        super().__init__()
        self.demand = {b: row for b in range(banks)}

    def next_demand(self, sc):
        return self.demand


class MultiRowKernel(Adversary):
    """Every bank cycles through ``rows`` rows (A, B, C, ...) in order."""

    name = "multi_row"

    def __init__(self, rows: int = 5, base_row: int = 1000, spacing: int = 8, banks: int = 1):
        super().__init__()
        self.rows = [base_row + i * spacing for i in range(rows)]
        self.banks = banks
        self.i = 0

    def next_demand(self, sc):
        row = self.rows[self.i % len(self.rows)]
        self.i += 1
        return {b: row for b in range(self.banks)}


class Tsa(Adversary):
    """Torrent of staggered ALERTs over ``banks`` banks.

    Each bank primes its rows (A..E) to ATH, then waits for its turn. The
    bank holding the turn pushes each row past ATH, one ALERT per row; once
    all of its rows have been mitigated the turn passes on and the bank
    starts priming again. Banks whose rows sit at ATH have nothing above ATH,
    so every ALERT of the firing bank mitigates only that bank's row.
    """

    name = "tsa"

    def __init__(self, banks: int = 4, ath: int = 64, rows: int = 5, base_row: int = 1000,
                 spacing: int = 8):
        super().__init__()
        if banks <= 0 or rows <= 0:
            raise ValueError("banks and rows must be positive")
        self.n_banks = banks
        self.ath = ath
        self.rows = [base_row + i * spacing for i in range(rows)]
        self.turn = 0
        self.priming = [True] * banks
        self.fired: list[set[int]] = [set() for _ in range(banks)]
        self.cursor = [0] * banks

    def start(self, sc):
        if sc.banks and len(sc.banks) < self.n_banks:
            raise ValueError(f"TSA over {self.n_banks} banks needs at least that many banks")

    def _prime_row(self, sc, b: int) -> int | None:
        bank = sc.banks[b].bank
        rows = self.rows
        for k in range(len(rows)):
            row = rows[(self.cursor[b] + k) % len(rows)]
            if bank.effective(row) < self.ath:
                self.cursor[b] = (self.cursor[b] + k + 1) % len(rows)
                return row
        return None

    def next_demand(self, sc):
        for b, row in mitigated_rows(sc):
            if b < self.n_banks and row in self.rows and not self.priming[b]:
                self.fired[b].add(row)
        demands = {}
        for b in range(self.n_banks):
            if self.priming[b]:
                row = self._prime_row(sc, b)
                if row is not None:
                    demands[b] = row
                else:
                    self.priming[b] = False
            if not self.priming[b] and b == self.turn:
                pending = [r for r in self.rows if r not in self.fired[b]]
                if not pending:
                    self.fired[b] = set()
                    self.priming[b] = True
                    self.turn = (self.turn + 1) % self.n_banks
                    row = self._prime_row(sc, b)
                    if row is not None:
                        demands[b] = row
                    continue
                # cycle over the rows still waiting for their ALERT
                row = pending[self.cursor[b] % len(pending)]
                self.cursor[b] += 1
                demands[b] = row
        return demands


# -- Panopticon attacks -----------------------------------------------------


class Jailbreak(Adversary):
    """Fill the queue with ``capacity`` rows, then hammer the youngest entry.

    Phase 1 activates rows A..H circularly. All but the last round run as
    fast as possible; the last round is held back to the tREFI just before a
    mitigation boundary so that every row enqueues in that tREFI, H last.
    Phase 2 activates H ``per_trefi`` times per tREFI (one queue insertion per
    mitigation period, so the queue never overflows) until H is mitigated.
    """

    name = "jailbreak"

    def __init__(self, threshold: int = 128, capacity: int = 8, per_trefi: int = 32,
                 bank: int = 0, base_row: int = 20000, spacing: int = 8):
        super().__init__()
        self.threshold = threshold
        self.per_trefi = per_trefi
        self.bank = bank
        self.rows = [base_row + i * spacing for i in range(capacity)]
        self.target = self.rows[-1]
        self.phase = 1
        self.i = 0
        self.acts_this_trefi = 0

    def start(self, sc):
        self.period = sc.mitigation_period or 1

    def next_demand(self, sc):
        if refreshed(sc):
            self.acts_this_trefi = 0
        if self.phase == 2:
            if any(row == self.target for _, row in mitigated_rows(sc, self.bank)):
                self.done = True
                return None
            if self.acts_this_trefi >= self.per_trefi:
                return None
            self.acts_this_trefi += 1
            return {self.bank: self.target}
        rows = self.rows
        n = len(rows)
        last_round = (self.threshold - 1) * n
        if self.i == last_round:
            # wait for the tREFI whose closing REF is a mitigation boundary
            if sc.ref_index % self.period != self.period - 1 or sc.slots_until_ref() < n:
                return None
        row = rows[self.i % n]
        self.i += 1
        if self.i == self.threshold * n:
            self.phase = 2
            self.acts_this_trefi = self.per_trefi  # H starts after the boundary REF
        return {self.bank: row}


def phase1_enqueues(inits: np.ndarray, acts: int = 32, threshold: int = 128) -> np.ndarray:
    """Whether ``acts`` activations on a row starting at ``inits`` toggle the queueing bit."""
    inits = np.asarray(inits)
    return (inits + acts) // threshold > inits // threshold


def heavy_band_probability(band: tuple[int, int] = (192, 255), decoys: int = 8,
                           init_high: int = 255) -> float:
    """Chance that all decoys are drawn from the heavy-weight band."""
    lo, hi = band
    return ((hi - lo + 1) / (init_high + 1)) ** decoys


def randomized_jailbreak_monte_carlo(iterations: int, rng: np.random.Generator,
                                     decoys: int = 8, acts: int = 32, threshold: int = 128,
                                     init_high: int = 255, chunk: int = 1 << 20) -> dict:
    """Phase-1 success rate over many iterations, each with fresh random counters.

    An iteration succeeds when every decoy toggles the queueing bit within its
    ``acts`` activations, i.e. all decoys land in the queue.
    """
    successes = 0
    left = iterations
    while left:
        n = min(chunk, left)
        inits = rng.integers(0, init_high + 1, size=(n, decoys))
        successes += int(phase1_enqueues(inits, acts, threshold).all(axis=1).sum())
        left -= n
    p = successes / iterations
    return {"iterations": iterations, "successes": successes, "estimate": p}


class RandomizedJailbreak(Adversary):
    """One iteration of the probabilistic attack on randomized Panopticon.

    Phase 1 activates 8 random rows 32 times each, circularly; the attack works
    only if all of them happen to enqueue. Phase 2 activates a fresh random
    row X at ``per_trefi`` ACTs per tREFI for ``attack_acts`` activations.

    ``forced`` is a test hook: decoys are picked among rows whose (secret)
    initial counter guarantees an enqueue, which conditions on success.
    ``phase_jitter`` delays the start by a random time within that many
    tREFI, since successive iterations land at arbitrary points of the
    mitigation cycle.
    """

    name = "randomized_jailbreak"

    def __init__(self, rng: np.random.Generator, decoys: int = 8, decoy_acts: int = 32,
                 attack_acts: int = 1152, per_trefi: int = 32, threshold: int = 128,
                 bank: int = 0, forced: bool = False, row_space: tuple[int, int] = (16384, 65536),
                 phase_jitter: int | None = 4):
        super().__init__()
        self.rng = rng
        self.phase_jitter = phase_jitter
        self.n_decoys = decoys
        self.decoy_acts = decoy_acts
        self.attack_acts = attack_acts
        self.per_trefi = per_trefi
        self.threshold = threshold
        self.bank = bank
        self.forced = forced
        self.row_space = row_space
        self.schedule: list[int] = []
        self.i = 0
        self.acts_this_trefi = 0

    def _pick(self, sc, count: int, exclude: set[int], want_enqueue: bool) -> list[int]:
        lo, hi = self.row_space
        picked: list[int] = []
        counters = sc.banks[self.bank].bank.counters
        while len(picked) < count:
            row = int(self.rng.integers(lo, hi))
            if row in exclude or row in picked:
                continue
            if want_enqueue and not phase1_enqueues(counters[row], self.decoy_acts, self.threshold):
                continue
            picked.append(row)
        return picked

    def start(self, sc):
        self.decoys = self._pick(sc, self.n_decoys, set(), self.forced)
        self.target = self._pick(sc, 1, set(self.decoys), False)[0]
        self.schedule = self.decoys * self.decoy_acts
        # back-to-back iterations start anywhere in the mitigation cycle
        self.begin = 0
        if self.phase_jitter:
            self.begin = int(self.rng.integers(0, self.phase_jitter * sc.t.tREFI))
        self.extra = {"decoys": self.decoys, "target": self.target, "forced": self.forced,
                      "begin_ns": self.begin}

    def next_demand(self, sc):
        if sc.clock < self.begin:
            return None
        if refreshed(sc):
            self.acts_this_trefi = 0
        if self.i < len(self.schedule):
            row = self.schedule[self.i]
            self.i += 1
            return {self.bank: row}
        done_attack = self.i - len(self.schedule)
        if done_attack >= self.attack_acts:
            self.done = True
            return None
        if self.acts_this_trefi >= self.per_trefi:
            return None
        self.acts_this_trefi += 1
        self.i += 1
        return {self.bank: self.target}


class RefreshPostponementAttack(Adversary):
    """Break drain-all Panopticon by enqueueing right after a REF batch.

    The row is brought to ``threshold - 1``. Filler rows (kept far below the
    threshold) then keep the channel busy, so the controller postpones REFs
    until it is forced to issue a batch; the ACT that follows the batch
    enqueues the row, and hammering it makes the controller postpone as many
    REFs as it may before the next batch drains the queue.
    """

    name = "refresh_postponement"

    def __init__(self, threshold: int = 128, row: int = 30000, bank: int = 0,
                 filler_base: int = 40000, fillers: int = 64):
        super().__init__()
        self.threshold = threshold
        self.row = row
        self.bank = bank
        self.fillers = [filler_base + 8 * i for i in range(fillers)]
        self.f = 0
        self.primed = 0
        self.armed = False

    def _batch_next(self, sc) -> bool:
        """Will the next slot start with a REF batch even though we keep demanding?"""
        if sc.clock + sc.t.tRC <= sc.next_ref_due:
            return False
        return sc.postpone is PostponeMode.STRICT or sc.postponed >= MAX_POSTPONED

    def next_demand(self, sc):
        if self.armed:
            if any(row == self.row for _, row in mitigated_rows(sc, self.bank)):
                self.done = True
                return None
            return {self.bank: self.row}
        if self.primed < self.threshold - 1:
            self.primed += 1
            return {self.bank: self.row}
        if self._batch_next(sc):
            self.armed = True
            return {self.bank: self.row}
        row = self.fillers[self.f % len(self.fillers)]
        self.f += 1
        return {self.bank: row}


# -- feinting and Ratchet -----------------------------------------------------


class ResetStraddle(Adversary):
    """Hammer a row on both sides of the REF that resets its counter.

    The row is the last of group ``group``, so its victims belong to the next
    group. ``acts`` activations land just before the group's REF and ``acts``
    more before the next group's REF. An unsafe reset forgets the first burst
    while the victims are still unrefreshed.
    """

    name = "reset_straddle"

    def __init__(self, acts: int = 60, group: int = 4, bank: int = 0):
        super().__init__()
        if acts <= 0:
            raise ValueError("acts must be positive")
        self.acts = acts
        self.group = group
        self.bank = bank
        self.burst = 0
        self.left = 0

    def start(self, sc):
        bank = sc.banks[self.bank].bank
        if self.acts > acts_per_trefi(sc.t):
            raise ValueError("a burst must fit between two REFs")
        self.bankstate = bank
        self.row = (self.group + 1) * bank.rows_per_group - 1
        self.extra = {"row": self.row, "acts": self.acts}

    def next_demand(self, sc):
        bank = self.bankstate
        if self.left == 0:
            if self.burst == 2:
                self.done = True
                return None
            # each burst opens right after the REF preceding the target group
            if bank.refresh_pointer != self.group + self.burst or sc.slots_until_ref() < self.acts:
                return None
            self.burst += 1
            self.left = self.acts
        self.left -= 1
        return {self.bank: self.row}


class Feinting(Adversary):
    """Keep a pool of rows at equal counts so each mitigation is spent on a decoy.

    ACTs rotate over the surviving rows; a mitigated row is dropped from the
    rotation. The tracker breaks ties toward the lowest row, so the survivor
    is the highest-numbered row, placed in the last refresh group (its
    victims are not refreshed until the end of the window). It is also last
    in the rotation, so it never leads the pool.
    """

    name = "feinting"

    def __init__(self, pool: int, bank: int = 0):
        super().__init__()
        if pool <= 0:
            raise ValueError("pool must be positive")
        self.pool = pool
        self.bank = bank

    def start(self, sc):
        rows = sc.banks[self.bank].bank.rows
        if self.pool > rows:
            raise ValueError(f"pool of {self.pool} rows does not fit in {rows} rows")
        self.survivor = rows - 1
        self.alive = deque(list(range(self.pool - 1)) + [self.survivor])
        self.dead: set[int] = set()
        self.extra = {"pool": self.pool, "survivor": self.survivor}

    def next_demand(self, sc):
        for _, row in mitigated_rows(sc, self.bank):
            self.dead.add(row)
        alive = self.alive
        while alive:
            row = alive.popleft()
            if row in self.dead:
                continue
            alive.append(row)
            return {self.bank: row}
        self.done = True
        return None


class _Buckets:
    """Rows grouped by count, for quick lowest/highest lookups."""

    def __init__(self):
        self.by_count: dict[int, dict[int, None]] = {}
        self.count: dict[int, int] = {}

    def __len__(self):
        return len(self.count)

    def add(self, row: int, count: int) -> None:
        self.count[row] = count
        self.by_count.setdefault(count, {})[row] = None

    def remove(self, row: int) -> None:
        count = self.count.pop(row, None)
        if count is None:
            return
        bucket = self.by_count[count]
        del bucket[row]
        if not bucket:
            del self.by_count[count]

    def bump(self, row: int) -> None:
        count = self.count[row]
        self.remove(row)
        self.add(row, count + 1)

    def lowest(self, skip) -> int | None:
        for count in sorted(self.by_count):
            for row in self.by_count[count]:
                if row not in skip:
                    return row
        return None

    def highest(self, skip) -> int | None:
        for count in sorted(self.by_count, reverse=True):
            for row in self.by_count[count]:
                if row not in skip:
                    return row
        return None


class Ratchet(Adversary):
    """Prime a pool of rows to ATH, then ratchet them up with inter-ALERT ACTs.

    Phase 1 primes ``pool`` rows to exactly ATH, taking rows group by group
    just behind the refresh pointer so no counter reset or refresh sweep
    touches them later in the window. Rows caught by proactive mitigation
    meanwhile are lost.

    Phase 2 spreads ACTs over the surviving pool. With ``round_robin`` the
    rows are cycled in order, which is the plain attack. With ``greedy`` the
    adversary mirrors the tracker: while the CTA has room the lowest pool row
    is activated so it becomes the next victim; otherwise the lowest pool row
    is raised as long as it stays at or below the smallest tracked count (a
    strictly larger count would displace the victim). When nothing qualifies
    the tracked row itself is activated, and rows already committed to an
    ALERT soak up whatever ACTs remain. Every ACT on a pool row is above ATH,
    so ALERTs follow back to back as the pool shrinks. The whole attack can
    outlast one refresh window measured from the start of the run; rows whose
    group is refreshed again simply leave the pool.
    """

    name = "ratchet"

    SPREADS = ("round_robin", "greedy")

    def __init__(self, pool: int, ath: int = 64, bank: int = 0, first_group: int = 0,
                 spread: str = "round_robin"):
        super().__init__()
        if pool <= 0:
            raise ValueError("pool must be positive")
        if spread not in self.SPREADS:
            raise ValueError(f"spread must be one of {self.SPREADS}")
        self.spread = spread
        self.pool = pool
        self.ath = ath
        self.bank = bank
        self.next_row = 8 * first_group
        self.current: int | None = None
        self.attempted = 0
        self.primed: list[int] = []
        self.phase = 1
        self.phase2_start: dict | None = None

    def start(self, sc):
        slot = sc.banks[self.bank]
        self.bankstate = slot.bank
        self.policy = slot.policy
        g = self.bankstate.rows_per_group
        self.next_row = self.next_row // 8 * g

    def _prime(self, sc):
        bank = self.bankstate
        if self.current is not None and bank.effective(self.current) >= self.ath:
            self.primed.append(self.current)
            self.current = None
        if self.current is None:
            if self.attempted == self.pool:
                return None
            group = self.next_row // bank.rows_per_group
            # the group and its successor must already be refreshed (shadowed rows)
            if bank.refresh_pointer < group + 2:
                return None
            self.current = self.next_row
            self.next_row += 1
            self.attempted += 1
        return {self.bank: self.current}

    def _enter_phase2(self, sc):
        bank = self.bankstate
        self.live = _Buckets()
        cma = getattr(self.policy, "cma", None)
        for row in self.primed:
            c = bank.effective(row)
            if c >= self.ath and row != cma:
                self.live.add(row, c)
        self.by_group: dict[int, list[int]] = {}
        for row in self.live.count:
            self.by_group.setdefault(row // bank.rows_per_group, []).append(row)
        self.pointer = bank.refresh_pointer
        self.order = deque(self.live.count)
        self.phase = 2
        self.phase2_start = {"clock": sc.clock, "acts": sc.stats.acts, "alerts": sc.stats.alerts}
        self.extra = {"pool": self.pool, "primed": len(self.primed), "live": len(self.live)}

    def next_demand(self, sc):
        if self.phase == 1:
            demand = self._prime(sc)
            if demand is not None or self.attempted < self.pool:
                return demand
            self._enter_phase2(sc)
        live = self.live
        for _, row in mitigated_rows(sc, self.bank):
            live.remove(row)
        # a group refreshed a second time resets its counters; those rows drop out
        bank = self.bankstate
        while self.pointer != bank.refresh_pointer:
            for row in self.by_group.pop(self.pointer, ()):
                live.remove(row)
            self.pointer = (self.pointer + 1) % bank.n_groups
        if not len(live):
            self.done = True
            return None
        policy = self.policy
        committed = set(policy.reactive)
        if policy.cma is not None:
            committed.add(policy.cma)
        if (sc.abo_state is AboState.NORMAL and not sc.pending_alert_banks
                and not sc.gate_remaining and sc.slots_until_ref() <= BEFORE_RFM_ACTS):
            # the next ACT would raise an ALERT whose window a REF would eat
            return None
        if self.spread == "round_robin":
            order = self.order
            while order[0] not in live.count:
                order.popleft()
            row = order[0]
            order.rotate(-1)
            live.bump(row)
            return {self.bank: row}
        cta = policy.cta
        skip = committed | set(cta)
        row = None
        if len(cta) < policy.entries:
            row = live.lowest(skip)
        else:
            floor = min(cta.values())
            low = live.lowest(skip)
            if low is not None and live.count[low] + 1 <= floor:
                row = low
            else:
                tracked = [r for r in cta if r in live.count]
                if tracked:
                    row = min(tracked, key=cta.__getitem__)
        if row is None:
            pending = [r for r in committed if r in live.count]
            row = max(pending, key=live.count.__getitem__) if pending else live.highest(set())
        live.bump(row)
        return {self.bank: row}


# -- property-test drivers --------------------------------------------------

FUZZ_PROFILES = {
    # segment weights: hammer, rotate, edge, idle
    "zero": None,
    "mild": (0.2, 0.4, 0.1, 0.3),
    "aggressive": (0.35, 0.25, 0.35, 0.05),
}
SEGMENTS = ("hammer", "rotate", "edge", "idle")


class Fuzz(Adversary):
    """Seeded random mixture of attack fragments, for safety property runs.

    Each segment is one of: hammering a single hot row, rotating over a few
    decoys, probing ALERT edges (pouring inter-ALERT ACTs onto the hottest
    row), or idling. Hot rows are drawn from a small neighbourhood so blast
    radii overlap. The ``zero`` profile only touches random rows a handful of
    times each and never reaches a threshold.
    """

    name = "fuzz"

    ZERO_CAP = 16

    def __init__(self, seed: int, profile: str = "aggressive", banks: int = 1,
                 hot_rows: int = 24, region: int = 512):
        super().__init__()
        if profile not in FUZZ_PROFILES:
            raise ValueError(f"unknown fuzz profile {profile!r}; expected one of {sorted(FUZZ_PROFILES)}")
        self.seed = seed
        self.profile = profile
        self.n_banks = banks
        self.hot_rows = hot_rows
        self.region = region
        self.rng = np.random.default_rng(seed)
        self.kind = "idle"
        self.left = 0
        self.extra = {"seed": seed, "profile": profile}

    def start(self, sc):
        rows = sc.banks[0].bank.rows
        self.rows = rows
        base = int(self.rng.integers(0, rows - self.region))
        self.hot = [base + int(r) for r in self.rng.choice(self.region, self.hot_rows, replace=False)]
        self.own: dict[tuple[int, int], int] = {}

    def _new_segment(self):
        rng = self.rng
        self.bank = int(rng.integers(self.n_banks))
        weights = FUZZ_PROFILES[self.profile]
        if weights is None:
            self.kind = "idle" if rng.random() < 0.5 else "scatter"
        else:
            self.kind = SEGMENTS[int(rng.choice(len(SEGMENTS), p=weights))]
        self.left = int(rng.integers(1, 200))
        if self.kind == "hammer":
            self.targets = [self.hot[int(rng.integers(len(self.hot)))]]
        elif self.kind == "rotate":
            k = int(rng.integers(2, 9))
            self.targets = [self.hot[int(i)] for i in rng.choice(len(self.hot), k, replace=False)]
        self.i = 0

    def next_demand(self, sc):
        while self.left <= 0:
            self._new_segment()
        self.left -= 1
        kind = self.kind
        if kind == "idle":
            return None
        if kind == "scatter":
            row = int(self.rng.integers(self.rows))
            key = (self.bank, row)
            if self.own.get(key, 0) >= self.ZERO_CAP:
                return None
            self.own[key] = self.own.get(key, 0) + 1
            return {self.bank: row}
        if kind == "edge":
            bank = sc.banks[self.bank].bank
            quiet = (sc.abo_state is AboState.NORMAL and not sc.pending_alert_banks
                     and not sc.gate_remaining)
            if quiet and self.rng.random() < 0.5:
                row = self.hot[int(self.rng.integers(len(self.hot)))]
            else:
                row = max(self.hot, key=bank.effective)
            return {self.bank: row}
        row = self.targets[self.i % len(self.targets)]
        self.i += 1
        return {self.bank: row}


class BenignWorkload(Adversary):
    """Synthetic benign traffic: a few hot rows over uniform background.

    A fraction ``1 - benign_fraction`` of ACTs goes round-robin to ``hot_rows``
    rows (these accumulate 32+/64+/128+ ACTs per window depending on load);
    the rest lands on uniformly random rows across the banks.
    """

    name = "benign"

    def __init__(self, seed: int, benign_fraction: float = 0.996, hot_rows: int = 1,
                 banks: int = 1, base_row: int = 1000, spacing: int = 8):
        super().__init__()
        if not 0.0 <= benign_fraction <= 1.0:
            raise ValueError("benign_fraction must lie in [0, 1]")
        if hot_rows <= 0:
            raise ValueError("hot_rows must be positive")
        self.benign_fraction = benign_fraction
        self.hot = [base_row + i * spacing for i in range(hot_rows)]
        self.n_banks = banks
        self.rng = np.random.default_rng(seed)
        self.i = 0

    def start(self, sc):
        self.rows = sc.banks[0].bank.rows

    def next_demand(self, sc):
        rng = self.rng
        bank = int(rng.integers(self.n_banks))
        if rng.random() < self.benign_fraction:
            return {bank: int(rng.integers(self.rows))}
        row = self.hot[self.i % len(self.hot)]
        self.i += 1
        return {bank: row}
