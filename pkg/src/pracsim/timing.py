"""DDR5 timing constants (PRAC-revised) and the quantities derived from them.

All times are integer nanoseconds.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict

ABO_LEVELS = (1, 2, 4)

# Activations that fit inside the post-ALERT normal-operation window.
BEFORE_RFM_ACTS = 3


@dataclass(frozen=True)
class Timings:
    tRC: int = 52
    tREFI: int = 3900
    tRFC: int = 410
    tREFW: int = 32_000_000
    tAboWindow: int = 180
    tRFM: int = 350
    refGroups: int = 8192
    # documentation only; the simulator works at tRC granularity
    tRAS: int = 16
    tPRE: int = 36

    def __post_init__(self):
        for name in ("tRC", "tREFI", "tRFC", "tREFW", "tAboWindow", "tRFM", "refGroups"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool):
                raise TypeError(f"{name} must be an integer number of ns, got {value!r}")
            if value <= 0:
                raise ValueError(f"{name} must be positive, got {value}")
        if self.tRFC >= self.tREFI:
            raise ValueError(f"tRFC ({self.tRFC}) must be below tREFI ({self.tREFI})")
        # 3900 * 8192 falls 51.2us short of 32ms, so equality cannot be required
        if self.tREFI * self.refGroups > self.tREFW:
            raise ValueError(
                f"tREFI * refGroups ({self.tREFI * self.refGroups}) exceeds tREFW ({self.tREFW})"
            )

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "Timings":
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise KeyError(f"unknown timing key(s): {', '.join(sorted(unknown))}")
        return cls(**data)


DEFAULT_TIMINGS = Timings()


def check_level(level: int) -> int:
    """Validate an ABO mitigation level (MR71 op[1:0])."""
    if level not in ABO_LEVELS:
        raise ValueError(f"ABO level must be one of {ABO_LEVELS}, got {level!r}")
    return level


def acts_per_trefi(t: Timings = DEFAULT_TIMINGS) -> int:
    """Maximum activations one bank can issue between two REF commands."""
    return (t.tREFI - t.tRFC) // t.tRC


def inter_alert_acts(level: int) -> int:
    """Minimum activations between consecutive ALERTs (M = 3 + L)."""
    return BEFORE_RFM_ACTS + check_level(level)


def ta2a(t: Timings, level: int) -> int:
    """Minimum ALERT-to-ALERT time: the ABO window, then L RFMs each followed by one ACT."""
    return t.tAboWindow + (t.tRFM + t.tRC) * check_level(level)


def alert_duration(t: Timings, level: int) -> int:
    """Time from ALERT assertion until the last RFM completes."""
    return t.tAboWindow + t.tRFM * check_level(level)


def attack_window(t: Timings = DEFAULT_TIMINGS) -> int:
    """Time inside one refresh window that is not spent executing REF."""
    return t.tREFW - t.refGroups * t.tRFC


def window_acts(t: Timings = DEFAULT_TIMINGS) -> int:
    """How many whole activations fit inside the post-ALERT window."""
    return t.tAboWindow // t.tRC
