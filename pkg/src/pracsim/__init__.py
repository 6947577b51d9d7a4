"""Command-level simulator of a DDR5 sub-channel with PRAC counters and ALERT-Back-Off."""

from .bank import BankState, DamageLedger, ResetMode
from .config import ConfigError, ExperimentConfig
from .controller import PostponeMode, SimReport, SubChannel
from .policies import IdealTracker, Moat, NoMitigation, Panopticon
from .timing import DEFAULT_TIMINGS, Timings

__all__ = [
    "BankState", "DamageLedger", "ResetMode", "ConfigError", "ExperimentConfig",
    "PostponeMode", "SimReport", "SubChannel", "IdealTracker", "Moat", "NoMitigation",
    "Panopticon", "DEFAULT_TIMINGS", "Timings",
]
__version__ = "0.1.0"
