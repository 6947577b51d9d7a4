"""Experiment configuration: JSON ingestion, validation and seed splitting.

A config is a JSON object::

    {
      "name": "moat64_ratchet",
      "timings": {"tREFI": 3900},          # overrides of the default timings
      "policy": {"kind": "moat", "ath": 64},
      "adversary": {"kind": "ratchet", "pool": "auto"},
      "level": 1,
      "mitigation_period": 5,              # null: ALERT-only mitigation
      "banks": 1,
      "horizon_ns": 32000000,              # or "horizon_trefi", or "auto"
      "t_rh": 99,
      "seed": 1,
      "repeat": 1,
      "outputs": {"report": "report.json", "series": "series.csv"}
    }

Seeds: the master seed feeds ``numpy.random.SeedSequence``. Component ``c``
of repetition ``r`` draws from ``SeedSequence(seed, spawn_key=(r, c))``, with
c = 0 for the policy (Panopticon's random counter init) and c = 1 for the
adversary. Each stream can therefore be re-seeded on its own.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from . import adversaries as adv
from .analytics import feinting_periods, nc
from .bank import ResetMode
from .controller import PostponeMode, SubChannel, mitigation_rate_config
from .policies import IdealTracker, Moat, NoMitigation, Panopticon
from .timing import DEFAULT_TIMINGS, Timings

COMPONENTS = ("policy", "adversary")


class ConfigError(ValueError):
    """Invalid configuration; ``key`` names the offending entry."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


def component_seed(seed: int, component: str, repeat: int = 0) -> np.random.SeedSequence:
    return np.random.SeedSequence(seed, spawn_key=(repeat, COMPONENTS.index(component)))


def int_seed(ss: np.random.SeedSequence) -> int:
    return int(ss.generate_state(1, np.uint64)[0])


POLICIES = {
    "moat": Moat,
    "panopticon": Panopticon,
    "ideal": IdealTracker,
    "none": NoMitigation,
}

ADVERSARIES = {
    "idle": adv.Idle,
    "single_row": adv.SingleRowKernel,
    "multi_row": adv.MultiRowKernel,
    "tsa": adv.Tsa,
    "jailbreak": adv.Jailbreak,
    "randomized_jailbreak": adv.RandomizedJailbreak,
    "refresh_postponement": adv.RefreshPostponementAttack,
    "reset_straddle": adv.ResetStraddle,
    "feinting": adv.Feinting,
    "ratchet": adv.Ratchet,
    "fuzz": adv.Fuzz,
    "benign": adv.BenignWorkload,
}
# adversaries whose randomness comes from the adversary seed stream
SEEDED = {"fuzz": "seed", "benign": "seed"}
GENERATOR = {"randomized_jailbreak": "rng"}


@dataclass
class ExperimentConfig:
    name: str = "experiment"
    timings: dict = field(default_factory=dict)
    policy: dict = field(default_factory=lambda: {"kind": "moat"})
    adversary: dict = field(default_factory=lambda: {"kind": "idle"})
    level: int = 1
    mitigation_period: int | None = 5
    banks: int = 1
    postpone: str = "strict"
    ideal_alert: bool = False
    reset_mode: str | None = None
    rows: int = 65536
    rows_per_group: int = 8
    horizon_ns: int | str | None = None
    horizon_trefi: int | None = None
    t_rh: int | None = None
    seed: int = 0
    repeat: int = 1
    outputs: dict = field(default_factory=dict)

    # -- ingestion ----------------------------------------------------------

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError("<root>", "config must be a JSON object")
        known = {f.name for f in fields(cls)}
        for key in data:
            if key not in known:
                raise ConfigError(key, "unknown key")
        data = copy.deepcopy(data)
        if data.get("adversary") in (None, {}):
            data["adversary"] = {"kind": "idle"}
        cfg = cls(**data)
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path: str | Path) -> "ExperimentConfig":
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigError("<file>", f"cannot read {path}: {exc.strerror}") from None
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError("<file>", f"{path} is not valid JSON ({exc.msg}, line {exc.lineno})") from None
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return {f.name: copy.deepcopy(getattr(self, f.name)) for f in fields(self)}

    def with_overrides(self, **changes) -> "ExperimentConfig":
        data = self.to_dict()
        data.update(changes)
        return ExperimentConfig.from_dict(data)

    # -- validation ---------------------------------------------------------

    def validate(self) -> None:
        def need_int(key, value, minimum=None):
            if not isinstance(value, int) or isinstance(value, bool):
                raise ConfigError(key, f"expected an integer, got {value!r}")
            if minimum is not None and value < minimum:
                raise ConfigError(key, f"must be at least {minimum}, got {value}")

        try:
            self.timing_object()
        except (TypeError, ValueError, KeyError) as exc:
            raise ConfigError("timings", str(exc).strip("'\"")) from None
        for key in ("level", "banks", "rows", "rows_per_group", "repeat"):
            need_int(key, getattr(self, key), 1)
        need_int("seed", self.seed, 0)
        if self.rows % self.rows_per_group:
            raise ConfigError("rows", f"{self.rows} is not a multiple of rows_per_group ({self.rows_per_group})")
        if self.level not in (1, 2, 4):
            raise ConfigError("level", f"ABO level must be 1, 2 or 4, got {self.level}")
        try:
            mitigation_rate_config(self.mitigation_period)
        except ValueError as exc:
            raise ConfigError("mitigation_period", str(exc)) from None
        try:
            PostponeMode(self.postpone)
        except ValueError:
            raise ConfigError("postpone", f"expected 'strict' or 'postpone2', got {self.postpone!r}") from None
        if self.reset_mode is not None:
            try:
                ResetMode(self.reset_mode)
            except ValueError:
                raise ConfigError("reset_mode", f"unknown reset mode {self.reset_mode!r}") from None
        if self.horizon_ns is not None and self.horizon_ns != "auto":
            need_int("horizon_ns", self.horizon_ns, 1)
        if self.horizon_trefi is not None:
            need_int("horizon_trefi", self.horizon_trefi, 1)
        if self.t_rh is not None:
            need_int("t_rh", self.t_rh, 1)
        if not isinstance(self.outputs, dict):
            raise ConfigError("outputs", "expected an object of output paths")
        for key in self.outputs:
            if key not in ("report", "series", "trace"):
                raise ConfigError(f"outputs.{key}", "unknown output")
        for section, table in (("policy", POLICIES), ("adversary", ADVERSARIES)):
            spec = getattr(self, section)
            if not isinstance(spec, dict):
                raise ConfigError(section, "expected an object with a 'kind'")
            kind = spec.get("kind")
            if kind not in table:
                raise ConfigError(f"{section}.kind", f"unknown kind {kind!r}; expected one of {sorted(table)}")
        # build once so constructor errors surface at load time
        self.build(0)

    # -- construction -------------------------------------------------------

    def timing_object(self) -> Timings:
        if not isinstance(self.timings, dict):
            raise TypeError("expected an object of timing overrides")
        data = DEFAULT_TIMINGS.to_dict()
        unknown = set(self.timings) - set(data)
        if unknown:
            raise KeyError(f"unknown timing key(s): {', '.join(sorted(unknown))}")
        data.update(self.timings)
        return Timings.from_dict(data)

    def _params(self, section: str) -> dict:
        spec = dict(getattr(self, section))
        spec.pop("kind")
        return spec

    def policy_factory(self):
        kind = self.policy["kind"]
        params = self._params("policy")
        cls = POLICIES[kind]

        def make():
            return cls(**params)

        try:
            make()
        except TypeError as exc:
            raise ConfigError(f"policy.{_bad_param(exc, params)}", str(exc)) from None
        except ValueError as exc:
            raise ConfigError("policy", str(exc)) from None
        return make

    def adversary_object(self, repeat: int = 0):
        kind = self.adversary["kind"]
        params = self._params("adversary")
        t = self.timing_object()
        ss = component_seed(self.seed, "adversary", repeat)
        if kind in SEEDED and SEEDED[kind] not in params:
            params[SEEDED[kind]] = int_seed(ss)
        if kind in GENERATOR:
            params[GENERATOR[kind]] = np.random.default_rng(ss)
        if params.get("pool") == "auto":
            if kind == "feinting":
                params["pool"] = feinting_periods(self._period(), t)
            elif kind == "ratchet":
                params["pool"] = nc(params.get("ath", 64), self.level, t)
            else:
                raise ConfigError("adversary.pool", f"'auto' is not defined for {kind}")
        try:
            return ADVERSARIES[kind](**params)
        except TypeError as exc:
            raise ConfigError(f"adversary.{_bad_param(exc, params)}", str(exc)) from None
        except ValueError as exc:
            raise ConfigError("adversary", str(exc)) from None

    def _period(self) -> int:
        if self.mitigation_period is None:
            raise ConfigError("mitigation_period", "feinting needs a mitigation period")
        return self.mitigation_period

    def horizon(self) -> int:
        t = self.timing_object()
        if self.horizon_trefi is not None:
            return self.horizon_trefi * t.tREFI
        if self.horizon_ns == "auto":
            if self.adversary["kind"] != "feinting":
                raise ConfigError("horizon_ns", "'auto' is only defined for feinting")
            k = self._period()
            return feinting_periods(k, t) * k * t.tREFI
        if self.horizon_ns is None:
            return t.tREFW
        return self.horizon_ns

    def build(self, repeat: int = 0, trace: bool = False):
        """Fresh (sub-channel, adversary, horizon) for one repetition."""
        t = self.timing_object()
        rng = np.random.default_rng(component_seed(self.seed, "policy", repeat))
        try:
            sc = SubChannel(
                self.policy_factory(),
                n_banks=self.banks,
                level=self.level,
                mitigation_period=self.mitigation_period,
                timings=t,
                postpone=self.postpone,
                ideal_alert=self.ideal_alert,
                rows=self.rows,
                rows_per_group=self.rows_per_group,
                reset_mode=self.reset_mode,
                rng=rng,
                trace=trace,
            )
        except ValueError as exc:
            raise ConfigError(_guess_key(str(exc)), str(exc)) from None
        return sc, self.adversary_object(repeat), self.horizon()


def _bad_param(exc: TypeError, params: dict) -> str:
    msg = str(exc)
    for name in params:
        if f"'{name}'" in msg:
            return name
    return "<params>"


def _guess_key(message: str) -> str:
    for key in ("rows_per_group", "rows", "banks", "level", "mitigation_period", "reset_mode"):
        if key.replace("_", " ") in message or key in message:
            return key
    return "<config>"
