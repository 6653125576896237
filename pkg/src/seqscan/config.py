"""Detector configuration files and the detector objects built from them.

Config files are INI-style ``key = value`` text::

    [detector]
    kind = new            ; new | trwa | triple
    kmax = 20

    [spec]
    p0 = 0.1
    p1 = 0.15
    alpha = 0.1
    beta = 0.1

    [params]              ; optional for kind = new; tuned when absent
    a = 0.1
    b = 0.1
    zeta = 0.96

    [trwa]                ; optional; defaults k0 = alpha, k1 = 1/beta
    k0 = 0.1
    k1 = 10

    [triple]
    p0 = 0.3333333333
    p1 = 0.6666666667
    offset = 0.1111111111 ; or p0_lo, p0_hi, p1_lo, p1_hi
    delta0 = 0.1
    delta1 = 0.1
    delta2 = 0.1
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field

from . import stats_core, trwa
from .errors import ConfigError
from .maxobs import bounded_table
from .plan import StoppingPlan
from .stats_core import TestSpec, TunedParams
from .triple import TripleSpec, TripleState, build_triple_plan, triple_step
from .tuner import minimax_tune

ENV_CONFIG = "SEQSCAN_CONFIG"
KINDS = ("new", "trwa", "triple")

_ALLOWED = {
    "detector": {"kind", "kmax"},
    "spec": {"p0", "p1", "alpha", "beta"},
    "params": {"a", "b", "zeta"},
    "trwa": {"k0", "k1", "mass_tol", "max_horizon"},
    "triple": {"p0", "p1", "offset", "p0_lo", "p0_hi", "p1_lo", "p1_hi",
               "delta", "delta0", "delta1", "delta2"},
}


def load_config(path=None, overrides=None) -> dict:
    """Parse a config file into ``{section: {key: str}}`` and apply flag overrides.

    ``path`` falls back to ``$SEQSCAN_CONFIG``; with neither, only the
    overrides are used.  ``overrides`` maps ``(section, key)`` to a value;
    ``None`` values are ignored.
    """
    path = path or os.environ.get(ENV_CONFIG)
    cfg: dict = {}
    if path:
        parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
        try:
            with open(path) as fh:
                parser.read_file(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except configparser.Error as exc:
            raise ConfigError(f"cannot parse config {path}: {exc}") from exc
        for section in parser.sections():
            cfg[section] = dict(parser.items(section))
    for (section, key), value in (overrides or {}).items():
        if value is not None:
            cfg.setdefault(section, {})[key] = str(value)
    for section, items in cfg.items():
        if section not in _ALLOWED:
            raise ConfigError(f"unknown config section [{section}]")
        bad = set(items) - _ALLOWED[section]
        if bad:
            raise ConfigError(f"unknown key(s) in [{section}]: {', '.join(sorted(bad))}")
    return cfg


def _num(cfg, section, key, default=None, cast=float):
    try:
        raw = cfg[section][key]
    except KeyError:
        if default is None:
            raise ConfigError(f"missing [{section}] {key}") from None
        return default
    try:
        return cast(raw)
    except ValueError:
        raise ConfigError(f"[{section}] {key} = {raw!r} is not a number") from None


def spec_from(cfg) -> TestSpec:
    try:
        return TestSpec(*(_num(cfg, "spec", k) for k in ("p0", "p1", "alpha", "beta")))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def triple_spec_from(cfg) -> TripleSpec:
    sec = cfg.get("triple", {})

    def get(key):
        return _num(cfg, "triple", key)

    # a shared "delta" fills in whichever per-hypothesis budgets are missing
    deltas = [get(k) if k in sec or "delta" not in sec else get("delta")
              for k in ("delta0", "delta1", "delta2")]
    try:
        if "offset" in sec:
            return TripleSpec.symmetric(get("p0"), get("p1"), get("offset"), *deltas)
        zones = [get(k) for k in ("p0_lo", "p0_hi", "p1_lo", "p1_hi")]
        return TripleSpec(get("p0"), get("p1"), *zones, *deltas)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


@dataclass
class Detector:
    """A configured detector: stepping for streams, plans for evaluation."""

    kind: str
    decisions: tuple
    spec: object
    params: object = None
    plan: StoppingPlan = None
    info: dict = field(default_factory=dict)

    def initial(self):
        if self.kind == "new":
            return stats_core.DetectorState()
        if self.kind == "trwa":
            return trwa.TrwaState()
        return TripleState()

    def advance(self, state, outcome: int):
        if self.kind == "new":
            return stats_core.step(state, outcome, self.params, self.spec)
        if self.kind == "trwa":
            return trwa.trwa_step(state, outcome, self.params, self.spec)
        return triple_step(state, outcome, self.plan)


def build_detector(cfg) -> Detector:
    kind = cfg.get("detector", {}).get("kind", "new")
    if kind not in KINDS:
        raise ConfigError(f"detector kind must be one of {KINDS}, got {kind!r}")
    kmax = _num(cfg, "detector", "kmax", 20, int)
    if kind == "triple":
        spec = triple_spec_from(cfg)
        plan, diag = build_triple_plan(spec, kmax)
        return Detector(kind, plan.decisions, spec, None, plan, {"diagnostics": diag})
    spec = spec_from(cfg)
    if kind == "trwa":
        k0 = _num(cfg, "trwa", "k0", spec.alpha)
        k1 = _num(cfg, "trwa", "k1", 1.0 / spec.beta)
        try:
            params = trwa.TrwaParams(k0, k1)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        info = {
            "mass_tol": _num(cfg, "trwa", "mass_tol", trwa.DEFAULT_MASS_TOL),
            "max_horizon": _num(cfg, "trwa", "max_horizon", trwa.DEFAULT_MAX_HORIZON, int),
        }
        return Detector(kind, stats_core.BINARY_DECISIONS, spec, params, info=info)
    info = {}
    if "params" in cfg:
        try:
            params = TunedParams(_num(cfg, "params", "a"), _num(cfg, "params", "b"),
                                 _num(cfg, "params", "zeta", 1.0))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    else:
        params, diag = minimax_tune(spec, kmax)
        info["diagnostics"] = diag
    table = bounded_table(spec, params)
    info["table"] = table
    return Detector(kind, stats_core.BINARY_DECISIONS, spec, params, table.to_plan(), info)
