"""Experiment specifications: presets, JSON parsing and ``key=value`` overrides."""

from __future__ import annotations

import dataclasses
import json
import math
import os
from dataclasses import dataclass, field
from typing import Any

from .constellation import ConstellationKind
from .errors import ConfigurationError
from .waveforms import WaveformConfig

# Scenario I: the PAPR / complexity / sensing setup (N and M pinned by the
# complexity figures; 4-QAM, L_CP=32 and K=64 are assumptions).
SCENARIO_I = WaveformConfig(N=256, M=128, Q=4, L_CP=32, K=64, M_otfs=128, N_otfs=2)

# Scenario II: small frames for exhaustive ML detection with L=3 paths.
SCENARIO_II = WaveformConfig(
    N=16, M=4, Q=4, P=4, L_CP=4, K=1, constellation=ConstellationKind.PSK, M_otfs=4, N_otfs=4
)

_CONFIG_FIELDS = {f.name for f in dataclasses.fields(WaveformConfig)}
_TOP_LEVEL = {"experiment", "config", "sweep", "trials", "seed", "params", "workers"}


@dataclass(frozen=True)
class Sweep:
    variable: str
    values: tuple

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        if not values:
            raise ConfigurationError("sweep needs at least one value", "sweep.values")
        if any(math.isnan(v) for v in values):
            raise ConfigurationError("sweep values must be numbers", "sweep.values")
        if len(set(values)) != len(values):
            raise ConfigurationError("sweep values must be distinct", "sweep.values")
        object.__setattr__(self, "values", tuple(sorted(values)))


@dataclass(frozen=True)
class ExperimentDefaults:
    base: WaveformConfig
    sweep: Sweep
    trials: int
    params: dict
    sweep_variables: tuple
    allow_infinite: bool = False


def _grid(start, stop, step):
    count = int(round((stop - start) / step)) + 1
    return tuple(start + i * step for i in range(count))


_SENSE_KINDS = ["FMCW", "CHIRPED_DFT_S_OFDM"]

DEFAULTS: dict[str, ExperimentDefaults] = {
    "papr_ccdf": ExperimentDefaults(
        SCENARIO_I, Sweep("lambda_db", _grid(0.0, 12.0, 0.25)), 10_000,
        {"waveforms": ["DFT_S_OFDM", "CHIRPED_DFT_S_OFDM", "OFDM", "AFDM", "OTFS"], "ccdf_level": 1e-2},
        ("lambda_db",),
    ),
    "complexity_table": ExperimentDefaults(
        SCENARIO_I, Sweep("M_otfs", (2, 4, 8, 16, 32, 64, 128)), 1,
        {"waveforms": ["OFDM", "DFT_S_OFDM", "CHIRPED_DFT_S_OFDM", "DFT_S_OFDM_CM", "AFDM", "OTFS"]},
        ("M_otfs", "M"),
    ),
    "spectral_efficiency": ExperimentDefaults(
        SCENARIO_I.replace(P=2), Sweep("M", (2, 4, 8, 16, 32, 64, 128)), 1,
        {"waveforms": ["DFT_S_OFDM", "CHIRPED_DFT_S_OFDM", "DFT_S_OFDM_CM", "OFDM", "AFDM", "OTFS", "FMCW"]},
        ("M", "Q", "P"),
    ),
    "ber_vs_snr": ExperimentDefaults(
        SCENARIO_II, Sweep("snr_db", _grid(0.0, 30.0, 2.0)), 20_000,
        {
            "curves": [
                {"label": "DFT_S_OFDM", "waveform": "DFT_S_OFDM"},
                {"label": "CHIRPED_DFT_S_OFDM", "waveform": "CHIRPED_DFT_S_OFDM"},
                {"label": "DFT_S_OFDM_CM", "waveform": "DFT_S_OFDM_CM"},
            ],
            "delays": [0, 1, 2],
            "detector": "ml",
            "fading": "rayleigh",
            "chunk": 5000,
        },
        ("snr_db",),
    ),
    "mix_range_profile": ExperimentDefaults(
        SCENARIO_I, Sweep("range_bin", tuple(range(SCENARIO_I.N))), 200,
        {"waveforms": _SENSE_KINDS, "target_delay": 10, "interferer_delay": 20,
         "echo_gain_db": -10.0, "snr_db": -5.0, "isr_db": -10.0},
        ("range_bin",),
    ),
    "pmsr_vs_isr": ExperimentDefaults(
        SCENARIO_I, Sweep("isr_db", (-20.0, -15.0, -10.0, -5.0, 0.0)), 200,
        {"waveforms": _SENSE_KINDS, "target_delay": 10, "interferer_delay": 20,
         "echo_gain_db": -10.0, "snr_db": -5.0},
        ("isr_db",),
    ),
    "mf_map": ExperimentDefaults(
        SCENARIO_I, Sweep("range_bin", tuple(range(SCENARIO_I.N))), 1,
        {"waveforms": ["DFT_S_OFDM", "CHIRPED_DFT_S_OFDM"], "target_delay": 10, "velocity_bin": 3,
         "snr_db": -20.0},
        ("range_bin",),
    ),
    "pd_vs_clipping": ExperimentDefaults(
        SCENARIO_I.replace(constellation=ConstellationKind.PSK),
        Sweep("clipping_ratio_db", (0.0, 3.0, 6.0, math.inf)), 200,
        {"waveforms": ["CHIRPED_DFT_S_OFDM", "AFDM", "OTFS"], "target_delay": 10, "velocity_bin": 3,
         "pmsr_snr_db": -20.0, "pd_snr_db": -40.0, "pd_K": 512},
        ("clipping_ratio_db",), allow_infinite=True,
    ),
    "resolutions": ExperimentDefaults(
        SCENARIO_I, Sweep("K", (64, 128, 256, 512, 533, 1024)), 1, {}, ("K", "B"),
    ),
}

EXPERIMENTS = tuple(DEFAULTS)


@dataclass(frozen=True)
class ExperimentSpec:
    """A fully validated, runnable experiment."""

    name: str
    config: WaveformConfig
    sweep: Sweep
    trials: int
    seed: int = 0
    params: dict = field(default_factory=dict)
    workers: int = 1

    def __post_init__(self):
        if self.name not in DEFAULTS:
            raise ConfigurationError(
                f"unknown experiment {self.name!r}; choose from {', '.join(EXPERIMENTS)}", "experiment"
            )
        if not isinstance(self.trials, int) or self.trials < 1:
            raise ConfigurationError(f"trials={self.trials!r} must be an integer >= 1", "trials")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ConfigurationError(f"seed={self.seed!r} must be an unsigned 64-bit integer", "seed")
        if not isinstance(self.workers, int) or self.workers < 1:
            raise ConfigurationError(f"workers={self.workers!r} must be an integer >= 1", "workers")
        defaults = DEFAULTS[self.name]
        if self.sweep.variable not in defaults.sweep_variables:
            raise ConfigurationError(
                f"{self.name} cannot sweep {self.sweep.variable!r}; allowed: {', '.join(defaults.sweep_variables)}",
                "sweep.variable",
            )
        if not defaults.allow_infinite and not all(math.isfinite(v) for v in self.sweep.values):
            raise ConfigurationError("sweep values must be finite", "sweep.values")
        unknown = set(self.params) - set(defaults.params)
        if unknown:
            raise ConfigurationError(f"unknown parameter(s) for {self.name}: {', '.join(sorted(unknown))}",
                                     "params." + sorted(unknown)[0])

    def to_dict(self) -> dict:
        cfg = {k: (v.value if hasattr(v, "value") else v) for k, v in dataclasses.asdict(self.config).items()}
        return {
            "experiment": self.name,
            "config": cfg,
            "sweep": {"variable": self.sweep.variable, "values": list(self.sweep.values)},
            "trials": self.trials,
            "seed": self.seed,
            "params": self.params,
        }


def build_config(base: WaveformConfig, overrides: dict) -> WaveformConfig:
    """Apply field overrides; validation errors name the offending field."""
    unknown = set(overrides) - _CONFIG_FIELDS
    if unknown:
        raise ConfigurationError(f"unknown config field(s): {', '.join(sorted(unknown))}", sorted(unknown)[0])
    return base.replace(**overrides)


def _parse_sweep(raw: Any, default: Sweep) -> Sweep:
    if raw is None:
        return default
    if not isinstance(raw, dict):
        raise ConfigurationError("sweep must be an object", "sweep")
    variable = raw.get("variable", default.variable)
    if "values" in raw:
        values = raw["values"]
        if not isinstance(values, list):
            raise ConfigurationError("sweep.values must be a list", "sweep.values")
    elif {"start", "stop", "step"} <= set(raw):
        if not raw["step"] > 0:
            raise ConfigurationError("sweep.step must be positive", "sweep.step")
        values = _grid(float(raw["start"]), float(raw["stop"]), float(raw["step"]))
    elif variable == default.variable:
        values = default.values
    else:
        raise ConfigurationError("sweep needs values or start/stop/step", "sweep.values")
    try:
        return Sweep(variable, tuple(_number(v) for v in values))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigurationError):
            raise
        raise ConfigurationError(f"bad sweep value: {exc}", "sweep.values") from None


def _number(value):
    if isinstance(value, str) and value.strip().lower() in ("inf", "+inf", "infinity"):
        return math.inf
    return float(value)


def spec_from_dict(doc: dict, name: str | None = None) -> ExperimentSpec:
    """Validate a parsed document and fill in defaults."""
    if not isinstance(doc, dict):
        raise ConfigurationError("config document must be a JSON object", "<root>")
    unknown = set(doc) - _TOP_LEVEL
    if unknown:
        raise ConfigurationError(f"unknown key(s): {', '.join(sorted(unknown))}", sorted(unknown)[0])
    name = name or doc.get("experiment")
    if name is None:
        raise ConfigurationError("no experiment named", "experiment")
    if name not in DEFAULTS:
        raise ConfigurationError(f"unknown experiment {name!r}; choose from {', '.join(EXPERIMENTS)}", "experiment")
    defaults = DEFAULTS[name]
    overrides = doc.get("config") or {}
    if not isinstance(overrides, dict):
        raise ConfigurationError("config must be an object", "config")
    params = dict(defaults.params)
    extra = doc.get("params") or {}
    if not isinstance(extra, dict):
        raise ConfigurationError("params must be an object", "params")
    unknown = set(extra) - set(defaults.params)
    if unknown:
        raise ConfigurationError(f"unknown parameter(s) for {name}: {', '.join(sorted(unknown))}",
                                 "params." + sorted(unknown)[0])
    params.update(extra)
    return ExperimentSpec(
        name=name,
        config=build_config(defaults.base, overrides),
        sweep=_parse_sweep(doc.get("sweep"), defaults.sweep),
        trials=doc.get("trials", defaults.trials),
        seed=doc.get("seed", 0),
        params=params,
        workers=doc.get("workers", 1),
    )


def parse_config(source: str | os.PathLike | None = None, name: str | None = None) -> ExperimentSpec:
    """Build a spec from a JSON file path or inline JSON text (``None`` means defaults)."""
    if source is None:
        doc = {}
    else:
        text = str(source)
        if not text.lstrip().startswith("{") and os.path.exists(text):
            with open(text, encoding="utf-8") as fh:
                text = fh.read()
        try:
            doc = json.loads(text) if text.strip() else {}
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"invalid JSON: {exc}", "<root>") from None
    return spec_from_dict(doc, name)


def _literal(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        if text.lower() in ("inf", "+inf", "-inf"):
            return float(text)
        return text


def apply_overrides(doc: dict, assignments: list[str], name: str) -> dict:
    """Merge ``key=value`` strings into a raw config document.

    Keys may be a config field (``M=4``), ``trials``/``seed``/``workers``,
    ``sweep.variable``/``sweep.values`` (comma separated) or an experiment
    parameter, optionally prefixed ``params.``.
    """
    doc = json.loads(json.dumps(doc))  # deep copy
    defaults = DEFAULTS[name].params if name in DEFAULTS else {}
    for item in assignments:
        key, sep, raw = item.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigurationError(f"--set expects key=value, got {item!r}", item)
        if key in _CONFIG_FIELDS:
            doc.setdefault("config", {})[key] = _literal(raw)
        elif key in ("trials", "seed", "workers"):
            doc[key] = _literal(raw)
        elif key == "sweep.variable":
            doc.setdefault("sweep", {})["variable"] = raw
        elif key == "sweep.values":
            doc.setdefault("sweep", {})["values"] = [_literal(v) for v in raw.split(",") if v]
        elif key.removeprefix("params.") in defaults:
            doc.setdefault("params", {})[key.removeprefix("params.")] = _literal(raw)
        else:
            raise ConfigurationError(f"unknown setting {key!r}", key)
    return doc
