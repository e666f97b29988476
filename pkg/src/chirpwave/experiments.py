"""Named experiments: run a validated spec, then render the result as CSV or JSON.

Every random draw comes from ``SeedSequence([seed, *task_key])``, where the
task key identifies the sweep point, curve and chunk. Tasks may run on a
thread pool; their results are merged in key order, so the output does not
depend on the number of workers.
"""

from __future__ import annotations

import io
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import __version__
from .config import ExperimentSpec, build_config
from .metrics import MetricSeries, ccdf, modulation_complexity, papr_at_ccdf, spectral_efficiency
from .scenarios import (
    GhostScenario,
    ber_trial,
    diversity_slope,
    ghost_trial,
    papr_samples,
    sensing_trial,
)
from .sensing import detect, pmsr, resolutions
from .waveforms import WaveformConfig, WaveformKind


@dataclass
class Result:
    spec: ExperimentSpec
    columns: list[str]
    rows: list[list[float]]
    summary: dict = field(default_factory=dict)
    map: dict | None = None
    wall_time_s: float = 0.0

    def column(self, name: str) -> np.ndarray:
        i = self.columns.index(name)
        return np.array([row[i] for row in self.rows], dtype=float)

    @property
    def series(self) -> list[MetricSeries]:
        if self.map is not None:
            return []
        x = self.column(self.columns[0])
        return [MetricSeries(name, x, self.column(name), self.columns[0]) for name in self.columns[1:]]


def _rng(spec: ExperimentSpec, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([spec.seed, *key]))


def _run_tasks(spec: ExperimentSpec, fn: Callable, keys: list[tuple]) -> dict:
    if spec.workers > 1 and len(keys) > 1:
        with ThreadPoolExecutor(max_workers=spec.workers) as pool:
            values = list(pool.map(lambda k: fn(*k), keys))
    else:
        values = [fn(*k) for k in keys]
    return dict(zip(keys, values))


def _chunks(total: int, size: int) -> list[int]:
    return [min(size, total - lo) for lo in range(0, total, size)]


def _kinds(spec: ExperimentSpec) -> list[WaveformKind]:
    return [WaveformKind(k) for k in spec.params["waveforms"]]


def _for_kind(cfg: WaveformConfig, kind: WaveformKind) -> WaveformConfig:
    # P only matters for chirp modulation; keep other kinds valid at any M.
    return cfg.replace(waveform=kind, P=cfg.P if kind is WaveformKind.DFT_S_OFDM_CM else 1)


# --------------------------------------------------------------------------
# communication experiments


def _papr_ccdf(spec: ExperimentSpec) -> Result:
    kinds = _kinds(spec)
    sizes = _chunks(spec.trials, 5000)
    keys = [(c, j) for c in range(len(kinds)) for j in range(len(sizes))]

    def task(c, j):
        return papr_samples(_for_kind(spec.config, kinds[c]), sizes[j], _rng(spec, c, j))

    out = _run_tasks(spec, task, keys)
    thresholds = np.array(spec.sweep.values)
    columns, summary = ["lambda_db"], {}
    curves = []
    for c, kind in enumerate(kinds):
        samples = np.concatenate([out[(c, j)] for j in range(len(sizes))])
        curves.append(ccdf(samples, thresholds).y)
        columns.append(f"ccdf_{kind.value}")
        summary[f"lambda_db_{kind.value}"] = papr_at_ccdf(samples, spec.params["ccdf_level"])
    rows = [[t] + [curve[i] for curve in curves] for i, t in enumerate(thresholds)]
    return Result(spec, columns, rows, summary)


def _sized(cfg: WaveformConfig, variable: str, value: float) -> WaveformConfig:
    value = int(value)
    if variable == "M_otfs":
        return cfg.replace(M_otfs=value, N_otfs=max(cfg.N // value, 1))
    if variable == "M":
        return cfg.replace(M=value, P=min(cfg.P, max(cfg.N // value, 1)))
    return cfg.replace(**{variable: value})


def _complexity_table(spec: ExperimentSpec) -> Result:
    kinds = _kinds(spec)
    columns = [spec.sweep.variable] + [f"norm_{k.value}" for k in kinds] + [f"mult_{k.value}" for k in kinds]
    rows = []
    for v in spec.sweep.values:
        cfg = _sized(spec.config, spec.sweep.variable, v)
        reports = [modulation_complexity(cfg, k) for k in kinds]
        rows.append([v] + [r.normalized_to_ofdm for r in reports] + [r.multiplications for r in reports])
    return Result(spec, columns, rows)


def _spectral_efficiency(spec: ExperimentSpec) -> Result:
    kinds = _kinds(spec)
    columns = [spec.sweep.variable] + [f"se_{k.value}" for k in kinds]
    rows = []
    for v in spec.sweep.values:
        cfg = _sized(spec.config, spec.sweep.variable, v)
        rows.append([v] + [spectral_efficiency(_for_kind(cfg, k)) for k in kinds])
    return Result(spec, columns, rows)


def _ber_vs_snr(spec: ExperimentSpec) -> Result:
    curves = spec.params["curves"]
    configs, labels = [], []
    for curve in curves:
        overrides = {k: v for k, v in curve.items() if k != "label"}
        configs.append(build_config(spec.config, overrides))
        labels.append(curve.get("label", overrides.get("waveform", "curve")))
    sizes = _chunks(spec.trials, int(spec.params["chunk"]))
    snrs = spec.sweep.values
    keys = [(i, c, j) for i in range(len(snrs)) for c in range(len(configs)) for j in range(len(sizes))]
    delays = tuple(int(d) for d in spec.params["delays"])

    def task(i, c, j):
        return ber_trial(configs[c], snrs[i], sizes[j], _rng(spec, i, c, j), delays,
                         spec.params["detector"], spec.params["fading"])

    out = _run_tasks(spec, task, keys)
    ber = np.zeros((len(snrs), len(configs)))
    for i in range(len(snrs)):
        for c in range(len(configs)):
            errors = sum(out[(i, c, j)][0] for j in range(len(sizes)))
            bits = sum(out[(i, c, j)][1] for j in range(len(sizes)))
            ber[i, c] = errors / bits
    summary = {f"diversity_{label}": diversity_slope(snrs, ber[:, c]) for c, label in enumerate(labels)}
    summary.update({f"spectral_efficiency_{label}": spectral_efficiency(cfg) for label, cfg in zip(labels, configs)})
    rows = [[s] + ber[i].tolist() for i, s in enumerate(snrs)]
    return Result(spec, ["snr_db"] + [f"ber_{label}" for label in labels], rows, summary)


# --------------------------------------------------------------------------
# sensing experiments


def _ghost(spec: ExperimentSpec, isr_db: float | None = None) -> GhostScenario:
    p = spec.params
    return GhostScenario(
        target_delay=int(p["target_delay"]),
        interferer_delay=int(p["interferer_delay"]),
        echo_gain_db=float(p["echo_gain_db"]),
        snr_db=float(p["snr_db"]),
        isr_db=float(p["isr_db"] if isr_db is None else isr_db),
    )


def _mix_range_profile(spec: ExperimentSpec) -> Result:
    kinds = _kinds(spec)
    scene = _ghost(spec)
    sizes = _chunks(spec.trials, 50)
    keys = [(c, j) for c in range(len(kinds)) for j in range(len(sizes))]

    def task(c, j):
        rng = _rng(spec, c, j)
        cfg = _for_kind(spec.config, kinds[c])
        power, truth, ghost_close = np.zeros(cfg.N), [], 0
        for _ in range(sizes[j]):
            profile = ghost_trial(cfg, scene, rng)
            p = profile.magnitudes**2
            power += p
            truth.append(pmsr(profile, peak=scene.target_delay))
            top = p.max()
            floor = top * 10 ** (-0.3)  # within 3 dB
            ghost_close += bool(p[scene.interferer_delay] >= floor and p[scene.target_delay] >= floor)
        return power, truth, ghost_close

    out = _run_tasks(spec, task, keys)
    columns, curves, summary = ["range_bin", "range_m"], [], {}
    bin_m = resolutions(spec.config)[0]
    for c, kind in enumerate(kinds):
        power = sum(out[(c, j)][0] for j in range(len(sizes))) / spec.trials
        truth = [v for j in range(len(sizes)) for v in out[(c, j)][1]]
        close = sum(out[(c, j)][2] for j in range(len(sizes)))
        curves.append(10 * np.log10(np.maximum(power / power.max(), 1e-30)))
        columns.append(f"profile_db_{kind.value}")
        summary[f"mean_pmsr_db_{kind.value}"] = float(np.mean(truth))
        summary[f"two_peaks_within_3db_{kind.value}"] = close / spec.trials
    rows = [[b, b * bin_m] + [curve[int(b)] for curve in curves] for b in spec.sweep.values]
    return Result(spec, columns, rows, summary)


def _pmsr_vs_isr(spec: ExperimentSpec) -> Result:
    kinds = _kinds(spec)
    sizes = _chunks(spec.trials, 50)
    isrs = spec.sweep.values
    keys = [(i, c, j) for i in range(len(isrs)) for c in range(len(kinds)) for j in range(len(sizes))]

    def task(i, c, j):
        rng = _rng(spec, i, c, j)
        cfg = _for_kind(spec.config, kinds[c])
        scene = _ghost(spec, isr_db=isrs[i])
        return sum(pmsr(ghost_trial(cfg, scene, rng), peak=scene.target_delay) for _ in range(sizes[j]))

    out = _run_tasks(spec, task, keys)
    mean = np.array([[sum(out[(i, c, j)] for j in range(len(sizes))) / spec.trials
                      for c in range(len(kinds))] for i in range(len(isrs))])
    summary = {f"pmsr_decline_db_{k.value}": float(mean[0, c] - mean[-1, c]) for c, k in enumerate(kinds)}
    rows = [[isr] + mean[i].tolist() for i, isr in enumerate(isrs)]
    return Result(spec, ["isr_db"] + [f"pmsr_db_{k.value}" for k in kinds], rows, summary)


def _mf_map(spec: ExperimentSpec) -> Result:
    kinds = _kinds(spec)
    p = spec.params
    keys = [(c, t) for c in range(len(kinds)) for t in range(spec.trials)]

    def task(c, t):
        cfg = _for_kind(spec.config, kinds[c])
        surface = sensing_trial(cfg, _rng(spec, c, t), delay=int(p["target_delay"]),
                                velocity_bin=int(p["velocity_bin"]), snr_db=float(p["snr_db"]))
        return surface.magnitudes**2

    out = _run_tasks(spec, task, keys)
    cfg = spec.config
    range_m, velocity_mps = resolutions(cfg)
    velocities = np.fft.fftfreq(cfg.K, 1.0 / cfg.K) * velocity_mps
    maps, summary = {}, {}
    for c, kind in enumerate(kinds):
        power = sum(out[(c, t)] for t in range(spec.trials)) / spec.trials
        db = 10 * np.log10(np.maximum(power / power.max(), 1e-30))
        maps[kind.value] = db
        peak = np.unravel_index(np.argmax(power), power.shape)
        alias = ((peak[0] + cfg.N // 2) % cfg.N, peak[1])
        summary[f"peak_bin_{kind.value}"] = [int(peak[0]), int(peak[1])]
        summary[f"half_frame_alias_db_{kind.value}"] = float(db[alias])
        summary[f"pmsr_db_{kind.value}"] = pmsr(np.sqrt(power))
    columns = ["range_bin", "velocity_bin", "range_m", "velocity_mps"] + [f"mag_db_{k.value}" for k in kinds]
    rows = []
    for b in spec.sweep.values:
        r = int(b)
        for v in range(cfg.K):
            rows.append([r, v, r * range_m, velocities[v]] + [maps[k.value][r, v] for k in kinds])
    doc = {"range_m": (np.arange(cfg.N) * range_m).tolist(), "velocity_mps": velocities.tolist(),
           "magnitude_db": {k: m.tolist() for k, m in maps.items()}}
    return Result(spec, columns, rows, summary, map=doc)


def _pd_vs_clipping(spec: ExperimentSpec) -> Result:
    kinds = _kinds(spec)
    p = spec.params
    sizes = _chunks(spec.trials, 50)
    ratios = spec.sweep.values
    truth = (int(p["target_delay"]), int(p["velocity_bin"]))
    keys = [(i, c, j) for i in range(len(ratios)) for c in range(len(kinds)) for j in range(len(sizes))]

    def task(i, c, j):
        # same seeds across clipping ratios: only the clipping differs between points
        cfg = _for_kind(spec.config, kinds[c])
        rng = _rng(spec, c, j, 0)
        total = 0.0
        for _ in range(sizes[j]):
            surface = sensing_trial(cfg, rng, delay=truth[0], velocity_bin=truth[1],
                                    snr_db=float(p["pmsr_snr_db"]), clipping_ratio_db=ratios[i])
            total += pmsr(surface)
        rng = _rng(spec, c, j, 1)
        cfg_pd = cfg.replace(K=int(p["pd_K"]))
        hits = 0
        for _ in range(sizes[j]):
            surface = sensing_trial(cfg_pd, rng, delay=truth[0], velocity_bin=truth[1],
                                    snr_db=float(p["pd_snr_db"]), clipping_ratio_db=ratios[i])
            hits += detect(surface, truth).detected
        return total, hits

    out = _run_tasks(spec, task, keys)
    columns = ["clipping_ratio_db"] + [f"pmsr_db_{k.value}" for k in kinds] + [f"pd_{k.value}" for k in kinds]
    rows = []
    for i, cr in enumerate(ratios):
        pm = [sum(out[(i, c, j)][0] for j in range(len(sizes))) / spec.trials for c in range(len(kinds))]
        pd = [sum(out[(i, c, j)][1] for j in range(len(sizes))) / spec.trials for c in range(len(kinds))]
        rows.append([cr] + pm + pd)
    return Result(spec, columns, rows)


def _resolutions(spec: ExperimentSpec) -> Result:
    rows = []
    for v in spec.sweep.values:
        if spec.sweep.variable == "K":
            rng_m, vel = resolutions(spec.config, K=int(v))
        else:
            rng_m, vel = resolutions(spec.config.replace(B=v))
        rows.append([v, rng_m, vel])
    return Result(spec, [spec.sweep.variable, "range_res_m", "velocity_res_mps"], rows)


_RUNNERS = {
    "papr_ccdf": _papr_ccdf,
    "complexity_table": _complexity_table,
    "spectral_efficiency": _spectral_efficiency,
    "ber_vs_snr": _ber_vs_snr,
    "mix_range_profile": _mix_range_profile,
    "pmsr_vs_isr": _pmsr_vs_isr,
    "mf_map": _mf_map,
    "pd_vs_clipping": _pd_vs_clipping,
    "resolutions": _resolutions,
}


def run(spec: ExperimentSpec) -> Result:
    """Execute ``spec``; deterministic for a fixed spec and seed."""
    start = time.perf_counter()
    result = _RUNNERS[spec.name](spec)
    result.wall_time_s = time.perf_counter() - start
    return result


# --------------------------------------------------------------------------
# output


def _fmt(value) -> str:
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.9g}"


def to_csv(result: Result) -> str:
    buf = io.StringIO()
    buf.write(",".join(result.columns) + "\n")
    for row in result.rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def _clean(obj):
    """Round floats to 9 significant digits and spell out non-finite values."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.integer, bool)):
        return obj if isinstance(obj, bool) else int(obj)
    if isinstance(obj, (float, np.floating)):
        text = _fmt(obj)
        return text if text in ("nan", "inf", "-inf") else float(text)
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    return obj


def to_json(result: Result, timing: bool = True) -> str:
    doc = {"spec": result.spec.to_dict()}
    if result.map is not None:
        doc["map"] = result.map
    else:
        doc["series"] = [s.to_dict() for s in result.series]
    doc["summary"] = result.summary
    meta = {"library": "chirpwave", "version": __version__}
    if timing:
        meta["wall_time_s"] = result.wall_time_s
    doc["meta"] = meta
    return json.dumps(_clean(doc), indent=1, sort_keys=True) + "\n"


def render(result: Result, fmt: str = "csv", timing: bool = True) -> str:
    if fmt == "csv":
        return to_csv(result)
    if fmt == "json":
        return to_json(result, timing)
    raise ValueError(f"unknown format {fmt!r}")
