"""Run pipeline and parameter sweeps: trajectory -> spectrum -> metrics.

A sweep is a cartesian product over dotted config paths (file-schema units),
optionally repeated; every point gets an injectively derived seed so any row
can be reproduced standalone.  Points run independently (optionally in a
process pool) and the aggregate table is written once, ordered by point
index (axis values), regardless of completion order.
"""

from __future__ import annotations

import concurrent.futures
import itertools
import json
import os
import time
import traceback
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .config import (ConfigError, SimConfig, _SCHEMA, config_hash,
                     config_to_doc, doc_to_config)
from .dynamics import FieldRecord, run_trajectory, write_record
from .spectrum import (LinewidthFit, SpectrumResult, contrast_ratio,
                       find_peaks, fit_linewidth, g1_estimate, psd,
                       write_spectrum)

METRIC_KEYS = (
    "central_offset_hz", "central_fwhm_hz", "central_fwhm_raw_hz",
    "central_height", "central_lower_bound", "central_method",
    "side_lo_freq_hz", "side_hi_freq_hz", "side_lo_height", "side_hi_height",
    "contrast", "photon_number_mean", "photon_number_central",
    "g1_zero", "bin_hz", "max_lag_s",
)


def analyze_record(record: FieldRecord, cfg: SimConfig) -> tuple[SpectrumResult, dict]:
    """Spectrum and scalar metrics from one recorded trajectory."""
    span = record.t.size * record.dt_record
    max_lag = cfg.numerics.max_lag if cfg.numerics.max_lag > 0 else span / 4.0
    max_lag = min(max_lag, span / 4.0)
    corr = g1_estimate(record, max_lag)
    spec = psd(corr, cfg.numerics.window)

    delta_pa_hz = cfg.pump.delta_pa / (2.0 * np.pi)
    peaks = find_peaks(spec, delta_pa_hz)
    spec.peaks = peaks

    metrics: dict = {k: "" for k in METRIC_KEYS}
    metrics["g1_zero"] = float(np.abs(corr.g1[0]))
    metrics["bin_hz"] = spec.bin_hz
    metrics["max_lag_s"] = max_lag
    metrics["photon_number_mean"] = float(np.mean(record.n_phot))

    central_fit: LinewidthFit | None = None
    if peaks.central is not None:
        central_fit = fit_linewidth(spec, peaks.central)
        spec.central = central_fit
        metrics["central_offset_hz"] = central_fit.offset
        metrics["central_fwhm_hz"] = central_fit.fwhm
        metrics["central_fwhm_raw_hz"] = central_fit.fwhm_raw
        metrics["central_height"] = central_fit.height
        metrics["central_lower_bound"] = central_fit.lower_bound
        metrics["central_method"] = central_fit.method

    # Photon number carried by the central component: spectral power fraction
    # in a window of half-width delta_pa/2 around the measured center.
    if peaks.central is not None and spec.psd.size:
        total = float(np.sum(spec.psd))
        if delta_pa_hz > 0 and total > 0:
            f_c = central_fit.offset
            sel = np.abs(spec.freq - f_c) <= delta_pa_hz / 2.0
            frac = float(np.sum(spec.psd[sel])) / total
        else:
            frac = 1.0
        metrics["photon_number_central"] = metrics["photon_number_mean"] * max(frac, 0.0)

    heights = {}
    for name, pk in (("side_lo", peaks.side_lo), ("side_hi", peaks.side_hi)):
        if pk is None:
            continue
        fit = fit_linewidth(spec, pk)
        metrics[f"{name}_freq_hz"] = fit.offset
        h = fit.height if fit.method == "fit" else pk.height
        metrics[f"{name}_height"] = h
        heights[name] = h
    if "side_lo" in heights and "side_hi" in heights:
        c = contrast_ratio(heights["side_lo"], heights["side_hi"])
        metrics["contrast"] = c
        spec.contrast = c
    return spec, metrics


@dataclass
class PointResult:
    record: FieldRecord
    spec: SpectrumResult
    metrics: dict


def run_point(cfg: SimConfig) -> PointResult:
    record = run_trajectory(cfg)
    spec, metrics = analyze_record(record, cfg)
    return PointResult(record, spec, metrics)


# ---------------------------------------------------------------------------
# File outputs

def _fmt(v) -> str:
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return f"{v:.10g}"
    return str(v)


def write_metrics(metrics: dict, path: str, cfg_hash: str, seed: int) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# beamlaser metrics\n")
        fh.write(f"config_hash = {cfg_hash}\n")
        fh.write(f"seed = {seed}\n")
        for key in METRIC_KEYS:
            fh.write(f"{key} = {_fmt(metrics.get(key, ''))}\n")


def read_metrics(path: str) -> dict:
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("#") or "=" not in line:
                continue
            k, v = (s.strip() for s in line.split("=", 1))
            out[k] = v
    return out


def write_manifest(path: str, cfg: SimConfig, seed: int, outputs: list[str],
                   t_start: float, t_end: float, engine: str = "") -> None:
    payload = {
        "config_hash": config_hash(cfg),
        "seed": seed,
        "code_version": __version__,
        "engine": engine,
        "wall_start": time.strftime("%Y-%m-%dT%H:%M:%S", time.gmtime(t_start)),
        "wall_end": time.strftime("%Y-%m-%dT%H:%M:%S", time.gmtime(t_end)),
        "outputs": outputs,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_map_table(entries: list[tuple[float, SpectrumResult]], path: str) -> None:
    """Long-format detuning map: one (delta_ca_mhz, freq_hz, psd) row per bin."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# beamlaser detuning map\n")
        fh.write("delta_ca_mhz\tfreq_hz\tpsd\n")
        for delta_mhz, spec in entries:
            for f, s in zip(spec.freq, spec.psd):
                fh.write(f"{delta_mhz:.10g}\t{f:.10g}\t{s:.10g}\n")


# ---------------------------------------------------------------------------
# Sweeps

@dataclass
class SweepSpec:
    """Cartesian sweep over dotted config paths (values in file-schema units)."""
    axes: list[tuple[str, list[float]]]
    base_seed: int = 0
    repeats: int = 1

    def points(self) -> list[dict[str, float]]:
        if not self.axes or any(len(v) == 0 for _, v in self.axes):
            raise ValueError("every sweep axis needs at least one value")
        names = [a for a, _ in self.axes]
        combos = itertools.product(*(v for _, v in self.axes))
        out = []
        for combo in combos:
            for _ in range(self.repeats):
                out.append(dict(zip(names, combo)))
        return out


def derived_seed(base_seed: int, index: int) -> int:
    """Injective per-point seed: base + 1000003 * index."""
    return int(base_seed) + 1_000_003 * int(index)


def _sweep_worker(args):
    index, doc, seed, spectrum_path = args
    try:
        cfg = doc_to_config(doc)
        cfg.numerics.seed = seed
        result = run_point(cfg)
        if spectrum_path:
            write_spectrum(result.spec, spectrum_path,
                           meta=f"config_hash={config_hash(cfg)} seed={seed}")
        return index, result.metrics, ""
    except Exception:
        return index, None, traceback.format_exc(limit=3)


@dataclass
class SweepResult:
    rows: list[dict] = field(default_factory=list)
    axis_names: list[str] = field(default_factory=list)


def run_sweep(base_cfg: SimConfig, spec: SweepSpec, parallel: int = 1,
              out_dir: str | None = None, save_spectra: bool = False) -> SweepResult:
    """Execute every sweep point; failed points are flagged, not fatal."""
    points = spec.points()
    axis_names = [a for a, _ in spec.axes]
    for path, _ in spec.axes:
        if "." not in path:
            raise ConfigError(f"axis path must be section.key, got {path!r}")
        section, key = path.split(".", 1)
        if section not in _SCHEMA or key not in _SCHEMA[section]:
            raise ConfigError(f"unknown axis path {path!r}")
    base_doc = config_to_doc(base_cfg)

    jobs = []
    for i, overrides in enumerate(points):
        # Defer validation to the worker so a bad point yields a flagged row.
        doc = {section: dict(items) for section, items in base_doc.items()}
        for path, value in overrides.items():
            section, key = path.split(".", 1)
            doc.setdefault(section, {})[key] = _fmt(value)
        seed = derived_seed(spec.base_seed, i)
        spath = (os.path.join(out_dir, f"spectrum_p{i:04d}.tsv")
                 if (out_dir and save_spectra) else "")
        jobs.append((i, doc, seed, spath))

    results: dict[int, tuple[dict | None, str]] = {}
    if parallel > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=parallel) as pool:
            for index, metrics, err in pool.map(_sweep_worker, jobs):
                results[index] = (metrics, err)
    else:
        for job in jobs:
            index, metrics, err = _sweep_worker(job)
            results[index] = (metrics, err)

    out = SweepResult(axis_names=axis_names)
    for i, overrides in enumerate(points):
        metrics, err = results[i]
        row = {"index": i, "seed": derived_seed(spec.base_seed, i)}
        row.update(overrides)
        if metrics is None:
            row["status"] = "failed"
            row["error"] = " | ".join(err.strip().splitlines()[-1:])
        else:
            row["status"] = "ok"
            row["error"] = ""
            row.update(metrics)
        out.rows.append(row)
    return out


def write_sweep_table(result: SweepResult, path: str) -> None:
    cols = (["index"] + result.axis_names + ["seed", "status"]
            + list(METRIC_KEYS) + ["error"])
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\t".join(cols) + "\n")
        for row in result.rows:
            fh.write("\t".join(_fmt(row.get(c, "")) for c in cols) + "\n")


def read_sweep_table(path: str) -> list[dict]:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    header = lines[0].split("\t")
    return [dict(zip(header, ln.split("\t"))) for ln in lines[1:]]
