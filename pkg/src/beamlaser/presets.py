"""Built-in parameter sets reproducing the reference figures.

Every preset exists at full scale (the published parameters, long-running)
and at desk scale (reduced atom number, shorter records, coarser grids),
selected explicitly; nothing is rescaled silently.  Presets fill in the
integrator step from the fastest retained rate and pick the recording
stride for a ~25 ns field sampling grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import CouplingMode, PumpScheme, SimConfig, TWO_PI

FIGURE_IDS = ("fig1", "fig2", "fig3", "fig4", "fig5", "fig6")

OMEGA_REF = TWO_PI * 12e6       # pump Rabi frequency used throughout


def tune_numerics(cfg: SimConfig, t_record: float, max_lag: float,
                  t_burn: float | None = None, record_dt: float = 25e-9,
                  margin: float = 0.095) -> SimConfig:
    """Set dt from the fastest retained rate, stride and record spans."""
    fastest = max(cfg.gamma_0() * cfg.n_mean, cfg.pump.delta_pa,
                  abs(cfg.delta_ca), cfg.doppler_width())
    cfg.numerics.dt = min(margin / fastest, cfg.tau / 50.0)
    cfg.numerics.record_every = max(1, int(round(record_dt / cfg.numerics.dt)))
    cfg.numerics.t_record = t_record
    cfg.numerics.max_lag = max_lag
    cfg.numerics.t_burn = 25.0 * cfg.tau if t_burn is None else t_burn
    return cfg


def pulse_area_tau_p(area_pi: float, omega: float = OMEGA_REF) -> float:
    """Pump duration giving the pulse area area_pi * pi."""
    return area_pi * math.pi / omega


def coupling_for_collective_events(n_events: float, n_mean: float,
                                   tau: float, kappa: float) -> float:
    """Coupling g such that N tau Gamma_c(0) equals n_events."""
    gamma_0 = n_events / (n_mean * tau)
    return math.sqrt(gamma_0 * kappa) / 2.0


@dataclass
class PresetJob:
    """One trajectory of a figure preset."""
    label: str
    config: SimConfig
    group: str = ""                 # map/table the job belongs to
    coord: dict = field(default_factory=dict)   # axis values for the group


def _base(scheme: PumpScheme, tau: float, n_mean: float, area_pi: float,
          delta_pa_mhz: float, g_mhz: float = 0.25,
          linewidth_khz: float = 20.0) -> SimConfig:
    cfg = SimConfig()
    cfg.g = TWO_PI * g_mhz * 1e6
    cfg.tau = tau
    cfg.n_mean = n_mean
    cfg.pump.scheme = scheme
    cfg.pump.omega = OMEGA_REF
    cfg.pump.tau_p = pulse_area_tau_p(area_pi)
    cfg.pump.delta_pa = TWO_PI * delta_pa_mhz * 1e6
    cfg.pump.linewidth = TWO_PI * linewidth_khz * 1e3
    return cfg


def fig1_jobs(desk: bool) -> list[PresetJob]:
    """Pulling coefficient of inversion-only pumping vs collective events.

    Fully inverted atoms (pulse area pi, no modulation), random coupling
    amplitudes; the horizontal axis N tau Gamma_c is swept through g and the
    pulling coefficient is read from three cavity detunings per point.
    """
    tau = 2e-6 if desk else 20e-6
    n_mean = 500.0 if desk else 2000.0
    events = (1.0, 1.8, 3.2, 5.6, 7.5, 10.0) if desk else tuple(
        np.geomspace(1.0, 10.0, 10).round(3))
    det_mhz = (-4.0, 0.0, 4.0)
    jobs = []
    for ev in events:
        for d in det_mhz:
            cfg = _base(PumpScheme.DETUNED_SINGLE, tau, n_mean, 1.0, 0.0)
            cfg.g = coupling_for_collective_events(ev, n_mean, tau, cfg.kappa)
            cfg.beam.coupling_mode = CouplingMode.RANDOM_GAUSSIAN_MODE
            cfg.delta_ca = TWO_PI * d * 1e6
            tune_numerics(cfg, t_record=4e-3 if desk else 16e-3,
                          max_lag=1e-3 if desk else 4e-3)
            jobs.append(PresetJob(
                label=f"ev{ev:g}_dca{d:+g}", config=cfg, group="pulling",
                coord={"n_tau_gamma_c": ev, "delta_ca_mhz": d}))
    return jobs


def fig2_jobs(desk: bool) -> list[PresetJob]:
    """Detuning maps for single-pump preparation (full vs partial inversion)."""
    n_mean = 2000.0
    tau = 1.0e-6
    if desk:
        det_mhz = (-3.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 3.0)
    else:
        det_mhz = tuple(np.linspace(-3.0, 3.0, 25).round(3))
    cases = (("a", 1.0, 0.0), ("c", 0.7952, 1.4))
    jobs = []
    for tag, area, dpa in cases:
        for d in det_mhz:
            cfg = _base(PumpScheme.DETUNED_SINGLE, tau, n_mean, area, dpa)
            cfg.delta_ca = TWO_PI * d * 1e6
            tune_numerics(cfg, t_record=0.6e-3 if desk else 2e-3,
                          max_lag=40e-6 if desk else 150e-6)
            jobs.append(PresetJob(
                label=f"{tag}_dca{d:+g}", config=cfg, group=f"map_{tag}",
                coord={"delta_ca_mhz": d}))
    return jobs


def fig3_jobs(desk: bool) -> list[PresetJob]:
    """Three-peak detuning maps for three interaction times."""
    n_mean = 2000.0 if desk else 10_000.0
    taus = (0.36e-6, 0.40e-6, 0.44e-6)
    if desk:
        det_mhz = (-10.0, -5.0, 0.0, 5.0, 10.0)
    else:
        det_mhz = tuple(np.linspace(-25.0, 25.0, 26).round(2))
    jobs = []
    for tau in taus:
        for d in det_mhz:
            cfg = _base(PumpScheme.MODULATED_RESONANT, tau, n_mean, 0.0, 2.0)
            cfg.pump.tau_p = 0.0414e-6
            cfg.delta_ca = TWO_PI * d * 1e6
            tune_numerics(cfg, t_record=0.8e-3 if desk else 4e-3,
                          max_lag=50e-6 if desk else 0.5e-3)
            jobs.append(PresetJob(
                label=f"tau{tau * 1e6:.2f}_dca{d:+g}", config=cfg,
                group=f"map_tau{tau * 1e6:.2f}", coord={"delta_ca_mhz": d}))
    return jobs


def fig4_jobs(desk: bool) -> list[PresetJob]:
    """Central linewidth over the (pulse area, atom number) grid."""
    if desk:
        areas = (0.91, 0.936, 0.96, 0.993)
        ns = (250.0, 500.0, 1000.0, 2000.0, 4000.0)
    else:
        areas = (0.879, 0.91, 0.936, 0.96, 0.993, 1.02)
        ns = tuple(float(n) for n in
                   (1000, 2000, 4000, 7000, 10_000, 14_000, 20_000))
    jobs = []
    for area in areas:
        for n in ns:
            cfg = _base(PumpScheme.MODULATED_RESONANT, 0.4e-6, n, area, 2.0)
            tune_numerics(cfg, t_record=3.2e-3 if desk else 40e-3,
                          max_lag=0.4e-3 if desk else 10e-3)
            jobs.append(PresetJob(
                label=f"area{area:g}_n{n:g}", config=cfg, group="grid",
                coord={"pulse_area_pi": area, "n_mean": n}))
    return jobs


def fig5_jobs(desk: bool) -> list[PresetJob]:
    """Central linewidth versus central-peak photon number."""
    areas = (0.936, 0.96) if desk else (0.92, 0.936, 0.96, 0.993)
    if desk:
        ns = (500.0, 750.0, 1000.0, 1500.0, 2000.0, 3000.0)
    else:
        ns = tuple(float(n) for n in np.geomspace(500, 20_000, 12).round())
    jobs = []
    for area in areas:
        for n in ns:
            cfg = _base(PumpScheme.MODULATED_RESONANT, 0.4e-6, n, area, 2.0)
            tune_numerics(cfg, t_record=1.6e-3 if desk else 40e-3,
                          max_lag=0.2e-3 if desk else 10e-3)
            jobs.append(PresetJob(
                label=f"area{area:g}_n{n:g}", config=cfg, group="narrowing",
                coord={"pulse_area_pi": area, "n_mean": n}))
    return jobs


def fig6_jobs(desk: bool) -> list[PresetJob]:
    """Side-peak contrast versus pump carrier detuning, plus one spectrum."""
    n_mean = 2000.0 if desk else 10_000.0
    offsets_mhz = (-0.03, -0.015, 0.0, 0.015, 0.03)
    jobs = []
    for d in offsets_mhz:
        cfg = _base(PumpScheme.MODULATED_OFFSET, 0.4e-6, n_mean, 0.0, 2.0)
        cfg.pump.tau_p = 0.04138e-6
        cfg.pump.delta_offset = TWO_PI * d * 1e6
        tune_numerics(cfg, t_record=1.6e-3 if desk else 8e-3,
                      max_lag=0.1e-3 if desk else 0.4e-3)
        jobs.append(PresetJob(
            label=f"offset{d:+g}", config=cfg, group="contrast",
            coord={"delta_offset_mhz": d}))
    return jobs


def figure_jobs(figure_id: str, desk: bool) -> list[PresetJob]:
    builders = {"fig1": fig1_jobs, "fig2": fig2_jobs, "fig3": fig3_jobs,
                "fig4": fig4_jobs, "fig5": fig5_jobs, "fig6": fig6_jobs}
    if figure_id not in builders:
        raise ValueError(f"unknown figure id {figure_id!r}; "
                         f"expected one of {', '.join(FIGURE_IDS)}")
    return builders[figure_id](desk)
