"""Stochastic semiclassical dynamics of the transiting atoms.

Each atom's Bloch vector is driven by the collective spin through its
eliminated-cavity rates (gamma_delta, gamma_c) and by the vacuum noise
entering through the cavity mirrors:

    dsx/dt =  (gc/2) e [Jx sz - e sx (sz+1)] - (gd/2) e [Jy sz - e sy (sz+1)]
              - (gc/sqrt(g0)) e sz xi_p + (gd/sqrt(g0)) e sz xi_q
    dsy/dt =  (gc/2) e [Jy sz - e sy (sz+1)] + (gd/2) e [Jx sz - e sx (sz+1)]
              + (gc/sqrt(g0)) e sz xi_q - (gd/sqrt(g0)) e sz xi_p
    dsz/dt = -(gc/2) e (Jx sx + Jy sy + 2 e sz) + (gd/2) e (Jy sx - Jx sy)
              + (gc/sqrt(g0)) e (sx xi_p - sy xi_q)
              + (gd/sqrt(g0)) e (sx xi_q + sy xi_p)

with e the atom's coupling amplitude and g0 the resonant rate 4g^2/kappa.
The small-number corrections (the e^2 terms and 2 e sz) are always kept.
The noise coefficient of the last dsz/dt line is gd/sqrt(g0), matching the
operator-level equation it descends from, and the formally imaginary
inversion term has no real part and is dropped (keep_imag_term documents
that it would contribute nothing to real states).

xi_p, xi_q are independent white noises, piecewise constant over a step with
variance 1/dt, frozen across the four RK4 substages.  The collective spin is
recomputed at every substage by default; ``paper_literal`` freezes it across
the step instead.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .config import SimConfig, validate
from .ensemble import AtomEnsemble, CollectiveSpin
from .rates import DerivedRates


@dataclass(frozen=True)
class NoiseSample:
    """One step's white-noise amplitudes (variance 1/dt each when on)."""
    xi_p: float
    xi_q: float


def sample_noise(dt: float, rng: np.random.Generator, noise_on: bool = True) -> NoiseSample:
    if dt <= 0:
        raise ValueError("dt must be positive")
    if not noise_on:
        return NoiseSample(0.0, 0.0)
    scale = 1.0 / math.sqrt(dt)
    v = rng.normal(0.0, scale, 2)
    return NoiseSample(float(v[0]), float(v[1]))


def drift_arrays(sx, sy, sz, eta, gamma_delta, gamma_c, gamma_0,
                 jx, jy, xi_p, xi_q):
    """Right-hand sides for arrays of atoms at fixed collective spin (jx, jy)."""
    inv = 1.0 / math.sqrt(gamma_0)
    zp1 = sz + 1.0
    hx = jx * sz - eta * sx * zp1
    hy = jy * sz - eta * sy * zp1
    u = eta * inv
    dsx = 0.5 * eta * (gamma_c * hx - gamma_delta * hy) \
        + u * sz * (gamma_delta * xi_q - gamma_c * xi_p)
    dsy = 0.5 * eta * (gamma_c * hy + gamma_delta * hx) \
        + u * sz * (gamma_c * xi_q - gamma_delta * xi_p)
    dsz = -0.5 * eta * (gamma_c * (jx * sx + jy * sy + 2.0 * eta * sz)
                        - gamma_delta * (jy * sx - jx * sy)) \
        + u * (gamma_c * (sx * xi_p - sy * xi_q)
               + gamma_delta * (sx * xi_q + sy * xi_p))
    return dsx, dsy, dsz


def drift(atom, collective: CollectiveSpin, rates: DerivedRates,
          noise: NoiseSample):
    """Single-atom drift (dsx/dt, dsy/dt, dsz/dt); convenience wrapper."""
    dsx, dsy, dsz = drift_arrays(
        np.float64(atom.sx), np.float64(atom.sy), np.float64(atom.sz),
        np.float64(atom.eta), rates.gamma_delta, rates.gamma_c, rates.gamma_0,
        collective.jx, collective.jy, noise.xi_p, noise.xi_q)
    return float(dsx), float(dsy), float(dsz)


def rk4_step(ens: AtomEnsemble, noise: NoiseSample, dt: float,
             gamma_0: float, paper_literal: bool = False) -> CollectiveSpin:
    """Advance every active atom by one classic RK4 step (in place).

    The noise sample is frozen for the whole step.  Returns the collective
    spin evaluated after the update.  Raises on non-finite states.
    """
    sx, sy, sz, eta, gd, gc = ens.active_views()
    if sx.size == 0:
        return CollectiveSpin(0.0, 0.0)

    def deriv(x, y, z, frozen_j=None):
        if frozen_j is None:
            jx = float(np.sum(eta * x))
            jy = float(np.sum(eta * y))
        else:
            jx, jy = frozen_j
        return drift_arrays(x, y, z, eta, gd, gc, gamma_0, jx, jy,
                            noise.xi_p, noise.xi_q)

    frozen = None
    if paper_literal:
        frozen = (float(np.sum(eta * sx)), float(np.sum(eta * sy)))

    k1 = deriv(sx, sy, sz, frozen)
    k2 = deriv(sx + 0.5 * dt * k1[0], sy + 0.5 * dt * k1[1],
               sz + 0.5 * dt * k1[2], frozen)
    k3 = deriv(sx + 0.5 * dt * k2[0], sy + 0.5 * dt * k2[1],
               sz + 0.5 * dt * k2[2], frozen)
    k4 = deriv(sx + dt * k3[0], sy + dt * k3[1], sz + dt * k3[2], frozen)

    sx += (dt / 6.0) * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
    sy += (dt / 6.0) * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
    sz += (dt / 6.0) * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])

    jx = float(np.sum(eta * sx))
    jy = float(np.sum(eta * sy))
    if not (math.isfinite(jx) and math.isfinite(jy)):
        raise RuntimeError("non-finite atom state during RK4 step")
    return CollectiveSpin(jx, jy)


def photon_number(collective: CollectiveSpin, rates: DerivedRates, g: float) -> float:
    """Intracavity photon-number estimate from the collective spin.

    n = |gamma_delta + i gamma_c|^2 / (4 g^2) * |J-|^2, the signal part of
    the eliminated field (the vacuum noise contribution is excluded).
    """
    j2 = (collective.jx**2 + collective.jy**2) / 4.0
    return (rates.gamma_delta**2 + rates.gamma_c**2) / (4.0 * g**2) * j2


@dataclass
class FieldRecord:
    """Collective-field time series recorded after burn-in."""
    t: np.ndarray          # s, uniform grid with the recording stride
    j_plus: np.ndarray     # complex (Jx + i Jy)/2
    n_phot: np.ndarray     # photon-number estimate at the ensemble detuning
    dt_record: float       # grid spacing (s)
    config_hash: str = ""
    seed: int = 0

    def __len__(self) -> int:
        return self.t.size


def write_record(record: FieldRecord, path: str) -> None:
    """Write the field record as a tab-separated table with a header."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# beamlaser field record\n")
        fh.write(f"# config_hash={record.config_hash} seed={record.seed} "
                 f"dt_record={record.dt_record:.12g}\n")
        fh.write("t_s\tre_j_plus\tim_j_plus\tn_phot\n")
        for t, j, n in zip(record.t, record.j_plus, record.n_phot):
            fh.write(f"{t:.12g}\t{j.real:.12g}\t{j.imag:.12g}\t{n:.12g}\n")


def read_record(path: str) -> FieldRecord:
    meta = {"config_hash": "", "seed": 0, "dt_record": 0.0}
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.readlines()
    body = []
    for line in lines:
        if line.startswith("#"):
            for tok in line[1:].split():
                if "=" in tok:
                    k, v = tok.split("=", 1)
                    if k in meta:
                        meta[k] = type(meta[k])(v) if k != "config_hash" else v
            continue
        if line.strip() and not line.startswith("t_s"):
            body.append([float(x) for x in line.split()])
    arr = np.array(body) if body else np.zeros((0, 4))
    return FieldRecord(t=arr[:, 0], j_plus=arr[:, 1] + 1j * arr[:, 2],
                       n_phot=arr[:, 3], dt_record=float(meta["dt_record"]),
                       config_hash=meta["config_hash"], seed=int(meta["seed"]))


def run_trajectory(cfg: SimConfig) -> FieldRecord:
    """Simulate one trajectory and return the recorded collective field.

    Burn-in is simulated but not recorded; afterwards the post-step collective
    spin is recorded every ``record_every`` steps for t_record.  Deterministic
    for a given seed and engine.
    """
    validate(cfg)
    from . import _engine
    return _engine.run(cfg)
