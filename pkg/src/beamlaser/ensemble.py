"""Population bookkeeping for atoms transiting the cavity.

Atoms are injected as a Poisson stream at rate n_mean/tau (a deterministic
staggered mode exists for variance studies), initialized with projection
noise around the pump-prepared mean, assigned a Doppler shift and a coupling
amplitude, and retired after the interaction time tau.  The collective spin
is the coupling-weighted sum over the active set.

State is kept as structure-of-arrays in a sliding window [head, tail) of
preallocated buffers; atoms retire strictly FIFO because every lifetime is
the same tau.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import CouplingMode, InjectionMode, SimConfig
from .pump import mean_bloch_arrays, sample_phase_noise
from .rates import derived_rates_arrays


@dataclass
class AtomState:
    """One transiting atom (diagnostic view; the simulation uses arrays)."""
    eta: float        # coupling amplitude in [0, 1]
    sx: float
    sy: float
    sz: float
    doppler: float    # k*v_tr (rad/s), already folded into the atom's rates
    t_exit: float     # s


@dataclass(frozen=True)
class CollectiveSpin:
    jx: float
    jy: float

    @property
    def j_minus(self) -> complex:
        return 0.5 * (self.jx - 1j * self.jy)

    @property
    def j_plus(self) -> complex:
        return 0.5 * (self.jx + 1j * self.jy)


@dataclass
class AtomBatch:
    """Freshly drawn atom attributes, one entry per injected atom."""
    sx: np.ndarray
    sy: np.ndarray
    sz: np.ndarray
    eta: np.ndarray
    gamma_delta: np.ndarray
    gamma_c: np.ndarray
    doppler: np.ndarray

    def __len__(self) -> int:
        return self.sx.size


def project_spins(mx, my, mz, rng: np.random.Generator):
    """Project mean Bloch components onto +-1 (measurement projection noise).

    Each component independently becomes +1 with probability (1 + mean)/2,
    so its expectation equals the mean.
    """
    mx, my, mz = (np.asarray(a, dtype=np.float64) for a in (mx, my, mz))
    for name, comp in (("sx", mx), ("sy", my), ("sz", mz)):
        if np.any(np.abs(comp) > 1.0 + 1e-12):
            raise ValueError(f"mean {name} outside [-1, 1]")
    u = rng.random((3,) + mx.shape)
    sx = np.where(u[0] < (1.0 + mx) / 2.0, 1.0, -1.0)
    sy = np.where(u[1] < (1.0 + my) / 2.0, 1.0, -1.0)
    sz = np.where(u[2] < (1.0 + mz) / 2.0, 1.0, -1.0)
    return sx, sy, sz


def project_spin(mean, rng: np.random.Generator):
    """Scalar projection of a BlochMean-like (sx0, sy0, sz0) onto (+-1)^3."""
    sx, sy, sz = project_spins(mean.sx0, mean.sy0, mean.sz0, rng)
    return float(sx), float(sy), float(sz)


class PumpPhaseWalk:
    """Pump phase as a Wiener process sampled at atom arrival times.

    The pump linewidth enters as phase diffusion: between arrivals t and t'
    the pump phase gains an independent Gaussian increment of variance
    linewidth * (t' - t), so the increment over one pump transit tau_p has
    the standard deviation sqrt(linewidth * tau_p).  Atoms arriving within
    the same step share the phase, which is what gives the superradiant
    side peaks the pump linewidth.
    """

    def __init__(self, linewidth: float):
        self.linewidth = linewidth
        self.t_last: float | None = None
        self.phi_last = 0.0

    def sample(self, t0: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        z = rng.normal(0.0, 1.0, t0.size)
        if t0.size == 0:
            return np.empty(0)
        prev = t0[0] if self.t_last is None else self.t_last
        dt = np.diff(t0, prepend=prev)
        phi = self.phi_last + np.cumsum(z * np.sqrt(self.linewidth * dt))
        self.t_last = float(t0[-1])
        self.phi_last = float(phi[-1])
        return phi


def draw_atom_batch(cfg: SimConfig, t0: np.ndarray, rng: np.random.Generator,
                    phase_walk: PumpPhaseWalk | None = None) -> AtomBatch:
    """Draw all per-atom attributes for atoms arriving at the pump at times t0.

    Draw order (doppler, coupling, pump phase, projection uniforms) is part
    of the determinism contract; it is identical for any batch split.
    """
    m = t0.size
    doppler = rng.normal(cfg.beam.doppler_mean, cfg.doppler_width(), m)
    if cfg.beam.coupling_mode is CouplingMode.RANDOM_GAUSSIAN_MODE:
        # Stand-in mode profile: radius uniform over the waist footprint,
        # eta = exp(-r^2/w^2), so eta = exp(-u) with u uniform in [0, 1).
        eta = np.exp(-rng.random(m))
    else:
        eta = np.ones(m)
    if phase_walk is not None:
        phi = phase_walk.sample(t0, rng)
    else:
        phi = sample_phase_noise(cfg.pump.linewidth, cfg.pump.tau_p, rng, size=m)
    mx, my, mz = mean_bloch_arrays(cfg.pump, t0, phi)
    sx, sy, sz = project_spins(mx, my, mz, rng)
    gd, gc = derived_rates_arrays(cfg.delta_ca - doppler, cfg.g, cfg.kappa)
    return AtomBatch(sx, sy, sz, eta, gd, gc, doppler)


class AtomEnsemble:
    """Active-atom set owned by a single simulation thread."""

    def __init__(self, cfg: SimConfig, capacity: int | None = None):
        self.cfg = cfg
        if capacity is None:
            n = cfg.n_mean
            capacity = int(2 * n + 10 * np.sqrt(n) + 64)
        self._cap = capacity
        self.sx = np.zeros(capacity)
        self.sy = np.zeros(capacity)
        self.sz = np.zeros(capacity)
        self.eta = np.zeros(capacity)
        self.gamma_delta = np.zeros(capacity)
        self.gamma_c = np.zeros(capacity)
        self.doppler = np.zeros(capacity)
        self.t_exit = np.zeros(capacity)
        self.head = 0
        self.tail = 0
        self._stagger_carry = 0.0
        self.phase_walk = PumpPhaseWalk(cfg.pump.linewidth)

    def __len__(self) -> int:
        return self.tail - self.head

    def _ensure_room(self, m: int) -> None:
        if self.tail + m <= self._cap:
            return
        n = len(self)
        if n + m > self._cap:
            new_cap = max(2 * self._cap, n + m + 64)
            for name in ("sx", "sy", "sz", "eta", "gamma_delta", "gamma_c",
                         "doppler", "t_exit"):
                arr = getattr(self, name)
                grown = np.zeros(new_cap)
                grown[:n] = arr[self.head:self.tail]
                setattr(self, name, grown)
            self._cap = new_cap
        else:
            for name in ("sx", "sy", "sz", "eta", "gamma_delta", "gamma_c",
                         "doppler", "t_exit"):
                arr = getattr(self, name)
                arr[:n] = arr[self.head:self.tail]
        self.head, self.tail = 0, n

    def inject_atoms(self, now: float, dt: float, rate: float,
                     rng: np.random.Generator) -> int:
        """Inject new atoms for one step; returns the injection count.

        Count is Poisson(rate*dt) (or the staggered deterministic schedule);
        each atom is prepared by the pump with arrival time now - tau_p and
        interacts until now + tau.
        """
        if self.cfg.beam.injection is InjectionMode.STAGGERED:
            x = rate * dt + self._stagger_carry
            m = int(x)
            self._stagger_carry = x - m
        else:
            m = int(rng.poisson(rate * dt))
        if m == 0:
            # Keep the per-step stream layout independent of the count.
            draw_atom_batch(self.cfg, np.empty(0), rng, self.phase_walk)
            return 0
        t0 = np.full(m, now - self.cfg.pump.tau_p)
        batch = draw_atom_batch(self.cfg, t0, rng, self.phase_walk)
        self._ensure_room(m)
        sl = slice(self.tail, self.tail + m)
        self.sx[sl] = batch.sx
        self.sy[sl] = batch.sy
        self.sz[sl] = batch.sz
        self.eta[sl] = batch.eta
        self.gamma_delta[sl] = batch.gamma_delta
        self.gamma_c[sl] = batch.gamma_c
        self.doppler[sl] = batch.doppler
        self.t_exit[sl] = now + self.cfg.tau
        self.tail += m
        return m

    def retire_atoms(self, now: float) -> int:
        """Remove atoms whose interaction time has elapsed; returns the count."""
        h = self.head
        # FIFO: exit times are monotone in injection order.
        tol = self.cfg.numerics.dt * 1e-6
        while h < self.tail and self.t_exit[h] <= now + tol:
            h += 1
        removed = h - self.head
        self.head = h
        return removed

    def collective_spin(self) -> CollectiveSpin:
        """Coupling-weighted sums Jx = sum eta*sx, Jy = sum eta*sy."""
        sl = slice(self.head, self.tail)
        jx = float(np.sum(self.eta[sl] * self.sx[sl]))
        jy = float(np.sum(self.eta[sl] * self.sy[sl]))
        return CollectiveSpin(jx, jy)

    def active_views(self):
        """Views of the active window (sx, sy, sz, eta, gamma_delta, gamma_c)."""
        sl = slice(self.head, self.tail)
        return (self.sx[sl], self.sy[sl], self.sz[sl], self.eta[sl],
                self.gamma_delta[sl], self.gamma_c[sl])

    def atoms(self):
        """Diagnostic list of AtomState for the active window."""
        sl = slice(self.head, self.tail)
        return [AtomState(self.eta[i], self.sx[i], self.sy[i], self.sz[i],
                          self.doppler[i], self.t_exit[i])
                for i in range(self.head, self.tail)]
