"""Initial Bloch vectors for atoms prepared by the pump before cavity entry.

Three pumping schemes are supported:

* ``detuned_single``: a single pump detuned from the atom by delta_pa.  For a
  strong pulse (Omega >> delta_pa) the prepared state, written in the atom
  rotating frame, is

      sx0 =  2 sqrt(rho_ee (1 - rho_ee)) sin(delta_pa t0 + phi)
      sy0 = -2 sqrt(rho_ee (1 - rho_ee)) cos(delta_pa t0 + phi)
      sz0 =  2 rho_ee - 1,   rho_ee = (1 - cos(Omega tau_p)) / 2

* ``modulated_resonant``: two pump tones at -+delta_pa around resonance, i.e.
  a resonant pump with Rabi frequency modulated as Omega cos(delta_pa t).
  The pulse rotates the spin about x by the area

      A = (Omega/delta_pa) [sin delta_pa (t0+tau_p) - sin delta_pa t0]
        = Omega tau_p cos(delta_pa (t0 + tau_p/2)) sinc(delta_pa tau_p / 2)

  giving (0, -sin A, -cos A).  The short-pulse form replaces A by
  Omega tau_p cos(delta_pa t0), valid for delta_pa tau_p << 1.

* ``modulated_offset``: the same two tones with their mean shifted from the
  atom by a small carrier detuning delta.  In the atom frame

      sx0 =  sin(B) sin(delta t0 + phi)
      sy0 = -sin(B) cos(delta t0 + phi)
      sz0 = -cos(B)

  with B the (exact or short-pulse) area above.

t0 is the atom's arrival time at the pump; pump phase noise phi is added to
the pump phase delta_pa t0 (and to delta t0 for the offset scheme).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .config import PumpConfig, PumpScheme, RegimeWarning


@dataclass(frozen=True)
class BlochMean:
    """Mean Bloch vector of the prepared state (components in [-1, 1])."""
    sx0: float
    sy0: float
    sz0: float

    def as_array(self) -> np.ndarray:
        return np.array([self.sx0, self.sy0, self.sz0])

    @property
    def rho_ee(self) -> float:
        return (1.0 + self.sz0) / 2.0


def rotate_xy(sx, sy, theta):
    """Rotate the transverse components by theta (frame transformation)."""
    c, s = np.cos(theta), np.sin(theta)
    return sx * c - sy * s, sx * s + sy * c


def _pulse_area(omega, delta_pa, tau_p, phase, exact):
    """Rotation angle of the amplitude-modulated pump.

    ``phase`` is the modulation phase delta_pa*t0 (+ noise).  The exact form
    is written as a product with sinc so delta_pa -> 0 is regular.
    """
    if exact:
        half = delta_pa * tau_p / 2.0
        return omega * tau_p * np.cos(phase + half) * np.sinc(half / np.pi)
    return omega * tau_p * np.cos(phase)


def mean_bloch_arrays(cfg: PumpConfig, t0, phi_noise):
    """Vectorized mean Bloch components for arrival times t0 and phase noise.

    Returns (sx0, sy0, sz0) arrays broadcast over the inputs.
    """
    t0 = np.asarray(t0, dtype=np.float64)
    phi = np.asarray(phi_noise, dtype=np.float64)

    if cfg.scheme is PumpScheme.DETUNED_SINGLE:
        rho_ee = (1.0 - np.cos(cfg.omega * cfg.tau_p)) / 2.0
        trans = 2.0 * np.sqrt(rho_ee * (1.0 - rho_ee))
        phase = cfg.delta_pa * t0 + phi
        sx0 = trans * np.sin(phase)
        sy0 = -trans * np.cos(phase)
        sz0 = np.full_like(phase, 2.0 * rho_ee - 1.0)
        return sx0, sy0, sz0

    mod_phase = cfg.delta_pa * t0 + phi
    area = _pulse_area(cfg.omega, cfg.delta_pa, cfg.tau_p, mod_phase, cfg.use_exact)

    if cfg.scheme is PumpScheme.MODULATED_RESONANT:
        return np.zeros_like(area), -np.sin(area), -np.cos(area)

    if cfg.scheme is PumpScheme.MODULATED_OFFSET:
        carrier = cfg.delta_offset * t0 + phi
        sb = np.sin(area)
        return sb * np.sin(carrier), -sb * np.cos(carrier), -np.cos(area)

    raise ValueError(f"unknown pump scheme {cfg.scheme}")


def _scalar(cfg: PumpConfig, t0: float, phi_noise: float) -> BlochMean:
    sx, sy, sz = mean_bloch_arrays(cfg, t0, phi_noise)
    return BlochMean(float(sx), float(sy), float(sz))


def prep_detuned_single(cfg: PumpConfig, t0: float, phi_noise: float = 0.0) -> BlochMean:
    """Prepared state for the single detuned pump (strong-pulse form)."""
    assert cfg.scheme is PumpScheme.DETUNED_SINGLE
    if cfg.omega < 5.0 * abs(cfg.delta_pa):
        warnings.warn("detuned_single preparation assumes Omega >> delta_pa",
                      RegimeWarning, stacklevel=2)
    return _scalar(cfg, t0, phi_noise)


def prep_modulated(cfg: PumpConfig, t0: float, phi_noise: float = 0.0) -> BlochMean:
    """Prepared state for the amplitude-modulated resonant pump."""
    assert cfg.scheme is PumpScheme.MODULATED_RESONANT
    return _scalar(cfg, t0, phi_noise)


def prep_modulated_offset(cfg: PumpConfig, t0: float, phi_noise: float = 0.0) -> BlochMean:
    """Prepared state for the modulated pump with carrier detuning."""
    assert cfg.scheme is PumpScheme.MODULATED_OFFSET
    return _scalar(cfg, t0, phi_noise)


def prep_mean(cfg: PumpConfig, t0: float, phi_noise: float = 0.0) -> BlochMean:
    """Scheme-dispatching mean Bloch vector."""
    return _scalar(cfg, t0, phi_noise)


def sample_phase_noise(linewidth: float, tau_p: float, rng: np.random.Generator,
                       size=None):
    """Gaussian pump phase noise with standard deviation sqrt(linewidth*tau_p).

    ``linewidth`` is the pump linewidth in rad/s.  With linewidth = 0 the
    draw is exactly 0 (the stream still advances identically).
    """
    if linewidth < 0:
        raise ValueError("linewidth must be >= 0")
    return rng.normal(0.0, np.sqrt(linewidth * tau_p), size=size)


def bloch_ode_oracle(cfg: PumpConfig, t0: float, phi_noise: float = 0.0,
                     rtol: float = 1e-11, atol: float = 1e-13) -> BlochMean:
    """Integrate the pump-stage Bloch equations numerically (test oracle).

    Starts from (0, 0, -1), integrates over the pump interaction window and
    applies the frame transformation back to the atom frame.  Kept
    independent of the closed forms above so it can check them.
    """
    scheme = cfg.scheme
    y0 = [0.0, 0.0, -1.0]

    if scheme is PumpScheme.DETUNED_SINGLE:
        # Autonomous in the pump frame; t0 only enters the frame rotation.
        def rhs(_t, y):
            sx, sy, sz = y
            return [cfg.delta_pa * sy,
                    -cfg.delta_pa * sx + cfg.omega * sz,
                    -cfg.omega * sy]
        sol = solve_ivp(rhs, (0.0, cfg.tau_p), y0, method="DOP853",
                        rtol=rtol, atol=atol)
        if not sol.success:
            raise RuntimeError(f"Bloch oracle integration failed: {sol.message}")
        sx, sy, sz = sol.y[:, -1]
        theta = cfg.delta_pa * (t0 + cfg.tau_p) + phi_noise
        sx, sy = rotate_xy(sx, sy, theta)
        return BlochMean(float(sx), float(sy), float(sz))

    # Modulated schemes: the modulation phase shifts by phi_noise via the
    # start time; delta_pa = 0 reduces to a plain resonant pulse.
    t_start = t0 + (phi_noise / cfg.delta_pa if cfg.delta_pa != 0.0 else 0.0)
    delta = cfg.delta_offset if scheme is PumpScheme.MODULATED_OFFSET else 0.0

    def rhs(t, y):
        sx, sy, sz = y
        drive = cfg.omega * np.cos(cfg.delta_pa * t)
        return [delta * sy,
                -delta * sx + drive * sz,
                -drive * sy]

    sol = solve_ivp(rhs, (t_start, t_start + cfg.tau_p), y0, method="DOP853",
                    rtol=rtol, atol=atol)
    if not sol.success:
        raise RuntimeError(f"Bloch oracle integration failed: {sol.message}")
    sx, sy, sz = sol.y[:, -1]
    if scheme is PumpScheme.MODULATED_OFFSET:
        theta = delta * (t0 + cfg.tau_p) + phi_noise
        sx, sy = rotate_xy(sx, sy, theta)
    return BlochMean(float(sx), float(sy), float(sz))
