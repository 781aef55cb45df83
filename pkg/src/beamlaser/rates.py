"""Adiabatic-elimination rates of the cavity-mediated atom dynamics.

With the cavity field eliminated, each atom couples to the collective spin
through two rates evaluated at its effective cavity-atom detuning D
(detuning minus the atom's Doppler shift):

    gamma_delta(D) = 2 g^2 D / (D^2 + (kappa/2)^2)     dispersive part
    gamma_c(D)     = g^2 kappa / (D^2 + (kappa/2)^2)   dissipative part
    gamma_0        = 4 g^2 / kappa                      gamma_c at D = 0

gamma_delta is odd in D, gamma_c even with its maximum gamma_0 at D = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class DerivedRates:
    gamma_delta: float  # rad/s
    gamma_c: float      # rad/s
    gamma_0: float      # rad/s


def derived_rates(delta_eff: float, g: float, kappa: float) -> DerivedRates:
    """Evaluate the eliminated-field rates at effective detuning delta_eff.

    Parameters are angular frequencies (rad/s); kappa is the full cavity
    linewidth, g the half-width coupling.
    """
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    if not (math.isfinite(delta_eff) and math.isfinite(g) and math.isfinite(kappa)):
        raise ValueError("non-finite input to derived_rates")
    denom = delta_eff**2 + (kappa / 2.0) ** 2
    return DerivedRates(
        gamma_delta=2.0 * g**2 * delta_eff / denom,
        gamma_c=g**2 * kappa / denom,
        gamma_0=4.0 * g**2 / kappa,
    )


def derived_rates_arrays(delta_eff: np.ndarray, g: float, kappa: float):
    """Vectorized (gamma_delta, gamma_c) for per-atom effective detunings."""
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    delta_eff = np.asarray(delta_eff, dtype=np.float64)
    denom = delta_eff**2 + (kappa / 2.0) ** 2
    return 2.0 * g**2 * delta_eff / denom, g**2 * kappa / denom
