"""Monte-Carlo simulator of a superradiant beam laser in a bad cavity.

A beam of two-level atoms, prepared in pump-defined superposition states,
crosses a strongly damped cavity.  With the cavity field adiabatically
eliminated, the atoms evolve under stochastic semiclassical Bloch equations
driven by the collective spin; the recorded collective field yields the
emission spectrum, its linewidth, the frequency-pulling coefficient and the
side-peak contrast used for pump locking.
"""

__version__ = "0.1.0"

from .config import (BeamConfig, ConfigError, CouplingMode, InjectionMode,
                     NumericsConfig, PumpConfig, PumpScheme, RegimeWarning,
                     SimConfig, apply_overrides, config_hash, load_config,
                     save_config, validate)
from .dynamics import (FieldRecord, NoiseSample, drift, photon_number,
                       read_record, rk4_step, run_trajectory, sample_noise,
                       write_record)
from .ensemble import (AtomEnsemble, AtomState, CollectiveSpin, draw_atom_batch,
                       project_spin, project_spins)
from .pump import (BlochMean, bloch_ode_oracle, prep_detuned_single,
                   prep_mean, prep_modulated, prep_modulated_offset,
                   sample_phase_noise)
from .rates import DerivedRates, derived_rates, derived_rates_arrays
from .spectrum import (CorrelationEstimate, LinewidthFit, Peak, PeakSet,
                       PullingResult, SpectrumResult, contrast_ratio,
                       find_peaks, fit_linewidth, g1_estimate, psd,
                       pulling_coefficient, write_spectrum)
from .sweep import (PointResult, SweepResult, SweepSpec, analyze_record,
                    derived_seed, run_point, run_sweep, write_metrics,
                    write_sweep_table)

__all__ = [name for name in dir() if not name.startswith("_")]
