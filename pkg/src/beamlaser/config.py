"""Run configuration: dataclasses, validation, config-file parsing and hashing.

All frequencies are stored internally as angular frequencies (rad/s) and all
times in seconds.  Config files state frequencies in ordinary units (MHz/kHz,
converted by 2*pi on load) and times in us/ns, which matches how such
parameters are usually quoted.
"""

from __future__ import annotations

import configparser
import copy
import hashlib
import io
import math
import warnings
from dataclasses import dataclass, field
from enum import Enum

TWO_PI = 2.0 * math.pi


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


class RegimeWarning(UserWarning):
    """A parameter set is outside the regime the model presumes (run continues)."""


class PumpScheme(Enum):
    DETUNED_SINGLE = "detuned_single"
    MODULATED_RESONANT = "modulated_resonant"
    MODULATED_OFFSET = "modulated_offset"


class CouplingMode(Enum):
    UNIFORM = "uniform"
    RANDOM_GAUSSIAN_MODE = "random_gaussian_mode"


class InjectionMode(Enum):
    POISSON = "poisson"
    STAGGERED = "staggered"


@dataclass
class PumpConfig:
    scheme: PumpScheme = PumpScheme.MODULATED_RESONANT
    omega: float = TWO_PI * 12e6       # pump Rabi frequency (rad/s)
    tau_p: float = 0.0414e-6           # pump interaction time (s)
    delta_pa: float = TWO_PI * 2e6     # pump-atom detuning / modulation frequency (rad/s)
    delta_offset: float = 0.0          # carrier detuning, modulated_offset only (rad/s)
    linewidth: float = TWO_PI * 20e3   # pump linewidth (rad/s)
    use_exact: bool = True             # evaluate the exact bracket instead of the short-pulse form


@dataclass
class BeamConfig:
    doppler_width: float = -1.0        # k*v_tr spread (rad/s); <0 means default 2*pi*0.1/tau
    doppler_mean: float = 0.0          # k*mean(v_tr) (rad/s)
    coupling_mode: CouplingMode = CouplingMode.UNIFORM
    injection: InjectionMode = InjectionMode.POISSON


@dataclass
class NumericsConfig:
    dt: float = 1.25e-9                # RK4 step (s)
    t_burn: float = 10e-6              # discarded before recording (s)
    t_record: float = 400e-6           # recording span (s)
    seed: int = 0
    noise_on: bool = True
    record_every: int = 1              # record stride, in steps
    max_lag: float = 0.0               # correlation lag span (s); 0 means t_record/4
    window: str = "none"               # lag window for the spectrum: none | hann
    engine: str = "auto"               # auto | numba | numpy
    paper_literal: bool = False        # freeze J across RK4 substages
    keep_imag_term: bool = False       # documented no-op on real states


@dataclass
class SimConfig:
    kappa: float = TWO_PI * 50e6       # cavity decay, full width (rad/s)
    g: float = TWO_PI * 0.25e6         # atom-cavity coupling, half width (rad/s)
    delta_ca: float = 0.0              # cavity-atom detuning (rad/s)
    tau: float = 0.4e-6                # atom-cavity interaction time (s)
    n_mean: float = 2000.0             # target mean atom number in the cavity
    pump: PumpConfig = field(default_factory=PumpConfig)
    beam: BeamConfig = field(default_factory=BeamConfig)
    numerics: NumericsConfig = field(default_factory=NumericsConfig)

    def doppler_width(self) -> float:
        """Doppler spread actually used: explicit value, or 2*pi*0.1/tau."""
        if self.beam.doppler_width >= 0.0:
            return self.beam.doppler_width
        return TWO_PI * 0.1 / self.tau

    def injection_rate(self) -> float:
        """Atom injection rate n_mean/tau (1/s)."""
        return self.n_mean / self.tau

    def gamma_0(self) -> float:
        """Resonant collective emission rate 4 g^2 / kappa (rad/s)."""
        return 4.0 * self.g**2 / self.kappa


# ---------------------------------------------------------------------------
# Validation

def validate(cfg: SimConfig) -> None:
    """Check invariants; raise ConfigError on hard violations, warn on regime issues."""
    if not all(map(math.isfinite, (cfg.kappa, cfg.g, cfg.delta_ca, cfg.tau, cfg.n_mean))):
        raise ConfigError("non-finite cavity/beam parameter")
    if cfg.kappa <= 0 or cfg.g <= 0 or cfg.tau <= 0:
        raise ConfigError("kappa, g and tau must be positive")
    if cfg.n_mean < 1:
        raise ConfigError("n_mean must be >= 1")

    p = cfg.pump
    if p.omega <= 0 or p.tau_p <= 0:
        raise ConfigError("pump omega and tau_p must be positive")
    if p.linewidth < 0:
        raise ConfigError("pump linewidth must be >= 0")
    if p.scheme is PumpScheme.MODULATED_OFFSET and abs(p.delta_offset) >= p.delta_pa:
        raise ConfigError("modulated_offset requires |delta_offset| < delta_pa")

    b = cfg.beam
    if b.doppler_width >= 0 and not math.isfinite(b.doppler_width):
        raise ConfigError("non-finite doppler_width")

    n = cfg.numerics
    if n.dt <= 0:
        raise ConfigError("dt must be positive")
    if n.dt > cfg.tau / 50.0 * (1.0 + 1e-12):
        raise ConfigError(f"dt={n.dt:g} exceeds tau/50={cfg.tau / 50.0:g}")
    fastest = max(cfg.gamma_0() * cfg.n_mean, p.delta_pa, abs(cfg.delta_ca),
                  cfg.doppler_width())
    if n.dt * fastest >= 0.1:
        raise ConfigError(
            f"dt*max(Gamma_0*N, delta_pa, |delta_ca|, doppler_width) = "
            f"{n.dt * fastest:.3g} >= 0.1; reduce dt below {0.1 / fastest:.3g} s")
    if n.t_burn < 0 or n.t_record < 0:
        raise ConfigError("t_burn and t_record must be >= 0")
    if n.record_every < 1:
        raise ConfigError("record_every must be >= 1")
    if n.max_lag < 0:
        raise ConfigError("max_lag must be >= 0")
    if n.window not in ("none", "hann"):
        raise ConfigError(f"unknown window {n.window!r}")
    if n.engine not in ("auto", "numba", "numpy"):
        raise ConfigError(f"unknown engine {n.engine!r}")

    # Adiabatic elimination of the field presumes kappa >> sqrt(N) g.
    if cfg.kappa < 10.0 * math.sqrt(cfg.n_mean) * cfg.g:
        warnings.warn(
            f"bad-cavity condition marginal: kappa/(sqrt(N) g) = "
            f"{cfg.kappa / (math.sqrt(cfg.n_mean) * cfg.g):.2f} < 10",
            RegimeWarning, stacklevel=2)
    if p.scheme is PumpScheme.DETUNED_SINGLE and p.omega < 5.0 * abs(p.delta_pa):
        warnings.warn(
            "detuned_single preparation assumes Omega >> delta_pa "
            f"(Omega/delta_pa = {p.omega / abs(p.delta_pa):.2f})",
            RegimeWarning, stacklevel=2)


# ---------------------------------------------------------------------------
# Config file schema.  Sections/keys are fixed; unknown ones are errors.

_SCHEMA = {
    "cavity": ("kappa_mhz", "g_mhz", "delta_ca_mhz"),
    "pump": ("scheme", "omega_mhz", "tau_p_us", "delta_pa_mhz",
             "delta_offset_mhz", "linewidth_khz", "use_exact"),
    "beam": ("n_mean", "tau_us", "doppler_width_khz", "doppler_mean_khz",
             "coupling_mode", "injection"),
    "numerics": ("dt_ns", "t_burn_us", "t_record_us", "seed", "noise_on",
                 "record_every", "max_lag_us", "window", "engine",
                 "paper_literal", "keep_imag_term"),
}


def _parse_bool(s: str) -> bool:
    v = s.strip().lower()
    if v in ("true", "1", "yes", "on"):
        return True
    if v in ("false", "0", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {s!r}")


def config_to_doc(cfg: SimConfig) -> dict[str, dict[str, str]]:
    """Serialize to the file representation (sections of key=value strings)."""
    f = lambda x: f"{x:.12g}"
    doc = {
        "cavity": {
            "kappa_mhz": f(cfg.kappa / TWO_PI / 1e6),
            "g_mhz": f(cfg.g / TWO_PI / 1e6),
            "delta_ca_mhz": f(cfg.delta_ca / TWO_PI / 1e6),
        },
        "pump": {
            "scheme": cfg.pump.scheme.value,
            "omega_mhz": f(cfg.pump.omega / TWO_PI / 1e6),
            "tau_p_us": f(cfg.pump.tau_p / 1e-6),
            "delta_pa_mhz": f(cfg.pump.delta_pa / TWO_PI / 1e6),
            "delta_offset_mhz": f(cfg.pump.delta_offset / TWO_PI / 1e6),
            "linewidth_khz": f(cfg.pump.linewidth / TWO_PI / 1e3),
            "use_exact": str(cfg.pump.use_exact).lower(),
        },
        "beam": {
            "n_mean": f(cfg.n_mean),
            "tau_us": f(cfg.tau / 1e-6),
            "doppler_width_khz": f(cfg.beam.doppler_width / TWO_PI / 1e3)
                                 if cfg.beam.doppler_width >= 0 else "default",
            "doppler_mean_khz": f(cfg.beam.doppler_mean / TWO_PI / 1e3),
            "coupling_mode": cfg.beam.coupling_mode.value,
            "injection": cfg.beam.injection.value,
        },
        "numerics": {
            "dt_ns": f(cfg.numerics.dt / 1e-9),
            "t_burn_us": f(cfg.numerics.t_burn / 1e-6),
            "t_record_us": f(cfg.numerics.t_record / 1e-6),
            "seed": str(cfg.numerics.seed),
            "noise_on": str(cfg.numerics.noise_on).lower(),
            "record_every": str(cfg.numerics.record_every),
            "max_lag_us": f(cfg.numerics.max_lag / 1e-6),
            "window": cfg.numerics.window,
            "engine": cfg.numerics.engine,
            "paper_literal": str(cfg.numerics.paper_literal).lower(),
            "keep_imag_term": str(cfg.numerics.keep_imag_term).lower(),
        },
    }
    return doc


def doc_to_config(doc: dict[str, dict[str, str]]) -> SimConfig:
    """Build a SimConfig from the file representation, checking the schema."""
    for section in doc:
        if section not in _SCHEMA:
            raise ConfigError(f"unknown config section [{section}]")
        for key in doc[section]:
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")

    cfg = SimConfig()

    def num(section: str, key: str, default: float | None = None) -> float:
        raw = doc.get(section, {}).get(key)
        if raw is None:
            if default is None:
                raise ConfigError(f"missing required key {section}.{key}")
            return default
        try:
            return float(raw)
        except ValueError as exc:
            raise ConfigError(f"{section}.{key}: not a number: {raw!r}") from exc

    cfg.kappa = TWO_PI * 1e6 * num("cavity", "kappa_mhz")
    cfg.g = TWO_PI * 1e6 * num("cavity", "g_mhz")
    cfg.delta_ca = TWO_PI * 1e6 * num("cavity", "delta_ca_mhz", 0.0)

    raw_scheme = doc.get("pump", {}).get("scheme", "modulated_resonant")
    try:
        cfg.pump.scheme = PumpScheme(raw_scheme)
    except ValueError as exc:
        raise ConfigError(f"unknown pump scheme {raw_scheme!r}") from exc
    cfg.pump.omega = TWO_PI * 1e6 * num("pump", "omega_mhz")
    cfg.pump.tau_p = 1e-6 * num("pump", "tau_p_us")
    cfg.pump.delta_pa = TWO_PI * 1e6 * num("pump", "delta_pa_mhz", 0.0)
    cfg.pump.delta_offset = TWO_PI * 1e6 * num("pump", "delta_offset_mhz", 0.0)
    cfg.pump.linewidth = TWO_PI * 1e3 * num("pump", "linewidth_khz", 0.0)
    cfg.pump.use_exact = _parse_bool(doc.get("pump", {}).get("use_exact", "true"))

    cfg.n_mean = num("beam", "n_mean")
    cfg.tau = 1e-6 * num("beam", "tau_us")
    raw_dw = doc.get("beam", {}).get("doppler_width_khz", "default")
    cfg.beam.doppler_width = -1.0 if raw_dw == "default" else TWO_PI * 1e3 * float(raw_dw)
    cfg.beam.doppler_mean = TWO_PI * 1e3 * num("beam", "doppler_mean_khz", 0.0)
    raw_cm = doc.get("beam", {}).get("coupling_mode", "uniform")
    try:
        cfg.beam.coupling_mode = CouplingMode(raw_cm)
    except ValueError as exc:
        raise ConfigError(f"unknown coupling_mode {raw_cm!r}") from exc
    raw_inj = doc.get("beam", {}).get("injection", "poisson")
    try:
        cfg.beam.injection = InjectionMode(raw_inj)
    except ValueError as exc:
        raise ConfigError(f"unknown injection mode {raw_inj!r}") from exc

    n = cfg.numerics
    n.dt = 1e-9 * num("numerics", "dt_ns")
    n.t_burn = 1e-6 * num("numerics", "t_burn_us")
    n.t_record = 1e-6 * num("numerics", "t_record_us")
    n.seed = int(num("numerics", "seed", 0))
    n.noise_on = _parse_bool(doc.get("numerics", {}).get("noise_on", "true"))
    n.record_every = int(num("numerics", "record_every", 1))
    n.max_lag = 1e-6 * num("numerics", "max_lag_us", 0.0)
    n.window = doc.get("numerics", {}).get("window", "none")
    n.engine = doc.get("numerics", {}).get("engine", "auto")
    n.paper_literal = _parse_bool(doc.get("numerics", {}).get("paper_literal", "false"))
    n.keep_imag_term = _parse_bool(doc.get("numerics", {}).get("keep_imag_term", "false"))

    validate(cfg)
    return cfg


def load_config(path: str) -> SimConfig:
    parser = configparser.ConfigParser(interpolation=None)
    with open(path, "r", encoding="utf-8") as fh:
        parser.read_file(fh)
    doc = {s: dict(parser.items(s)) for s in parser.sections()}
    return doc_to_config(doc)


def save_config(cfg: SimConfig, path: str) -> None:
    doc = config_to_doc(cfg)
    parser = configparser.ConfigParser(interpolation=None)
    for section, items in doc.items():
        parser[section] = items
    with open(path, "w", encoding="utf-8") as fh:
        parser.write(fh)


def apply_overrides(cfg: SimConfig, overrides: dict[str, str]) -> SimConfig:
    """Apply dotted-path overrides (e.g. {"cavity.delta_ca_mhz": "10"}).

    Overrides address the config-file keys, so units match the file schema.
    """
    doc = config_to_doc(cfg)
    for path, value in overrides.items():
        if "." not in path:
            raise ConfigError(f"override path must be section.key, got {path!r}")
        section, key = path.split(".", 1)
        if section not in _SCHEMA or key not in _SCHEMA[section]:
            raise ConfigError(f"unknown override path {path!r}")
        doc.setdefault(section, {})[key] = value
    return doc_to_config(doc)


def config_hash(cfg: SimConfig) -> str:
    """Hash of every physics-relevant field (the seed is excluded)."""
    doc = copy.deepcopy(config_to_doc(cfg))
    doc["numerics"].pop("seed", None)
    buf = io.StringIO()
    for section in sorted(doc):
        for key in sorted(doc[section]):
            buf.write(f"{section}.{key}={doc[section][key]}\n")
    return hashlib.sha256(buf.getvalue().encode()).hexdigest()[:16]
