"""Scenario files and the end-to-end analysis pipeline.

A scenario is a plain-text ``key = value`` file (``#`` starts a comment)::

    name = kdp_agvm
    material = KDP
    pm_type = II
    cut_angle_deg = auto
    length_mm = 20
    lambda_c_nm = 830
    pump_fwhm_nm = 5

Frequencies and filter widths are in rad/fs.  Unknown or repeated keys are
errors naming the key.
"""

from __future__ import annotations

import configparser
import math
import time
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from . import gaussian, schmidt, wigner
from .crystal import CrystalSpec, normalize_pm_type, normalize_polarization, walkoff_terms
from .errors import PhysicalityError, ScenarioError
from .state import PMF_FRAMES, PMF_MODELS, FilterSpec, PumpSpec, auto_grid, build_jsa


@dataclass(frozen=True)
class ScenarioConfig:
    """Parsed scenario.  ``None`` stands for ``auto`` / ``inf`` / ``center``."""

    material: str
    pm_type: str
    length_mm: float
    lambda_c_nm: float
    pump_fwhm_nm: float
    name: str = "scenario"
    cut_angle_deg: float | None = None
    signal_polarization: str | None = None
    sigma_F: float | None = None
    sigma_g: float | None = None
    omega_g0: float | None = None
    grid_N: int | None = None
    grid_span: float | None = None
    pmf: str = "sinc"
    pmf_frame: str = "center"
    output_dir: str | None = None
    analytic: bool = True
    numerical: bool = True
    schmidt: bool = True
    joint_temporal: bool = True
    contour_level: float = math.exp(-1)

    def to_dict(self):
        return asdict(self)

    def to_text(self) -> str:
        """Scenario file text that parses back to an equal config."""
        out = []
        for f in fields(self):
            v = getattr(self, f.name)
            if v is None:
                v = {"sigma_F": "inf", "sigma_g": "inf", "omega_g0": "center",
                     "output_dir": None}.get(f.name, "auto")
                if v is None:
                    continue
            elif isinstance(v, bool):
                v = "true" if v else "false"
            elif isinstance(v, float):
                v = repr(v)
            out.append(f"{f.name} = {v}")
        return "\n".join(out) + "\n"


REQUIRED = ("material", "pm_type", "length_mm", "lambda_c_nm", "pump_fwhm_nm")
_BOOL = {"true": True, "yes": True, "on": True, "1": True,
         "false": False, "no": False, "off": False, "0": False}


def _positive(key, text):
    try:
        v = float(text)
    except ValueError:
        raise ScenarioError(f"{key}: expected a number, got {text!r}", key) from None
    if not (math.isfinite(v) and v > 0):
        raise ScenarioError(f"{key}: must be a positive finite number, got {text!r}", key)
    return v


def _width(key, text):
    return None if text.lower() == "inf" else _positive(key, text)


def _auto(conv):
    def parse(key, text):
        return None if text.lower() == "auto" else conv(key, text)
    return parse


def _angle(key, text):
    try:
        v = float(text)
    except ValueError:
        raise ScenarioError(f"{key}: expected degrees or 'auto', got {text!r}", key) from None
    if not 0 <= v <= 90:
        raise ScenarioError(f"{key}: must lie in [0, 90] degrees, got {text!r}", key)
    return v


def _size(key, text):
    try:
        v = int(text)
    except ValueError:
        raise ScenarioError(f"{key}: expected an integer or 'auto', got {text!r}", key) from None
    if v < 64 or v & (v - 1):
        raise ScenarioError(f"{key}: must be a power of two >= 64, got {v}", key)
    return v


def _bool(key, text):
    try:
        return _BOOL[text.lower()]
    except KeyError:
        raise ScenarioError(f"{key}: expected true/false, got {text!r}", key) from None


def _choice(options):
    def parse(key, text):
        if text not in options:
            raise ScenarioError(f"{key}: expected one of {', '.join(options)}, got {text!r}", key)
        return text
    return parse


def _guard(conv):
    def parse(key, text):
        try:
            return conv(text)
        except ValueError as exc:
            raise ScenarioError(f"{key}: {exc}", key) from None
    return parse


def _level(key, text):
    v = _positive(key, text)
    if not v < 1:
        raise ScenarioError(f"{key}: must lie in (0, 1), got {text!r}", key)
    return v


_PARSERS = {
    "name": lambda key, text: text,
    "material": lambda key, text: text.upper(),
    "pm_type": _guard(normalize_pm_type),
    "cut_angle_deg": _auto(_angle),
    "length_mm": _positive,
    "lambda_c_nm": _positive,
    "pump_fwhm_nm": _positive,
    "signal_polarization": _auto(_guard(normalize_polarization)),
    "sigma_F": _width,
    "sigma_g": _width,
    "omega_g0": lambda key, text: None if text.lower() == "center" else _positive(key, text),
    "grid_N": _auto(_size),
    "grid_span": _auto(_positive),
    "pmf": _choice(PMF_MODELS),
    "pmf_frame": _choice(PMF_FRAMES),
    "output_dir": lambda key, text: text,
    "analytic": _bool,
    "numerical": _bool,
    "schmidt": _bool,
    "joint_temporal": _bool,
    "contour_level": _level,
}


def parse_scenario(text: str, default_name="scenario") -> ScenarioConfig:
    """Parse scenario text.

    Raises
    ------
    ScenarioError
        With ``key`` set to the offending key (``None`` for syntax errors).
    """
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"),
                                   default_section="__none__")
    cp.optionxform = str
    try:
        cp.read_string("[scenario]\n" + text)
    except configparser.DuplicateOptionError as exc:
        raise ScenarioError(f"{exc.option}: key given more than once", exc.option) from None
    except configparser.Error as exc:
        raise ScenarioError(f"malformed scenario: {exc.message.splitlines()[0]}") from None
    raw = dict(cp["scenario"])
    values = {}
    for key, text in raw.items():
        if key not in _PARSERS:
            raise ScenarioError(f"{key}: unknown scenario key", key)
        text = text.strip()
        if not text:
            raise ScenarioError(f"{key}: empty value", key)
        values[key] = _PARSERS[key](key, text)
    for key in REQUIRED:
        if key not in values:
            raise ScenarioError(f"{key}: required key missing", key)
    values.setdefault("name", default_name)
    return ScenarioConfig(**values)


def load_scenario(path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc.strerror}") from None
    return parse_scenario(text, default_name=path.stem)


# --- pipeline -----------------------------------------------------------------


@dataclass
class PipelineResult:
    """Everything one scenario run produced.

    ``errors`` maps a stage name to a message for stages that could not
    produce a value (currently only the Gaussian model for type I).
    """

    config: ScenarioConfig
    crystal: CrystalSpec
    pump: PumpSpec
    filters: FilterSpec
    jsa: object
    gaussian: gaussian.GaussianReport | None = None
    rho: object = None
    cwf: object = None
    i_omega: object = None
    i_t: object = None
    numerical: dict | None = None
    decomposition: object = None
    entanglement: schmidt.EntanglementReport | None = None
    errors: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)

    def report(self, files=None) -> dict:
        from . import __version__
        from .crystal import sellmeier_table

        w = walkoff_terms(self.crystal, self.pump.lambda_c)
        g = self.jsa.grid
        return {
            "scenario": self.config.to_dict(),
            "crystal": {"material": self.crystal.material, "pm_type": self.crystal.pm_type,
                        "cut_angle_deg": self.crystal.cut_angle,
                        "length_mm": self.crystal.length,
                        "signal_polarization": self.crystal.signal_polarization,
                        "tau_s_fs": w.tau_s, "tau_i_fs": w.tau_i},
            "pump": {"wavelength_nm": self.pump.wavelength, "fwhm_nm": self.pump.fwhm,
                     "sigma_rad_per_fs": self.pump.sigma, "tau_p_fs": self.pump.tau_p},
            "grid": {"N": g.size, "span_rad_per_fs": g.span, "delta_rad_per_fs": g.spacing,
                     "center_rad_per_fs": g.center},
            "gaussian": None if self.gaussian is None else self.gaussian.to_dict(),
            "numerical": self.numerical,
            "entanglement": None if self.entanglement is None else self.entanglement.to_dict(),
            "errors": dict(self.errors),
            "files": dict(files or {}),
            "versions": {"photonpair": __version__, "sellmeier": sellmeier_table()[0]},
        }


def build_setup(cfg: ScenarioConfig):
    """(crystal, pump, filters, grid) for a scenario."""
    crystal = CrystalSpec.degenerate(cfg.material, cfg.pm_type, cfg.lambda_c_nm, cfg.length_mm,
                                     cfg.cut_angle_deg, cfg.signal_polarization)
    pump = PumpSpec(cfg.lambda_c_nm / 2, cfg.pump_fwhm_nm)
    filters = FilterSpec(cfg.sigma_F, cfg.sigma_g, cfg.omega_g0)
    grid = auto_grid(crystal, pump, filters, size=cfg.grid_N, span=cfg.grid_span, model=cfg.pmf)
    return crystal, pump, filters, grid


def run_pipeline(cfg: ScenarioConfig) -> PipelineResult:
    """Build the JSA and run every enabled analysis stage.

    Raises
    ------
    PhotonPairError
        For any failure except a degenerate Gaussian model, which is recorded
        in ``result.errors["analytic"]``.
    """
    clock = time.perf_counter()
    crystal, pump, filters, grid = build_setup(cfg)
    jsa = build_jsa(crystal, pump, filters, grid, model=cfg.pmf, frame=cfg.pmf_frame)
    res = PipelineResult(cfg, crystal, pump, filters, jsa)
    res.timings["build"] = time.perf_counter() - clock

    if cfg.analytic:
        try:
            res.gaussian = gaussian.report_for(crystal, pump, filters)
        except PhysicalityError as exc:
            res.errors["analytic"] = str(exc)

    if cfg.numerical:
        clock = time.perf_counter()
        res.rho = wigner.heralded_density_matrix(jsa, filters)
        res.cwf = wigner.adaptive_cwf(res.rho)
        res.i_omega, res.i_t = wigner.marginals(res.cwf)
        wt = wigner.measure_width(res.i_t)
        ww = wigner.measure_width(res.i_omega)
        omega_peak, t_peak = res.cwf.peak()
        res.numerical = {
            "delta_t_fs": float(wt.half_width),
            "delta_omega_rad_per_fs": float(ww.half_width),
            "delta_omega_THz": float(ww.half_width * 1e3),
            "tb": float(wt.half_width * ww.half_width),
            "purity_heralded": float(res.rho.purity()),
            "omega_peak_rad_per_fs": omega_peak,
            "t_peak_fs": t_peak,
            "tau_c_fs": None,
        }
        res.timings["wigner"] = time.perf_counter() - clock

    if cfg.joint_temporal:
        _, tau_c = wigner.joint_temporal_analysis(jsa)
        if res.numerical is None:
            res.numerical = {}
        res.numerical["tau_c_fs"] = float(tau_c)

    if cfg.schmidt:
        clock = time.perf_counter()
        res.decomposition, res.entanglement = schmidt.entanglement_for(jsa)
        res.timings["schmidt"] = time.perf_counter() - clock
    return res


def run_scenario_file(path) -> PipelineResult:
    return run_pipeline(load_scenario(path))

