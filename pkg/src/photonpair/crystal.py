"""Dispersion of uniaxial nonlinear crystals.

Refractive indices come from the Sellmeier tables in ``data/sellmeier.ini``
(override the directory with ``PHOTONPAIR_DATA_DIR``).  Units used throughout:

* wavelength: nm
* angular frequency: rad/fs
* wavenumber: rad/um
* inverse group velocity k' = dk/domega: fs/mm
* crystal length: mm, times: fs
"""

from __future__ import annotations

import configparser
import functools
import os
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

from .errors import DispersionRangeError, PhasematchingError

C_NM_PER_FS = 299.792458
C_UM_PER_FS = C_NM_PER_FS * 1e-3

DATA_ENV = "PHOTONPAIR_DATA_DIR"
SELLMEIER_FILE = "sellmeier.ini"

_POLARIZATIONS = {"o": "o", "ordinary": "o", "e": "e", "extraordinary": "e"}
_PM_TYPES = {"i": "I", "typei": "I", "type-i": "I", "type1": "I",
             "ii": "II", "typeii": "II", "type-ii": "II", "type2": "II"}


def omega_from_wavelength(wavelength):
    """Angular frequency (rad/fs) of a vacuum wavelength in nm."""
    return 2 * np.pi * C_NM_PER_FS / np.asarray(wavelength, dtype=float)


def wavelength_from_omega(omega):
    """Vacuum wavelength (nm) of an angular frequency in rad/fs."""
    return 2 * np.pi * C_NM_PER_FS / np.asarray(omega, dtype=float)


def normalize_polarization(polarization: str) -> str:
    try:
        return _POLARIZATIONS[str(polarization).lower()]
    except KeyError:
        raise ValueError(f"unknown polarization {polarization!r}; use 'o' or 'e'") from None


def normalize_pm_type(pm_type: str) -> str:
    try:
        return _PM_TYPES[str(pm_type).lower().replace(" ", "").replace("_", "")]
    except KeyError:
        raise ValueError(f"unknown phasematching type {pm_type!r}; use 'I' or 'II'") from None


@dataclass(frozen=True)
class SellmeierSet:
    """Coefficients (A, B, C, D, E, F, G, H) of the extended Sellmeier form."""

    coefficients: tuple

    def n_squared(self, lam_um):
        A, B, C, D, E, F, G, H = self.coefficients
        l2 = lam_um * lam_um
        return A + B / (l2 - C) + D * l2 / (l2 - E) + F * l2 + G * l2**2 + H * l2**3

    def d_n_squared(self, lam_um):
        """Derivative of n^2 with respect to wavelength in um."""
        A, B, C, D, E, F, G, H = self.coefficients
        l2 = lam_um * lam_um
        return (-2 * lam_um * B / (l2 - C) ** 2
                - 2 * lam_um * D * E / (l2 - E) ** 2
                + 2 * F * lam_um + 4 * G * lam_um**3 + 6 * H * lam_um**5)


@dataclass(frozen=True)
class Material:
    name: str
    ordinary: SellmeierSet
    extraordinary: SellmeierSet
    range_nm: tuple
    source: str = ""

    def check_range(self, wavelength):
        lo, hi = self.range_nm
        lam = np.asarray(wavelength, dtype=float)
        bad = ~((lam >= lo) & (lam <= hi))
        if np.any(bad):
            raise DispersionRangeError(self.name, float(lam[bad].flat[0]), self.range_nm)


def data_dir() -> Path:
    override = os.environ.get(DATA_ENV)
    if override:
        return Path(override)
    return Path(str(resources.files("photonpair") / "data"))


@functools.lru_cache(maxsize=8)
def _load(path: str):
    parser = configparser.ConfigParser()
    with open(path, encoding="utf-8") as fh:
        parser.read_file(fh)
    version = parser.get("meta", "version", fallback="unversioned")
    materials = {}
    for name in parser.sections():
        if name == "meta":
            continue
        sec = parser[name]

        def coeffs(key):
            values = tuple(float(v) for v in sec[key].split(","))
            if len(values) != 8:
                raise ValueError(f"{path}: [{name}] {key} needs 8 coefficients, got {len(values)}")
            return SellmeierSet(values)

        lo, hi = (float(v) for v in sec["range_nm"].split(","))
        materials[name.upper()] = Material(name.upper(), coeffs("o"), coeffs("e"), (lo, hi),
                                           sec.get("source", ""))
    return version, materials


def sellmeier_table():
    """Return ``(version, {name: Material})`` for the active data file."""
    return _load(str(data_dir() / SELLMEIER_FILE))


def get_material(material) -> Material:
    if isinstance(material, Material):
        return material
    _, table = sellmeier_table()
    try:
        return table[str(material).upper()]
    except KeyError:
        raise ValueError(f"unknown material {material!r}; available: {sorted(table)}") from None


def _index_and_derivative(material, polarization, theta, wavelength):
    """Refractive index and dn/dlambda (per um) at wavelength in nm."""
    mat = get_material(material)
    pol = normalize_polarization(polarization)
    mat.check_range(wavelength)
    lam = np.asarray(wavelength, dtype=float) * 1e-3
    no2 = mat.ordinary.n_squared(lam)
    dno2 = mat.ordinary.d_n_squared(lam)
    if pol == "o":
        n = np.sqrt(no2)
        return n, dno2 / (2 * n)
    ne2 = mat.extraordinary.n_squared(lam)
    dne2 = mat.extraordinary.d_n_squared(lam)
    t = np.radians(theta)
    c2, s2 = np.cos(t) ** 2, np.sin(t) ** 2
    # 1/n^2 = cos^2/no^2 + sin^2/ne^2
    inv = c2 / no2 + s2 / ne2
    n = inv ** -0.5
    dinv = -c2 * dno2 / no2**2 - s2 * dne2 / ne2**2
    return n, -0.5 * n**3 * dinv


def refractive_index(material, polarization, theta, wavelength):
    """Refractive index of a wave in a uniaxial crystal.

    Parameters
    ----------
    material : str or Material
        ``"BBO"`` or ``"KDP"`` (or any material in the data file).
    polarization : str
        ``"o"`` or ``"e"``.
    theta : float
        Angle between propagation direction and optic axis, degrees.  Ignored for
        ordinary waves.
    wavelength : float or array
        Vacuum wavelength in nm.
    """
    return _index_and_derivative(material, polarization, theta, wavelength)[0]


def wavenumber(material, polarization, theta, omega):
    """k = n(omega) omega / c in rad/um, for angular frequency in rad/fs."""
    omega = np.asarray(omega, dtype=float)
    n = refractive_index(material, polarization, theta, wavelength_from_omega(omega))
    return n * omega / C_UM_PER_FS


def inverse_group_velocity(material, polarization, theta, wavelength):
    """k' = dk/domega = (n - lambda dn/dlambda)/c, returned in fs/mm."""
    n, dn = _index_and_derivative(material, polarization, theta, wavelength)
    lam_um = np.asarray(wavelength, dtype=float) * 1e-3
    return (n - lam_um * dn) / C_UM_PER_FS * 1e3


@dataclass(frozen=True)
class DispersionSample:
    wavelength: float
    n: float
    k: float
    kprime: float


def dispersion_sample(material, polarization, theta, wavelength) -> DispersionSample:
    n = float(refractive_index(material, polarization, theta, wavelength))
    omega = float(omega_from_wavelength(wavelength))
    return DispersionSample(float(wavelength), n, n * omega / C_UM_PER_FS,
                            float(inverse_group_velocity(material, polarization, theta, wavelength)))


@dataclass(frozen=True)
class CrystalSpec:
    """Geometry of a collinear uniaxial PDC crystal.

    The pump is always extraordinary.  Type I is e -> o + o; type II is
    e -> o + e with ``signal_polarization`` naming the heralded photon.
    """

    material: str
    cut_angle: float
    length: float
    pm_type: str = "II"
    signal_polarization: str = "o"

    def __post_init__(self):
        object.__setattr__(self, "material", get_material(self.material).name)
        object.__setattr__(self, "pm_type", normalize_pm_type(self.pm_type))
        object.__setattr__(self, "signal_polarization",
                           normalize_polarization(self.signal_polarization))
        if not self.length > 0:
            raise ValueError(f"crystal length must be positive, got {self.length}")
        if not 0 <= self.cut_angle <= 90:
            raise ValueError(f"cut angle must lie in [0, 90] degrees, got {self.cut_angle}")
        if self.pm_type == "I" and self.signal_polarization != "o":
            raise ValueError("type I daughters are both ordinary; signal_polarization must be 'o'")

    @property
    def idler_polarization(self) -> str:
        if self.pm_type == "I":
            return "o"
        return "e" if self.signal_polarization == "o" else "o"

    @classmethod
    def degenerate(cls, material, pm_type, lambda_c, length, cut_angle=None,
                   signal_polarization=None):
        """Crystal for collinear degenerate emission at ``lambda_c`` nm.

        A missing cut angle is solved with :func:`phasematch_angle`.  For type II
        without an explicit signal polarization, the daughter whose group velocity
        is closer to the pump's becomes the signal.
        """
        pm_type = normalize_pm_type(pm_type)
        if cut_angle is None:
            cut_angle = phasematch_angle(material, pm_type, lambda_c)
        if pm_type == "I":
            signal_polarization = "o"
        elif signal_polarization is None:
            kp = inverse_group_velocity(material, "e", cut_angle, lambda_c / 2)
            ko = inverse_group_velocity(material, "o", cut_angle, lambda_c)
            ke = inverse_group_velocity(material, "e", cut_angle, lambda_c)
            signal_polarization = "o" if abs(kp - ko) <= abs(kp - ke) else "e"
        return cls(material, float(cut_angle), float(length), pm_type, signal_polarization)


def delta_k(crystal: CrystalSpec, omega_s, omega_i):
    """Full phase mismatch k_p(ws + wi) - k_s(ws) - k_i(wi) in rad/um."""
    omega_s = np.asarray(omega_s, dtype=float)
    omega_i = np.asarray(omega_i, dtype=float)
    th = crystal.cut_angle
    kp = wavenumber(crystal.material, "e", th, omega_s + omega_i)
    ks = wavenumber(crystal.material, crystal.signal_polarization, th, omega_s)
    ki = wavenumber(crystal.material, crystal.idler_polarization, th, omega_i)
    return kp - ks - ki


class Walkoff(NamedTuple):
    """Group delays of the pump relative to signal and idler, in fs."""

    tau_s: float
    tau_i: float

    @property
    def tau_minus(self) -> float:
        return self.tau_s - self.tau_i


def walkoff_terms(crystal: CrystalSpec, lambda_c) -> Walkoff:
    """tau_mu = L (k_p'(2 w_c) - k_mu'(w_c)) for a degenerate pair at ``lambda_c`` nm."""
    th = crystal.cut_angle
    kp = inverse_group_velocity(crystal.material, "e", th, lambda_c / 2)
    ks = inverse_group_velocity(crystal.material, crystal.signal_polarization, th, lambda_c)
    ki = inverse_group_velocity(crystal.material, crystal.idler_polarization, th, lambda_c)
    return Walkoff(float(crystal.length * (kp - ks)), float(crystal.length * (kp - ki)))


def _degenerate_mismatch(material, pm_type, lambda_c, theta):
    omega = omega_from_wavelength(lambda_c)
    kp = wavenumber(material, "e", theta, 2 * omega)
    if pm_type == "I":
        return float(kp - 2 * wavenumber(material, "o", theta, omega))
    return float(kp - wavenumber(material, "o", theta, omega) - wavenumber(material, "e", theta, omega))


def phasematch_angle(material, pm_type, lambda_c) -> float:
    """Cut angle (degrees) for collinear degenerate phasematching at ``lambda_c`` nm."""
    pm_type = normalize_pm_type(pm_type)
    mat = get_material(material)
    mat.check_range([lambda_c, lambda_c / 2])

    def mismatch(theta):
        return _degenerate_mismatch(mat, pm_type, lambda_c, theta)

    lo, hi = 1e-6, 90.0
    if mismatch(lo) * mismatch(hi) > 0:
        raise PhasematchingError(
            f"{mat.name} type {pm_type} at {lambda_c:g} nm is not phasematchable: "
            "no sign change of the mismatch for cut angles in (0, 90) degrees"
        )
    return float(brentq(mismatch, lo, hi, xtol=1e-12, rtol=1e-15, maxiter=200))
