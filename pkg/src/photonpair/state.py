"""Joint spectral amplitude f(ws, wi) = Phi * alpha * F on a uniform grid."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import gaussian
from .crystal import (
    C_NM_PER_FS,
    CrystalSpec,
    get_material,
    omega_from_wavelength,
    walkoff_terms,
    wavelength_from_omega,
    wavenumber,
)
from .errors import PhysicalityError, SupportClippedError

# Fraction of the total |f|^2 mass allowed in any single boundary row or column.
SUPPORT_TOLERANCE = 1e-4
# Largest N chosen automatically; the N x N density matrix and its CWF scale as N^2.
MAX_AUTO_SIZE = 2048

PMF_MODELS = ("sinc", "gaussian")
PMF_FRAMES = ("center", "exit")
DISPERSION_ORDERS = ("full", "linear")


def _unfiltered(width):
    """Map the 'no filter' spellings (None, inf) to None."""
    if width is None:
        return None
    width = float(width)
    if math.isinf(width):
        return None
    if not width > 0:
        raise ValueError(f"filter width must be positive or unfiltered, got {width}")
    return width


def sigma_from_fwhm(wavelength, fwhm):
    """Pump amplitude width sigma (rad/fs) from an intensity FWHM in wavelength.

    ``fwhm`` (nm) is read as the full width at half maximum of |alpha|^2
    around ``wavelength`` (nm).  With alpha = exp(-x^2/sigma^2) the intensity
    FWHM in angular frequency is 2 sigma sqrt(ln 2 / 2).
    """
    if not (wavelength > 0 and fwhm > 0):
        raise ValueError("pump wavelength and bandwidth must be positive")
    domega = 2 * np.pi * C_NM_PER_FS * fwhm / wavelength**2
    return float(domega / (2 * np.sqrt(np.log(2) / 2)))


@dataclass(frozen=True)
class PumpSpec:
    """Gaussian, unchirped pump centred at ``wavelength`` nm with intensity FWHM ``fwhm`` nm."""

    wavelength: float
    fwhm: float

    def __post_init__(self):
        if not (self.wavelength > 0 and self.fwhm > 0):
            raise ValueError("pump wavelength and bandwidth must be positive")

    @classmethod
    def from_sigma(cls, wavelength, sigma):
        fwhm = sigma * 2 * np.sqrt(np.log(2) / 2) * wavelength**2 / (2 * np.pi * C_NM_PER_FS)
        return cls(float(wavelength), float(fwhm))

    @property
    def sigma(self) -> float:
        return sigma_from_fwhm(self.wavelength, self.fwhm)

    @property
    def tau_p(self) -> float:
        return math.sqrt(2) / self.sigma

    @property
    def lambda_c(self) -> float:
        return 2 * self.wavelength

    @property
    def omega_c(self) -> float:
        return float(omega_from_wavelength(self.lambda_c))


@dataclass(frozen=True)
class FilterSpec:
    """Gaussian filters.  ``None`` (or ``inf``) means unfiltered.

    sigma_F acts on both photons inside the JSA; sigma_g and omega_g0 describe the
    trigger detection efficiency g(w), applied only when heralding.  A missing
    ``omega_g0`` means the filter is centred on the degenerate frequency.
    """

    sigma_F: float | None = None
    sigma_g: float | None = None
    omega_g0: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "sigma_F", _unfiltered(self.sigma_F))
        object.__setattr__(self, "sigma_g", _unfiltered(self.sigma_g))
        if self.omega_g0 is not None and not self.omega_g0 > 0:
            raise ValueError("trigger filter centre must be a positive frequency")

    @property
    def trigger_filtered(self) -> bool:
        return self.sigma_g is not None

    def trigger_center(self, omega_c):
        return omega_c if self.omega_g0 is None else self.omega_g0


UNFILTERED = FilterSpec()


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform axis w_j = center + (j - N/2) * spacing, shared by signal and idler."""

    center: float
    spacing: float
    size: int

    def __post_init__(self):
        n = int(self.size)
        if n < 64 or n & (n - 1):
            raise ValueError(f"grid size must be a power of two >= 64, got {self.size}")
        if not self.spacing > 0:
            raise ValueError("grid spacing must be positive")
        object.__setattr__(self, "size", n)

    @classmethod
    def from_span(cls, center, span, size):
        return cls(float(center), float(span) / size, int(size))

    @property
    def offsets(self) -> np.ndarray:
        return (np.arange(self.size) - self.size // 2) * self.spacing

    @property
    def omega(self) -> np.ndarray:
        return self.center + self.offsets

    @property
    def span(self) -> float:
        return self.size * self.spacing

    def refined(self, factor=2):
        """Same span, ``factor`` times more points."""
        return FrequencyGrid(self.center, self.spacing / factor, self.size * factor)


@dataclass(frozen=True)
class JointSpectralAmplitude:
    """Normalized f[j, k] = f(w_s,j, w_i,k) with sum |f|^2 delta^2 = 1."""

    grid: FrequencyGrid
    values: np.ndarray
    crystal: CrystalSpec | None = None
    pump: PumpSpec | None = None
    filters: FilterSpec = UNFILTERED
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values.setflags(write=False)

    @property
    def omega(self):
        return self.grid.omega

    @property
    def delta(self):
        return self.grid.spacing

    def norm(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2) * self.delta**2)


def pump_envelope(omega_s, omega_i, pump: PumpSpec):
    """alpha = exp(-(ws + wi - 2 wc)^2 / sigma^2)."""
    detuning = np.asarray(omega_s) + np.asarray(omega_i) - 2 * pump.omega_c
    return np.exp(-detuning**2 / pump.sigma**2)


def filter_function(omega_s, omega_i, filters: FilterSpec, omega_c):
    """Two-photon filter F; identically one when unfiltered."""
    if filters.sigma_F is None:
        return np.ones(np.broadcast(np.asarray(omega_s), np.asarray(omega_i)).shape)
    ds = np.asarray(omega_s) - omega_c
    di = np.asarray(omega_i) - omega_c
    return np.exp(-(ds**2 + di**2) / filters.sigma_F**2)


def trigger_efficiency(omega, filters: FilterSpec, omega_c):
    """Trigger detection efficiency g(w); identically one when unfiltered."""
    omega = np.asarray(omega, dtype=float)
    if filters.sigma_g is None:
        return np.ones_like(omega)
    return np.exp(-(omega - filters.trigger_center(omega_c)) ** 2 / filters.sigma_g**2)


def _pmf_from_mismatch(half_phase, model, frame, gamma):
    if model == "sinc":
        amp = np.sinc(half_phase / np.pi)
    elif model == "gaussian":
        amp = np.exp(-gamma * half_phase**2)
    else:
        raise ValueError(f"unknown PMF model {model!r}; use one of {PMF_MODELS}")
    if frame == "exit":
        return amp * np.exp(1j * half_phase)
    if frame == "center":
        return amp.astype(complex)
    raise ValueError(f"unknown PMF frame {frame!r}; use one of {PMF_FRAMES}")


def _half_phase(omega_s, omega_i, crystal, lambda_c, dispersion):
    """L * Delta k / 2 (dimensionless)."""
    if dispersion == "full":
        th = crystal.cut_angle
        kp = wavenumber(crystal.material, "e", th, np.asarray(omega_s) + np.asarray(omega_i))
        ks = wavenumber(crystal.material, crystal.signal_polarization, th, omega_s)
        ki = wavenumber(crystal.material, crystal.idler_polarization, th, omega_i)
        return crystal.length * 1e3 * (kp - ks - ki) / 2
    if dispersion == "linear":
        if lambda_c is None:
            raise ValueError("linear dispersion needs the degenerate wavelength lambda_c")
        wc = omega_from_wavelength(lambda_c)
        w = walkoff_terms(crystal, lambda_c)
        return (w.tau_s * (np.asarray(omega_s) - wc) + w.tau_i * (np.asarray(omega_i) - wc)) / 2
    raise ValueError(f"unknown dispersion order {dispersion!r}; use one of {DISPERSION_ORDERS}")


def phasematching_function(omega_s, omega_i, crystal: CrystalSpec, *, lambda_c=None,
                           model="sinc", frame="center", dispersion="full",
                           gamma=gaussian.GAMMA):
    """Phasematching function Phi(ws, wi).

    ``model="sinc"`` gives sinc(L dk / 2); ``"gaussian"`` replaces the sinc by
    exp(-gamma (L dk / 2)^2).  ``frame="exit"`` multiplies by exp(i L dk / 2),
    i.e. the crystal runs from z = 0 to z = L; ``"center"`` puts z = 0 at the
    crystal centre, which makes Phi real.  To first order in the mismatch the
    two frames differ by a per-photon delay; higher dispersion orders add a
    chirp that does not factorize.  ``dispersion="full"`` uses
    the complete Sellmeier mismatch, ``"linear"`` its first-order expansion
    about the degenerate point (requires ``lambda_c``).
    """
    x = _half_phase(omega_s, omega_i, crystal, lambda_c, dispersion)
    return _pmf_from_mismatch(x, model, frame, gamma)


def boundary_mass(values, delta) -> float:
    """Largest |f|^2 mass carried by one boundary row or column, relative to total."""
    p = np.abs(values) ** 2
    total = p.sum()
    if total == 0:
        return math.inf
    edges = (p[0].sum(), p[-1].sum(), p[:, 0].sum(), p[:, -1].sum())
    return float(max(edges) / total)


def _jsa_values(crystal, pump, filters, grid, model, frame, dispersion, gamma):
    w = grid.omega
    n = grid.size
    wc = pump.omega_c
    if dispersion == "full":
        # pump wavenumber only depends on j + k: evaluate on the 2N - 1 distinct sums
        th = crystal.cut_angle
        sums = 2 * grid.center + (np.arange(2 * n - 1) - 2 * (n // 2)) * grid.spacing
        kp = wavenumber(crystal.material, "e", th, sums)
        ks = wavenumber(crystal.material, crystal.signal_polarization, th, w)
        ki = wavenumber(crystal.material, crystal.idler_polarization, th, w)
        idx = np.arange(n)[:, None] + np.arange(n)[None, :]
        x = crystal.length * 1e3 * (kp[idx] - ks[:, None] - ki[None, :]) / 2
    else:
        x = _half_phase(w[:, None], w[None, :], crystal, pump.lambda_c, dispersion)
    f = _pmf_from_mismatch(x, model, frame, gamma)
    f *= pump_envelope(w[:, None], w[None, :], pump)
    if filters.sigma_F is not None:
        f *= filter_function(w[:, None], w[None, :], filters, wc)
    return f


def build_jsa(crystal: CrystalSpec, pump: PumpSpec, filters: FilterSpec = UNFILTERED,
              grid: FrequencyGrid | None = None, *, model="sinc", frame="center",
              dispersion="full", gamma=gaussian.GAMMA, check_support=True):
    """Sample f = Phi * alpha * F on ``grid`` and normalize it.

    The trigger efficiency g is deliberately left out; it enters at heralding.

    Raises
    ------
    SupportClippedError
        If a boundary row or column carries more than ``SUPPORT_TOLERANCE`` of
        the total mass.
    """
    if grid is None:
        grid = auto_grid(crystal, pump, filters, model=model, dispersion=dispersion,
                         gamma=gamma)
    f = _jsa_values(crystal, pump, filters, grid, model, frame, dispersion, gamma)
    if check_support:
        edge = boundary_mass(f, grid.spacing)
        if edge > SUPPORT_TOLERANCE:
            raise SupportClippedError(
                f"support clipped: a boundary row/column holds {edge:.2e} of the total "
                f"|f|^2 (limit {SUPPORT_TOLERANCE:g}); widen the grid span"
            )
    mass = np.sum(np.abs(f) ** 2) * grid.spacing**2
    if not np.isfinite(mass) or mass == 0:
        raise SupportClippedError("joint amplitude vanishes on the grid")
    f /= np.sqrt(mass)
    options = {"model": model, "frame": frame, "dispersion": dispersion, "gamma": gamma}
    return JointSpectralAmplitude(grid, f, crystal, pump, filters, options)


def _next_pow2(x, minimum=256):
    n = minimum
    while n < x:
        n *= 2
    return n


def _model_halfspans(crystal, pump, filters, gamma):
    """Half-span candidates from closed-form widths of the JSA factors."""
    w = walkoff_terms(crystal, pump.lambda_c)
    sigma = pump.sigma
    spans = [3.0 / pump.tau_p]
    for tau_s, tau_i in ((w.tau_s, w.tau_i), (w.tau_i, w.tau_s)):
        m = gaussian.second_moments(sigma, filters.sigma_F, None, tau_s, tau_i, gamma)
        try:
            spans.append(3.0 * gaussian.widths(m)[1])
        except PhysicalityError:
            pass
    # vertices of the region |ns + ni| < 3 sigma, |tau_s ns + tau_i ni| / 2 < 4 pi
    dtau = abs(w.tau_s - w.tau_i)
    if dtau > 1e-9 * max(abs(w.tau_s), abs(w.tau_i), 1.0):
        b = 8 * np.pi
        spans.append((b + abs(w.tau_i) * 3 * sigma) / dtau)
        spans.append((b + abs(w.tau_s) * 3 * sigma) / dtau)
    else:
        # tau_s = tau_i: the overlap region is an unbounded strip, start from two lobes
        for tau in (w.tau_s, w.tau_i):
            if abs(tau) > 0:
                spans.append(2 * (4 * np.pi / abs(tau)))
    return w, spans


def auto_grid(crystal: CrystalSpec, pump: PumpSpec, filters: FilterSpec = UNFILTERED, *,
              size=None, span=None, model="sinc", dispersion="full",
              gamma=gaussian.GAMMA) -> FrequencyGrid:
    """Choose a grid that contains the JSA support and resolves its finest feature.

    The half-span is the largest of: 3/tau_p, three Gaussian-model marginal
    widths, the extent of the pump/phasematching overlap region and two sinc
    main lobes along each axis when tau_s = tau_i.  It then grows by 25 % steps until a coarse
    256-point sampling of |f|^2 keeps every boundary row/column below a tenth
    of ``SUPPORT_TOLERANCE``.  The spacing gives at least 8 samples across the narrowest of the
    pump band (2 sigma), the sinc main lobes (4 pi / |tau|) and the filters; N
    is the smallest power of two >= 256 that achieves it, capped at
    ``MAX_AUTO_SIZE``.
    """
    wc = pump.omega_c
    w, spans = _model_halfspans(crystal, pump, filters, gamma)
    if span is not None:
        half = float(span) / 2
    else:
        half = max(spans)
        if filters.sigma_F is not None:
            half = min(half, 5 * filters.sigma_F)
        lo, hi = get_material(crystal.material).range_nm
        # keep signal, idler and pump inside the dispersion table
        limit = 0.98 * min(wc - omega_from_wavelength(hi),
                           omega_from_wavelength(lo) / 2 - wc)
        half = min(half, limit)
        for _ in range(16):
            coarse = FrequencyGrid.from_span(wc, 2 * half, 256)
            f = _jsa_values(crystal, pump, filters, coarse, model, "center", dispersion, gamma)
            if boundary_mass(f, coarse.spacing) < SUPPORT_TOLERANCE / 10 or half >= limit:
                break
            half = min(half * 1.25, limit)

    features = [2 * pump.sigma]
    for tau in (w.tau_s, w.tau_i):
        if abs(tau) > 1e-9:
            features.append(4 * np.pi / abs(tau))
    for width in (filters.sigma_F, filters.sigma_g):
        if width is not None:
            features.append(2 * width)
    if size is None:
        size = min(_next_pow2(2 * half / (min(features) / 8)), MAX_AUTO_SIZE)
    return FrequencyGrid.from_span(wc, 2 * half, int(size))


def support_wavelengths(grid: FrequencyGrid):
    """Wavelength interval (nm) spanned by a grid, for diagnostics."""
    w = grid.omega
    return float(wavelength_from_omega(w[-1])), float(wavelength_from_omega(w[0]))
