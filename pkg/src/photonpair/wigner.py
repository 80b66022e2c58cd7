"""Heralded density matrix, chronocyclic Wigner function and derived widths.

The CWF of the heralded signal photon is

    W(w, t) = 1/(2 pi) Int dw' <w + w'/2| rho_s |w - w'/2> exp(i w' t).

On a grid of spacing delta the half-offset arguments land on grid points when
w' is restricted to even multiples 2 m delta, so no interpolation is needed:

    W(w_j, t) = (2 delta / 2 pi) sum_m R[j+m, j-m] exp(i 2 m delta t).

The t samples of a plain FFT are spaced pi / (N delta) and cover
[-pi/(2 delta), pi/(2 delta)).  ``numerical_cwf`` can instead evaluate the same
sum on any uniform time window with a chirp-z transform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid
from scipy.signal import czt

from .errors import (
    ClippedProfileError,
    ContractError,
    DegenerateProfileError,
    EmptyContourError,
    EmptyHeraldingError,
    SupportClippedError,
)
from .state import FilterSpec, FrequencyGrid, JointSpectralAmplitude, trigger_efficiency

E_INV = math.exp(-1)


@dataclass(frozen=True)
class HeraldedDensityMatrix:
    """R[j, k] = <w_j| rho_s |w_k> with trace(R) * delta = 1."""

    grid: FrequencyGrid
    matrix: np.ndarray
    trigger_filtered: bool = False

    @property
    def delta(self):
        return self.grid.spacing

    def trace(self) -> float:
        return float(np.trace(self.matrix).real * self.delta)

    def purity(self) -> float:
        """Tr(rho^2), evaluated as sum |R|^2 delta^2."""
        return float(np.sum(np.abs(self.matrix) ** 2) * self.delta**2)

    def hermiticity_error(self) -> float:
        r = self.matrix
        return float(np.max(np.abs(r - r.conj().T)) / np.max(np.abs(r)))

    def min_eigenvalue(self) -> float:
        """Smallest eigenvalue of rho (eigenvalues of R * delta)."""
        return float(np.linalg.eigvalsh(self.matrix * self.delta)[0])


@dataclass(frozen=True)
class ChronocyclicWigner:
    """W[j, k] = W(omega_j, t_k); omega in rad/fs, t in fs."""

    omega: np.ndarray
    t: np.ndarray
    values: np.ndarray
    omega_c: float | None = None

    def integral(self) -> float:
        return float(trapezoid(trapezoid(self.values, self.t, axis=1), self.omega))

    def peak(self):
        j, k = np.unravel_index(np.argmax(self.values), self.values.shape)
        return float(self.omega[j]), float(self.t[k])


@dataclass(frozen=True)
class IntensityProfile:
    axis: np.ndarray
    density: np.ndarray

    @classmethod
    def normalized(cls, axis, values):
        axis = np.asarray(axis, dtype=float)
        values = np.asarray(values, dtype=float)
        return cls(axis, values / trapezoid(values, axis))

    def integral(self) -> float:
        return float(trapezoid(self.density, self.axis))

    def centroid(self) -> float:
        return float(trapezoid(self.axis * self.density, self.axis) / self.integral())


@dataclass(frozen=True)
class WidthMeasurement:
    half_width: float
    left: float
    right: float
    peak: float
    convention: str = "e^-1 of max"


def heralded_density_matrix(jsa: JointSpectralAmplitude, filters: FilterSpec | None = None,
                            efficiency=None) -> HeraldedDensityMatrix:
    """Condition the signal on a trigger detection.

    R[j, k] = sum_m g(w_m) f[j, m] conj(f[k, m]) delta, rescaled to unit trace.
    The trigger efficiency comes from ``efficiency`` (array on the grid) if
    given, else from ``filters`` (default: the JSA's own filters).
    """
    grid = jsa.grid
    if efficiency is None:
        filters = jsa.filters if filters is None else filters
        filtered = filters.trigger_filtered
        g = trigger_efficiency(grid.omega, filters, grid.center)
    else:
        g = np.asarray(efficiency, dtype=float)
        filtered = not np.allclose(g, g.flat[0])
    f = jsa.values
    weight = np.sum(g[None, :] * np.abs(f) ** 2) * grid.spacing**2
    if not weight > 1e-14:
        raise EmptyHeraldingError(
            f"trigger efficiency overlaps the joint amplitude with weight {weight:.3g}; "
            "the trigger filter lies outside the grid support"
        )
    r = (f * g[None, :]) @ f.conj().T * grid.spacing
    r /= np.trace(r).real * grid.spacing
    return HeraldedDensityMatrix(grid, r, filtered)


def _offset_diagonals(r):
    """A[j, m] = R[j + m, j - m] for m = -N/2 .. N/2 - 1, zero where out of range."""
    n = r.shape[0]
    j = np.arange(n)[:, None]
    m = np.arange(-(n // 2), n - n // 2)[None, :]
    rows, cols = j + m, j - m
    valid = (rows >= 0) & (rows < n) & (cols >= 0) & (cols < n)
    a = np.zeros((n, n), dtype=complex)
    a[valid] = r[rows[valid], cols[valid]]
    return a


def fft_time_axis(grid: FrequencyGrid):
    """Conjugate time axis of the even-offset sampling, in fs."""
    n = grid.size
    return (np.arange(n) - n // 2) * np.pi / (n * grid.spacing)


def numerical_cwf(rho: HeraldedDensityMatrix, times=None, check_imag=True) -> ChronocyclicWigner:
    """Chronocyclic Wigner function of the heralded photon.

    Parameters
    ----------
    rho : HeraldedDensityMatrix
    times : array, optional
        Uniformly spaced times (fs).  Default is the full FFT axis
        ``fft_time_axis(rho.grid)``.
    """
    grid = rho.grid
    n, delta = grid.size, grid.spacing
    a = _offset_diagonals(rho.matrix)
    if times is None:
        t = fft_time_axis(grid)
        s = np.fft.fftshift(np.fft.ifft(np.fft.ifftshift(a, axes=1), axis=1), axes=1) * n
    else:
        t = np.asarray(times, dtype=float)
        if t.size < 2:
            raise ValueError("need at least two time samples")
        dt = t[1] - t[0]
        if not np.allclose(np.diff(t), dt, rtol=1e-9, atol=0):
            raise ValueError("times must be uniformly spaced")
        m0 = -(n // 2)
        s = czt(a, m=t.size, w=np.exp(2j * delta * dt), a=np.exp(-2j * delta * t[0]), axis=1)
        s *= np.exp(2j * m0 * delta * t)[None, :]
    s *= 2 * delta / (2 * np.pi)
    if check_imag:
        scale = np.max(np.abs(s.real))
        resid = np.max(np.abs(s.imag))
        if resid > 1e-10 * scale + 1e-300:
            raise ContractError(f"Wigner function has imaginary residue {resid / scale:.2e}; "
                                "density matrix is not Hermitian")
    return ChronocyclicWigner(grid.omega.copy(), t, np.ascontiguousarray(s.real),
                              omega_c=grid.center)


def marginals(w: ChronocyclicWigner):
    """(spectral, temporal) intensity profiles, each with unit integral."""
    i_omega = trapezoid(w.values, w.t, axis=1)
    i_t = trapezoid(w.values, w.omega, axis=0)
    return IntensityProfile.normalized(w.omega, i_omega), IntensityProfile.normalized(w.t, i_t)


def adaptive_cwf(rho: HeraldedDensityMatrix, samples_per_width=24, max_points=2048,
                 support=1e-7) -> ChronocyclicWigner:
    """CWF on a time window fitted to the photon.

    The full FFT axis is used first to locate the temporal support (where the
    temporal marginal exceeds ``support`` times its peak); the window is then
    resampled with a chirp-z transform so that the e^-1 half width spans at
    least ``samples_per_width`` samples, with at most ``max_points`` samples.
    """
    coarse = numerical_cwf(rho)
    _, i_t = marginals(coarse)
    t, y = i_t.axis, i_t.density
    inside = np.where(y >= support * y.max())[0]
    lo = t[max(inside[0] - 2, 0)]
    hi = t[min(inside[-1] + 2, t.size - 1)]
    try:
        half = measure_width(i_t).half_width
    except (ClippedProfileError, DegenerateProfileError):
        return coarse
    step = min(t[1] - t[0], half / samples_per_width)
    npts = int(np.ceil((hi - lo) / step)) + 1
    if npts > max_points:
        npts = max_points
    if npts <= t.size and step >= t[1] - t[0]:
        return coarse
    return numerical_cwf(rho, np.linspace(lo, hi, npts))


def crop_cwf(w: ChronocyclicWigner, support=1e-6) -> ChronocyclicWigner:
    """Restrict W to the rows/columns whose marginal exceeds ``support`` of its peak."""
    i_omega, i_t = marginals(w)

    def window(y):
        idx = np.where(np.abs(y) >= support * np.max(y))[0]
        return slice(max(idx[0] - 1, 0), min(idx[-1] + 2, y.size))

    rows, cols = window(i_omega.density), window(i_t.density)
    return ChronocyclicWigner(w.omega[rows], w.t[cols], w.values[rows, cols], w.omega_c)


def measure_width(profile: IntensityProfile, level=E_INV) -> WidthMeasurement:
    """Half the distance between the outermost crossings of ``level * max``.

    Crossings are linearly interpolated between samples.  Using the outermost
    crossings keeps side lobes of top-hat-like profiles inside the width.
    """
    x, y = profile.axis, profile.density
    k = int(np.argmax(y))
    if k == 0 or k == y.size - 1:
        raise ClippedProfileError("profile maximum lies on the edge of its axis")
    thr = level * y[k]
    above = np.where(y >= thr)[0]
    first, last = above[0], above[-1]
    if first == 0 or last == y.size - 1:
        raise ClippedProfileError("profile does not fall below the e^-1 level inside its axis")
    if first == last:
        raise DegenerateProfileError("profile is a single sample above the e^-1 level")

    def cross(i0, i1):
        return x[i0] + (thr - y[i0]) * (x[i1] - x[i0]) / (y[i1] - y[i0])

    left, right = cross(first - 1, first), cross(last, last + 1)
    return WidthMeasurement((right - left) / 2, float(left), float(right), float(x[k]))


def contour_e1(w: ChronocyclicWigner, level=E_INV):
    """Level set of W at ``level * max(W)`` as a list of (K, 2) arrays of (omega, t).

    Closed curves repeat their first vertex at the end.
    """
    import contourpy

    gen = contourpy.contour_generator(x=w.t, y=w.omega, z=w.values,
                                      line_type=contourpy.LineType.Separate)
    lines = gen.lines(level * float(np.max(w.values)))
    polys = [np.column_stack([ln[:, 1], ln[:, 0]]) for ln in lines if len(ln) >= 3]
    if not polys:
        raise EmptyContourError(f"no contour at level {level:g} of the maximum")
    return polys


def polygon_area(poly) -> float:
    """Shoelace area of a closed (omega, t) polyline, in rad."""
    x, y = poly[:, 0], poly[:, 1]
    return float(0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def main_contour(polys):
    """Largest closed contour from ``contour_e1``."""
    return max(polys, key=polygon_area)


def contour_overlap_error(a, b, center=True) -> float:
    """1 - |A intersect B| / |A union B| for two closed contours.

    Frequencies are scaled by the frequency extent of ``b`` and times by its
    time extent so neither axis dominates.  With ``center=True`` each contour is
    translated so that its centroid sits at the origin first.
    """
    from shapely.geometry import Polygon

    sw = np.ptp(b[:, 0]) or 1.0
    st = np.ptp(b[:, 1]) or 1.0

    def poly(p):
        q = np.column_stack([p[:, 0] / sw, p[:, 1] / st])
        g = Polygon(q).buffer(0)
        if center:
            from shapely.affinity import translate
            c = g.centroid
            g = translate(g, -c.x, -c.y)
        return g

    pa, pb = poly(a), poly(b)
    return float(1 - pa.intersection(pb).area / pa.union(pb).area)


def _joint_temporal(jsa: JointSpectralAmplitude, pad):
    n = jsa.grid.size
    m = n * pad
    ft = np.fft.fftshift(np.fft.ifft2(jsa.values, s=(m, m)))
    t = (np.arange(m) - m // 2) * 2 * np.pi / (m * jsa.grid.spacing)
    return t, np.abs(ft) ** 2


def joint_temporal_intensity(jsa: JointSpectralAmplitude, pad=None):
    """(t axis, |f~(t_s, t_i)|^2) normalized to unit integral."""
    pad = _jti_pad(jsa.grid.size) if pad is None else pad
    t, jti = _joint_temporal(jsa, pad)
    dt = t[1] - t[0]
    return t, jti / (jti.sum() * dt * dt)


def _jti_pad(n, target=2048):
    return max(1, target // n)


def joint_temporal_analysis(jsa: JointSpectralAmplitude, pad=None):
    """Distribution of the emission-time difference and its e^-1 half width.

    The joint temporal intensity is summed along lines t_s - t_i = const;
    on the square time grid those are exactly the matrix diagonals.  The
    frequency grid is zero-padded by ``pad`` (default: up to 2048 points) to
    refine the time sampling.

    Returns
    -------
    (IntensityProfile, float)
        S_-(t_-) and tau_c in fs.
    """
    pad = _jti_pad(jsa.grid.size) if pad is None else pad
    t, jti = _joint_temporal(jsa, pad)
    m = t.size
    diag = (np.arange(m)[:, None] - np.arange(m)[None, :]) + (m - 1)
    s_minus = np.bincount(diag.ravel(), weights=jti.ravel(), minlength=2 * m - 1)
    t_minus = (np.arange(2 * m - 1) - (m - 1)) * (t[1] - t[0])
    edge = max(s_minus[: m // 8].max(), s_minus[-(m // 8):].max())
    if edge > 1e-4 * s_minus.max():
        raise SupportClippedError("joint temporal intensity wraps around the time window")
    profile = IntensityProfile.normalized(t_minus, s_minus)
    return profile, measure_width(profile).half_width
