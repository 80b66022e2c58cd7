"""Closed-form Gaussian approximation of the heralded photon.

The sinc in the phasematching function is replaced by exp(-gamma x^2) and the
mismatch is kept to first order, so the joint amplitude is a bivariate
Gaussian.  Everything here is an algebraic function of the pump width sigma,
the filter widths and the walkoff times tau_s, tau_i.

Filter widths use ``None`` for "unfiltered"; the corresponding terms vanish.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import PhysicalityError

GAMMA = 0.193


class Moments(NamedTuple):
    """T_ss^2, T_ii^2, T_si^2 in fs^2.  ``tsi2`` is signed."""

    tss2: float
    tii2: float
    tsi2: float

    @property
    def determinant(self):
        return self.tss2 * self.tii2 - self.tsi2**2


def _inv_sq(width):
    if width is None or math.isinf(width):
        return 0.0
    return 1.0 / width**2


def second_moments(sigma, sigma_F=None, sigma_g=None, tau_s=0.0, tau_i=0.0,
                   gamma=GAMMA) -> Moments:
    if not sigma > 0:
        raise ValueError("pump width sigma must be positive")
    pump = 2.0 / sigma**2
    filt = 2.0 * _inv_sq(sigma_F)
    tss2 = filt + pump + gamma * tau_s**2 / 2
    tii2 = _inv_sq(sigma_g) + filt + pump + gamma * tau_i**2 / 2
    tsi2 = pump + gamma * tau_s * tau_i / 2
    return Moments(tss2, tii2, tsi2)


def _check(m: Moments):
    det = m.determinant
    # relative test so that exact cancellations (type I) are caught
    if not det > 1e-12 * m.tss2 * m.tii2:
        raise PhysicalityError(
            "Gaussian model is degenerate: T_ss^2 T_ii^2 <= T_si^4 "
            f"({m.tss2 * m.tii2:.6g} vs {m.tsi2**2:.6g}); signal and idler are "
            "perfectly correlated within the linear-dispersion approximation"
        )
    return det


def widths(m: Moments):
    """(Delta t in fs, Delta omega in rad/fs), e^-1 half widths."""
    det = _check(m)
    return math.sqrt(m.tss2), math.sqrt(m.tii2) / math.sqrt(det)


def shifts(tau_s, sigma_g, omega_g0, omega_c, m: Moments):
    """(T in fs, Omega in rad/fs): the CWF peaks at (omega_c - Omega, T)."""
    t_shift = tau_s / 2
    if sigma_g is None or math.isinf(sigma_g):
        return t_shift, 0.0
    det = _check(m)
    return t_shift, (1.0 / sigma_g**2) * m.tsi2 / det * (omega_g0 - omega_c)


def time_bandwidth(m: Moments) -> float:
    _check(m)
    return (1.0 - m.tsi2**2 / (m.tss2 * m.tii2)) ** -0.5


def correlation_time(sigma_F, tau_s, tau_i, gamma=GAMMA) -> float:
    """e^-1 half width of the emission-time-difference distribution."""
    tau_minus = tau_s - tau_i
    if sigma_F is None or math.isinf(sigma_F):
        return math.sqrt(gamma / 2) * abs(tau_minus)
    return math.sqrt(8 + gamma * sigma_F**2 * tau_minus**2) / (math.sqrt(2) * sigma_F)


def heralded_duration_vs_pump(tau_p, sigma_F, tau_s, gamma=GAMMA) -> float:
    if not tau_p > 0:
        raise ValueError("pump duration must be positive")
    filt = 0.0 if sigma_F is None or math.isinf(sigma_F) else 2 / (sigma_F**2 * tau_p**2)
    return tau_p * math.sqrt(1 + filt + gamma / 2 * tau_s**2 / tau_p**2)


def cw_limit_time_bandwidth(sigma, tau_minus, gamma=GAMMA) -> float:
    """Leading small-sigma behaviour of TB without filters."""
    return 2.0 / (math.sqrt(gamma) * sigma * abs(tau_minus))


@dataclass(frozen=True)
class GaussianReport:
    delta_t: float
    delta_omega: float
    tb: float
    t_shift: float
    omega_shift: float
    tau_c: float
    tau_p: float
    moments: Moments
    tau_s: float
    tau_i: float
    omega_c: float
    gamma: float = GAMMA

    def to_dict(self):
        return {
            "delta_t_fs": self.delta_t,
            "delta_omega_rad_per_fs": self.delta_omega,
            "tb": self.tb,
            "tau_c_fs": self.tau_c,
            "t_shift_fs": self.t_shift,
            "omega_shift_rad_per_fs": self.omega_shift,
            "tau_p_fs": self.tau_p,
            "gamma": self.gamma,
            "tau_s_fs": self.tau_s,
            "tau_i_fs": self.tau_i,
            "omega_c_rad_per_fs": self.omega_c,
            "moments_fs2": dict(zip(("T_ss2", "T_ii2", "T_si2"), self.moments)),
        }

    @classmethod
    def from_dict(cls, d):
        m = d["moments_fs2"]
        return cls(d["delta_t_fs"], d["delta_omega_rad_per_fs"], d["tb"], d["t_shift_fs"],
                   d["omega_shift_rad_per_fs"], d["tau_c_fs"], d["tau_p_fs"],
                   Moments(m["T_ss2"], m["T_ii2"], m["T_si2"]), d["tau_s_fs"], d["tau_i_fs"],
                   d["omega_c_rad_per_fs"], d["gamma"])


def gaussian_report(sigma, tau_s, tau_i, omega_c, sigma_F=None, sigma_g=None,
                    omega_g0=None, gamma=GAMMA) -> GaussianReport:
    m = second_moments(sigma, sigma_F, sigma_g, tau_s, tau_i, gamma)
    dt, dw = widths(m)
    t_shift, omega_shift = shifts(tau_s, sigma_g, omega_c if omega_g0 is None else omega_g0,
                                  omega_c, m)
    return GaussianReport(dt, dw, time_bandwidth(m), t_shift, omega_shift,
                          correlation_time(sigma_F, tau_s, tau_i, gamma), math.sqrt(2) / sigma,
                          m, float(tau_s), float(tau_i), float(omega_c), gamma)


def report_for(crystal, pump, filters, gamma=GAMMA) -> GaussianReport:
    """Gaussian report for a crystal/pump/filter triple."""
    from .crystal import walkoff_terms

    w = walkoff_terms(crystal, pump.lambda_c)
    return gaussian_report(pump.sigma, w.tau_s, w.tau_i, pump.omega_c, filters.sigma_F,
                           filters.sigma_g, filters.omega_g0, gamma)


def analytic_cwf(report: GaussianReport, omega, t, center_time=False, t0=None):
    """Sample the Gaussian CWF on the (omega, t) grid.

    The temporal peak sits at ``t0`` when given, otherwise at T; ``center_time=True``
    puts it at t = 0.
    """
    from .wigner import ChronocyclicWigner

    omega = np.asarray(omega, dtype=float)
    t = np.asarray(t, dtype=float)
    if t0 is None:
        t0 = 0.0 if center_time else report.t_shift
    dw, dt = report.delta_omega, report.delta_t
    spec = np.exp(-((omega - report.omega_c + report.omega_shift) ** 2) / dw**2)
    temp = np.exp(-((t - t0) ** 2) / dt**2)
    values = spec[:, None] * temp[None, :] / (np.pi * dw * dt)
    return ChronocyclicWigner(omega, t, values, omega_c=report.omega_c)
