"""Group-velocity-matched source geometries and parameter scans.

Two conditions are solved for degenerate collinear type-II emission:

* SGVM, tau_s + tau_i = 0, i.e. 2 k_p'(2 w_c) = k_o'(w_c) + k_e'(w_c);
* AGVM, tau_s = 0, i.e. the pump travels with one of the daughters.

Each residual is evaluated at the cut angle that phasematches the trial
wavelength, so a root satisfies both conditions at once.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq

from . import gaussian
from .crystal import (CrystalSpec, get_material, inverse_group_velocity, phasematch_angle,
                      walkoff_terms)
from .errors import DesignError, PhotonPairError

# solver tolerances: wavelength in nm; the angle follows from the inner solve
LAMBDA_XTOL = 1e-4
AGVM_QUALITY_THRESHOLD = 10.0
# default length / pump-bandwidth scan for the BBO 800 nm family
DEFAULT_SCAN_LENGTHS = (1.0, 2.0, 3.0, 5.0, 8.0)
DEFAULT_SCAN_BANDWIDTHS = (2.0, 5.0, 10.0)


@dataclass(frozen=True)
class DesignSolution:
    """A degenerate type-II geometry meeting a group-velocity condition.

    Walkoff times refer to ``length`` (mm); ``residual`` is the condition value
    in fs at that length (tau_s + tau_i for SGVM, tau_s for AGVM).
    """

    material: str
    lambda_c: float
    theta: float
    tau_s: float
    tau_i: float
    condition: str
    residual: float
    signal_polarization: str = "o"
    length: float = 1.0

    @property
    def tau_minus(self) -> float:
        return self.tau_s - self.tau_i

    def crystal(self, length=None) -> CrystalSpec:
        return CrystalSpec(self.material, self.theta, self.length if length is None else length,
                           "II", self.signal_polarization)

    def to_dict(self):
        return {"material": self.material, "condition": self.condition,
                "lambda_c_nm": self.lambda_c, "theta_deg": self.theta,
                "signal_polarization": self.signal_polarization, "length_mm": self.length,
                "tau_s_fs": self.tau_s, "tau_i_fs": self.tau_i, "tau_minus_fs": self.tau_minus,
                "residual_fs": self.residual}


def _kprimes(material, lam):
    theta = phasematch_angle(material, "II", lam)
    kp = float(inverse_group_velocity(material, "e", theta, lam / 2))
    ko = float(inverse_group_velocity(material, "o", theta, lam))
    ke = float(inverse_group_velocity(material, "e", theta, lam))
    return theta, kp, ko, ke


def _check_range(lam_range):
    lo, hi = (float(x) for x in lam_range)
    if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi:
        raise DesignError(f"wavelength range must satisfy lo < hi, got [{lo:g}, {hi:g}] nm")
    return lo, hi


def _solve(residual, lo, hi, what):
    try:
        r_lo, r_hi = residual(lo), residual(hi)
    except PhotonPairError as exc:
        raise DesignError(f"{what}: residual undefined at the range ends ({exc})") from exc
    if r_lo * r_hi > 0:
        raise DesignError(f"no {what} point in range [{lo:g}, {hi:g}] nm: the residual does "
                          f"not change sign ({r_lo:.4g} .. {r_hi:.4g} fs/mm)")
    return brentq(residual, lo, hi, xtol=LAMBDA_XTOL)


def _solution(material, lam, condition, polarization, length):
    theta = phasematch_angle(material, "II", lam)
    crystal = CrystalSpec(material, theta, length, "II", polarization)
    w = walkoff_terms(crystal, lam)
    residual = w.tau_s + w.tau_i if condition == "SGVM" else w.tau_s
    return DesignSolution(get_material(material).name, float(lam), float(theta), w.tau_s,
                          w.tau_i, condition, float(residual), polarization, float(length))


def find_sgvm(material, lam_range, length=1.0) -> DesignSolution:
    """Wavelength and cut angle where tau_s + tau_i = 0.

    Raises
    ------
    DesignError
        If the residual has no sign change over ``lam_range`` (nm).
    """
    lo, hi = _check_range(lam_range)

    def residual(lam):
        _, kp, ko, ke = _kprimes(material, lam)
        return 2 * kp - ko - ke

    lam = _solve(residual, lo, hi, "SGVM")
    return _solution(material, lam, "SGVM", "o", length)


def find_agvm(material, lam_range, matched_wave="signal", length=1.0) -> DesignSolution:
    """Wavelength and cut angle where the pump and the signal share a group velocity.

    The ordinary daughter is tried first, then the extraordinary one; the one
    whose residual changes sign over the range becomes the signal.
    """
    if matched_wave != "signal":
        raise DesignError(f"matched_wave must be 'signal', got {matched_wave!r}")
    lo, hi = _check_range(lam_range)
    errors = []
    for pol in ("o", "e"):
        def residual(lam, pol=pol):
            _, kp, ko, ke = _kprimes(material, lam)
            return kp - (ko if pol == "o" else ke)

        try:
            lam = _solve(residual, lo, hi, "AGVM")
        except DesignError as exc:
            errors.append(str(exc))
            continue
        return _solution(material, lam, "AGVM", pol, length)
    raise DesignError(errors[0])


def agvm_quality(solution: DesignSolution, length, sigma) -> float:
    """sigma |tau_i| at crystal length ``length`` mm; >> 1 makes the heralded photon pure."""
    if solution.condition != "AGVM":
        raise DesignError("agvm_quality needs an AGVM solution")
    return float(sigma * abs(solution.tau_i) * length / solution.length)


def sgvm_pump_sigma(solution: DesignSolution, length, gamma=gaussian.GAMMA) -> float:
    """Pump width sigma* (rad/fs) at which T_si = 0 for an SGVM crystal of ``length`` mm."""
    if solution.condition != "SGVM":
        raise DesignError("sgvm_pump_sigma needs an SGVM solution")
    tau_i = solution.tau_i * length / solution.length
    return float(2 / (math.sqrt(gamma) * abs(tau_i)))


# --- scans ------------------------------------------------------------------

SCAN_FIELDS = ("length_mm", "pump_fwhm_nm", "tb_an", "K", "delta_t_an_fs", "delta_t_num_fs",
               "delta_omega_num_rad_per_fs", "tau_c_num_fs", "ratio_dt", "error")


@dataclass
class ScanTable:
    """One record per (length, pump bandwidth) cell, row-major in ``lengths``."""

    lengths: list
    bandwidths: list
    records: list
    metadata: dict = field(default_factory=dict)

    def column(self, name):
        return np.array([r[name] if r[name] is not None else np.nan for r in self.records],
                        dtype=float)

    def cell(self, length, bandwidth):
        for r in self.records:
            if r["length_mm"] == length and r["pump_fwhm_nm"] == bandwidth:
                return r
        raise KeyError((length, bandwidth))


def _scan_cell(base, length, fwhm):
    from .pipeline import run_pipeline

    rec = dict.fromkeys(SCAN_FIELDS)
    rec["length_mm"], rec["pump_fwhm_nm"] = length, fwhm
    cfg = replace(base, length_mm=length, pump_fwhm_nm=fwhm, joint_temporal=True,
                  numerical=True, schmidt=True, analytic=True)
    try:
        res = run_pipeline(cfg)
    except PhotonPairError as exc:
        rec["error"] = f"{type(exc).__name__}: {exc}"
        return rec
    num = res.numerical or {}
    rec.update(K=res.entanglement.K if res.entanglement else None,
               delta_t_num_fs=num.get("delta_t_fs"),
               delta_omega_num_rad_per_fs=num.get("delta_omega_rad_per_fs"),
               tau_c_num_fs=num.get("tau_c_fs"))
    if res.gaussian is not None:
        rec["tb_an"], rec["delta_t_an_fs"] = res.gaussian.tb, res.gaussian.delta_t
        if rec["delta_t_num_fs"] is not None:
            rec["ratio_dt"] = rec["delta_t_num_fs"] / rec["delta_t_an_fs"]
    elif res.errors:
        rec["error"] = "; ".join(res.errors.values())
    return rec


def scan(base, lengths, bandwidths, threads=1) -> ScanTable:
    """Run the full pipeline over every (length, pump FWHM) pair.

    ``base`` is a :class:`photonpair.pipeline.ScenarioConfig`; its length and
    pump bandwidth are replaced per cell.  Failures are stored in the
    ``error`` field of the cell and the scan carries on.
    """
    lengths = [float(x) for x in lengths]
    bandwidths = [float(x) for x in bandwidths]
    cells = [(length, bw) for length in lengths for bw in bandwidths]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(lambda c: _scan_cell(base, *c), cells))
    else:
        records = [_scan_cell(base, *c) for c in cells]
    from . import __version__
    from .crystal import sellmeier_table

    meta = {"base": base.to_dict(), "lengths_mm": lengths, "pump_fwhm_nm": bandwidths,
            "fields": list(SCAN_FIELDS), "version": __version__,
            "sellmeier_version": sellmeier_table()[0]}
    return ScanTable(lengths, bandwidths, records, meta)
