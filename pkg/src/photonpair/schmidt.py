"""Schmidt decomposition of the joint spectral amplitude.

f(ws, wi) = sum_m sqrt(lambda_m) u_m(ws) v_m(wi), obtained from the singular
value decomposition of the matrix f * delta.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import gaussian
from .crystal import walkoff_terms
from .errors import ContractError
from .state import FilterSpec, JointSpectralAmplitude, build_jsa
from .wigner import HeraldedDensityMatrix, heralded_density_matrix

RANK_CUTOFF = 1e-6


@dataclass(frozen=True)
class SchmidtDecomposition:
    """Schmidt spectrum (descending, summing to one) and mode functions.

    ``u[:, m]`` and ``v[:, m]`` are sampled on the JSA grid and have unit
    delta-weighted norm.  Only the first ``u.shape[1]`` modes are stored.
    """

    eigenvalues: np.ndarray
    u: np.ndarray
    v: np.ndarray
    omega: np.ndarray
    delta: float

    def reconstruct(self, n_modes=None):
        k = self.u.shape[1] if n_modes is None else n_modes
        s = np.sqrt(self.eigenvalues[:k])
        return (self.u[:, :k] * s) @ self.v[:, :k].T


@dataclass(frozen=True)
class EntanglementReport:
    K: float
    purity: float
    purity_trace: float
    discrepancy: float
    visibility: float
    effective_rank: int

    def to_dict(self):
        return {"K": self.K, "purity": self.purity, "purity_trace": self.purity_trace,
                "purity_discrepancy": self.discrepancy, "visibility": self.visibility,
                "effective_rank": self.effective_rank}


def decompose(jsa: JointSpectralAmplitude, n_modes=32) -> SchmidtDecomposition:
    """SVD of f * delta; lambda_m are the squared singular values.

    ``n_modes`` limits how many mode functions are kept (all eigenvalues are
    always returned).  Each u_m is rotated so that its largest-magnitude sample
    is real and positive; v_m absorbs the conjugate phase.
    """
    delta = jsa.delta
    try:
        uu, s, vh = scipy.linalg.svd(jsa.values * delta, full_matrices=False,
                                     lapack_driver="gesdd", check_finite=True)
    except (np.linalg.LinAlgError, ValueError):
        uu, s, vh = scipy.linalg.svd(jsa.values * delta, full_matrices=False,
                                     lapack_driver="gesvd", check_finite=True)
    lam = s**2
    k = min(n_modes, s.size) if n_modes is not None else s.size
    u = uu[:, :k] / np.sqrt(delta)
    v = vh[:k, :].T / np.sqrt(delta)
    idx = np.argmax(np.abs(u), axis=0)
    phase = u[idx, np.arange(k)] / np.abs(u[idx, np.arange(k)])
    u = u / phase[None, :]
    v = v * phase[None, :]
    return SchmidtDecomposition(lam, u, v, jsa.omega.copy(), delta)


def schmidt_number(decomposition: SchmidtDecomposition) -> float:
    lam = decomposition.eigenvalues
    return float(1.0 / np.sum(lam**2))


def purity_report(decomposition: SchmidtDecomposition,
                  rho: HeraldedDensityMatrix | None = None) -> EntanglementReport:
    """Purity by two routes: 1/K and Tr(rho^2) from the density matrix.

    The identity p = 1/K holds only for a frequency-independent trigger
    efficiency, so a trigger-filtered ``rho`` is rejected.
    """
    if rho is not None and rho.trigger_filtered:
        raise ContractError("purity_report needs an unfiltered trigger; p = 1/K does not "
                            "hold with a frequency-dependent trigger efficiency")
    k = schmidt_number(decomposition)
    p = 1.0 / k
    p_trace = rho.purity() if rho is not None else p
    lam = decomposition.eigenvalues
    return EntanglementReport(k, p, p_trace, abs(p - p_trace), p,
                              int(np.count_nonzero(lam > RANK_CUTOFF)))


@dataclass(frozen=True)
class KTBCheck:
    K_numeric: float
    TB_analytic: float
    relative_difference: float
    tolerance: float = 0.02

    @property
    def passed(self) -> bool:
        return self.relative_difference < self.tolerance


def gaussian_k_equals_tb_check(crystal, pump, filters: FilterSpec | None = None, grid=None,
                               gamma=gaussian.GAMMA) -> KTBCheck:
    """Compare the Schmidt number of a Gaussian-PMF JSA with the analytic TB.

    The JSA is built with the sinc replaced by exp(-gamma x^2) and the first-order
    mismatch, i.e. exactly the state the analytic formulas describe.
    """
    filters = FilterSpec() if filters is None else filters
    if filters.trigger_filtered:
        raise ContractError("K = TB holds for an unfiltered trigger")
    jsa = build_jsa(crystal, pump, filters, grid, model="gaussian", dispersion="linear",
                    gamma=gamma)
    k = schmidt_number(decompose(jsa, n_modes=1))
    w = walkoff_terms(crystal, pump.lambda_c)
    tb = gaussian.time_bandwidth(gaussian.second_moments(pump.sigma, filters.sigma_F, None,
                                                         w.tau_s, w.tau_i, gamma))
    return KTBCheck(k, tb, abs(k - tb) / tb)


def entanglement_for(jsa: JointSpectralAmplitude, n_modes=32):
    """Decomposition plus purity report using the unfiltered heralded state."""
    dec = decompose(jsa, n_modes)
    rho = heralded_density_matrix(jsa, FilterSpec())
    return dec, purity_report(dec, rho)
