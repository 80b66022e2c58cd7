"""
Designing a factorable source
=============================

Solve the two group-velocity conditions, pick the pump bandwidth that
removes the spectral correlation, and watch purity approach one.

    python3 demos/02_group_velocity_design.py
"""

from photonpair import design
from photonpair import gaussian as gm
from photonpair.schmidt import gaussian_k_equals_tb_check
from photonpair.state import FilterSpec, PumpSpec

# symmetric matching in BBO: signal and idler walk off by equal and opposite delays
sgvm = design.find_sgvm("BBO", (1300, 1700))
print(f"SGVM  BBO: {sgvm.lambda_c:.1f} nm, theta = {sgvm.theta:.2f} deg")

# at sigma* the cross moment vanishes and the Gaussian model is factorable
length = 2.3
sigma = design.sgvm_pump_sigma(sgvm, length)
pump = PumpSpec.from_sigma(sgvm.lambda_c / 2, sigma)
check = gaussian_k_equals_tb_check(sgvm.crystal(length), pump)
print(f"      pump FWHM for T_si = 0 at {length} mm: {pump.fwhm:.1f} nm, K = {check.K_numeric:.4f}")

# asymmetric matching in KDP: the pump travels with the signal
agvm = design.find_agvm("KDP", (750, 950))
print(f"AGVM  KDP: {agvm.lambda_c:.1f} nm, theta = {agvm.theta:.2f} deg")

# the remaining correlation shrinks as sigma |tau_i| grows with crystal length
pump = PumpSpec(agvm.lambda_c / 2, 5)
for length in (2, 5, 10, 20, 40):
    tb = gm.report_for(agvm.crystal(length), pump, FilterSpec()).tb
    q = design.agvm_quality(agvm, length, pump.sigma)
    print(f"      L = {length:4.0f} mm  sigma|tau_i| = {q:6.1f}  TB = {tb:.4f}  p ~ {1 / tb:.4f}")
