from .boundedness import BoundednessSweep, CompactnessSweep, boundedness_sweep, compactness_sweep, sweep_quantity
from .power_norms import PowerNormDiagnostics, power_norm_diagnostics, iterate_powers
from .carleson import CarlesonSweep, carleson_sweep, berezin_quantity
from .hilbert_schmidt import HSHardy, HSDirichlet, HSDAlpha, HSReport, hs_hardy, hs_dirichlet, hs_dalpha
