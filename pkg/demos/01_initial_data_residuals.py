"""Survey the shipped initial-data families and their constraint quality.

For each analytic family this script reports the sup-norms of the
Hamiltonian, momentum and electric-divergence constraint residuals, and
the wave-gauge / Lorenz residuals of the Cauchy data built from them, at
two resolutions.  The families are constructed to satisfy the
constraints to first order in the amplitude, so the residuals shrink
both with amplitude (quadratically) and with resolution (stencil error
at fourth order).

Run:  python3 demos/01_initial_data_residuals.py
"""

import numpy as np

from emwave.evolution import Grid
from emwave import families
from emwave.initialdata import (build_cauchy, divE_residual,
                                gauge_residual_initial,
                                hamiltonian_residual, momentum_residual)

EPS = 1e-3

for family in ("conformal", "maxwell_packet", "tt_pulse"):
    print(f"\n=== family: {family}  (amplitude {EPS:g}) ===")
    print(f"{'n':>4} {'dx':>8} {'hamiltonian':>12} {'momentum':>12} "
          f"{'div E':>12} {'wave gauge':>12} {'lorenz':>12}")
    for n in (32, 48):
        g = Grid(4.0, n)
        d = families.make_data(family, g, eps=EPS)
        ham = np.abs(g.physical(hamiltonian_residual(d, g))).max()
        mom = np.abs(g.physical(momentum_residual(d, g))).max()
        div = np.abs(g.physical(divE_residual(d, g))).max()
        res = gauge_residual_initial(build_cauchy(d, g), g)
        print(f"{n:>4} {g.dx:>8.4f} {ham:>12.3e} {mom:>12.3e} "
              f"{div:>12.3e} {res.wave_sup:>12.3e} {res.lorenz_sup:>12.3e}")

print("""
Reading the table: the Maxwell packet and the transverse-traceless
pulse cancel the constraints at first order, so their geometric
residuals are O(eps^2) and roughly resolution independent.  The
conformal family is a gauge-compatibility family, not a constraint
solution: its scalar-curvature residual is first order in the
amplitude.  The gauge residuals of the built Cauchy data are pure
discretization error and drop by ~(32/48)^4 ~ 0.2 between the rows.""")
