import time
import numpy as np
from emwave.evolution import Grid, SchemeParams, PhysicsOptions, evolve
from emwave import families
from emwave.initialdata import build_cauchy, gauge_residual_initial
from emwave.diagnostics import gauge_monitors

RAD = 2.0
params = SchemeParams()

for family in ("conformal", "tt_pulse"):
    dxs, sups = [], []
    for n in (24, 32, 48, 64, 96):
        g = Grid(4.0, n)
        data = families.make_data(family, g, eps=1e-3, radius=RAD)
        res = gauge_residual_initial(build_cauchy(data, g), g)
        dxs.append(g.dx)
        sups.append(res.wave_sup)
    orders = [np.log(sups[i] / sups[i + 1]) / np.log(dxs[i] / dxs[i + 1])
              for i in range(len(dxs) - 1)]
    print(f"{family} r0:", " ".join("%.3e" % s for s in sups),
          " pair orders:", " ".join("%.2f" % o for o in orders), flush=True)

for family in ("conformal", "tt_pulse"):
    late, dxx = {}, {}
    for n in (24, 32, 48):
        t0 = time.monotonic()
        g = Grid(4.0, n)
        data = families.make_data(family, g, eps=1e-3, radius=RAD)
        s = build_cauchy(data, g).to_state()
        r0 = gauge_monitors(s, g).wave_sup
        evolve(s, g, params, PhysicsOptions(), t_end=10.0)
        r10 = gauge_monitors(s, g).wave_sup
        late[n], dxx[n] = r10, g.dx
        print(f"{family} n={n}: r0={r0:.4e} r10={r10:.4e} "
              f"ratio={r10/r0:.2f} [{time.monotonic()-t0:.0f} s]",
              flush=True)
        if n == 32:
            o = np.log(late[24] / late[32]) / np.log(dxx[24] / dxx[32])
            print(f"{family}: t=10 order(24,32) {o:.2f}", flush=True)
        if n == 48:
            o = np.log(late[32] / late[48]) / np.log(dxx[32] / dxx[48])
            print(f"{family}: t=10 order(32,48) {o:.2f}", flush=True)
