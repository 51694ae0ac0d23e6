import time
import numpy as np
from emwave.evolution import Grid, SchemeParams, PhysicsOptions, evolve
from emwave import families
from emwave.initialdata import build_cauchy
from emwave.diagnostics import gauge_monitors

params = SchemeParams()
L = 6.0
for family in ("conformal", "tt_pulse"):
    late, dxs = {}, {}
    for n in (36, 48):
        t0 = time.monotonic()
        g = Grid(L, n)
        data = families.make_data(family, g, eps=1e-3)
        s = build_cauchy(data, g).to_state()
        r0 = gauge_monitors(s, g).wave_sup
        evolve(s, g, params, PhysicsOptions(), t_end=10.0)
        r10 = gauge_monitors(s, g).wave_sup
        late[n], dxs[n] = r10, g.dx
        print(f"{family} L={L:g} n={n}: r0={r0:.4e} r10={r10:.4e} "
              f"ratio={r10/r0:.2f} [{time.monotonic()-t0:.0f} s]",
              flush=True)
    o = np.log(late[36] / late[48]) / np.log(dxs[36] / dxs[48])
    print(f"{family}: t=10 order {o:.2f}", flush=True)
