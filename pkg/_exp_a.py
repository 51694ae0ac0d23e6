import time
import numpy as np
from emwave.evolution import Grid, SchemeParams, PhysicsOptions, evolve
from emwave import families
from emwave.initialdata import build_cauchy
from emwave.diagnostics import gauge_monitors

eps = 1e-3
params = SchemeParams()
print("boundary:", params.boundary, flush=True)
late = {}
for family in ("conformal", "tt_pulse"):
    for n in (32, 48):
        t0 = time.monotonic()
        g = Grid(4.0, n)
        data = families.make_data(family, g, eps=eps)
        s = build_cauchy(data, g).to_state()
        r0 = gauge_monitors(s, g).wave_sup
        evolve(s, g, params, PhysicsOptions(), t_end=10.0)
        r10 = gauge_monitors(s, g).wave_sup
        late[(family, n)] = r10
        print(f"{family} n={n}: r0={r0:.4e} r10={r10:.4e} "
              f"ratio={r10/r0:.2f}  [{time.monotonic()-t0:.0f} s]",
              flush=True)
    dx32, dx48 = 8.0 / 31, 8.0 / 47
    o = np.log(late[(family, 32)] / late[(family, 48)]) / np.log(dx32 / dx48)
    print(f"{family}: t=10 order {o:.2f}", flush=True)
