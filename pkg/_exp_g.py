import time
import numpy as np
from emwave.evolution import Grid, SchemeParams, PhysicsOptions, evolve
from emwave import families
from emwave.initialdata import build_cauchy
from emwave.diagnostics import gauge_monitors

for tag, kw in (("cfl=0.125 sigma=0.1", dict(cfl=0.125)),
                ("cfl=0.25  sigma=0.0", dict(sigma=0.0))):
    t0 = time.monotonic()
    g = Grid(4.0, 32)
    data = families.make_data("conformal", g, eps=1e-3, radius=2.8)
    s = build_cauchy(data, g).to_state()
    evolve(s, g, SchemeParams(**kw), PhysicsOptions(), t_end=10.0)
    r10 = gauge_monitors(s, g).wave_sup
    print(f"conformal n=32 {tag}: r10={r10:.4e} "
          f"[{time.monotonic()-t0:.0f} s]", flush=True)
