import time
import numpy as np
from emwave.evolution import Grid, SchemeParams, PhysicsOptions, evolve
from emwave import families
from emwave.initialdata import build_cauchy
from emwave.diagnostics import gauge_monitors

params = SchemeParams()
MARGINS = (0.0, 0.5, 1.0, 1.5, 2.0)

def report(tag, gm, g):
    wmag = np.sqrt((g.physical(gm.wave) ** 2).sum(axis=0))
    X, Y, Z = g.physical(g.X), g.physical(g.Y), g.physical(g.Z)
    sups = []
    for m in MARGINS:
        box = (np.abs(X) <= 4.0 - m) & (np.abs(Y) <= 4.0 - m) \
              & (np.abs(Z) <= 4.0 - m)
        sups.append(wmag[box].max())
    print(tag, " l2=%.4e " % gm.wave_l2,
          " ".join("m%.1f=%.4e" % (m, s) for m, s in zip(MARGINS, sups)),
          flush=True)

for family in ("conformal", "tt_pulse"):
    for n in (24, 32, 48):
        t0 = time.monotonic()
        g = Grid(4.0, n)
        data = families.make_data(family, g, eps=1e-3)
        s = build_cauchy(data, g).to_state()
        report(f"{family} n={n} t=0 ", gauge_monitors(s, g), g)
        evolve(s, g, params, PhysicsOptions(), t_end=10.0)
        report(f"{family} n={n} t=10", gauge_monitors(s, g), g)
        print(f"  [{time.monotonic()-t0:.0f} s]", flush=True)
