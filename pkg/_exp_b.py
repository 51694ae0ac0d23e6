import time
import numpy as np
from emwave.evolution import Grid, SchemeParams, PhysicsOptions, evolve
from emwave.evolution import A_SLICE
from emwave import families
from emwave.initialdata import build_cauchy
from emwave.diagnostics import decay_fit

t0 = time.monotonic()
g = Grid(24.0, 96)
data = families.make_data("maxwell_packet", g, eps=1e-2, radius=2.0, power=2)
s = build_cauchy(data, g).to_state()
params = SchemeParams()
physics = PhysicsOptions(freeze_h=True)
times, sups = [], []

def track(state):
    times.append(state.t)
    sups.append(float(np.abs(g.physical(state.u[A_SLICE])).max()))

evolve(s, g, params, physics, t_end=20.0, callback=track)
times = np.asarray(times); sups = np.asarray(sups)
for lo in (5.0, 8.0):
    sel = times >= lo
    p, perr = decay_fit(times[sel], sups[sel])
    print(f"power=2 sigma=def [{lo:g},20]: p={p:.3f}+-{perr:.3f}", flush=True)
print("elapsed", time.monotonic() - t0)
