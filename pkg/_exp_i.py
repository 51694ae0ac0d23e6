import time
import numpy as np
from emwave.evolution import Grid, SchemeParams, PhysicsOptions, evolve
from emwave import families
from emwave.initialdata import build_cauchy
from emwave.diagnostics import gauge_monitors

# where does the blended-run tt residual live?
g = Grid(4.0, 32)
data = families.make_data("tt_pulse", g, eps=1e-3)
s = build_cauchy(data, g).to_state()
evolve(s, g, SchemeParams(), PhysicsOptions(), t_end=10.0)
gm = gauge_monitors(s, g)
wmag = np.sqrt((g.physical(gm.wave) ** 2).sum(axis=0))
X, Y, Z = g.physical(g.X), g.physical(g.Y), g.physical(g.Z)
for m in (0.0, 0.5, 1.0, 1.5, 2.0):
    box = (np.abs(X) <= 4 - m) & (np.abs(Y) <= 4 - m) & (np.abs(Z) <= 4 - m)
    print(f"tt n=32 sommerfeld margin {m:.1f}: {wmag[box].max():.4e}",
          flush=True)

# periodic, small eps: physical gauge wave is O(eps^2)
params = SchemeParams(boundary="periodic")
late, dxx = {}, {}
for n in (32, 48):
    t0 = time.monotonic()
    g = Grid(4.0, n)
    data = families.make_data("tt_pulse", g, eps=1e-4)
    s = build_cauchy(data, g).to_state()
    r0 = gauge_monitors(s, g).wave_sup
    evolve(s, g, params, PhysicsOptions(), t_end=10.0)
    r10 = gauge_monitors(s, g).wave_sup
    late[n], dxx[n] = r10, g.dx
    print(f"tt periodic eps=1e-4 n={n}: r0={r0:.4e} r10={r10:.4e} "
          f"ratio={r10/r0:.2f} [{time.monotonic()-t0:.0f} s]", flush=True)
o = np.log(late[32] / late[48]) / np.log(dxx[32] / dxx[48])
print(f"tt periodic: t=10 order(32,48) {o:.2f}", flush=True)
