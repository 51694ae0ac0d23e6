"""Method-of-lines evolution of the coupled wave-gauge system.

State layout: 14 scalar wave fields per grid point, components 0..9 the
symmetric metric perturbation h, components 10..13 the one-form A.  The
second-order equations are reduced to first order in time,

    d_t u = v,
    d_t v = (RHS - 2 g^{0i} d_i v - g^{ij} d_i d_j u) / g^{00},

and integrated with classical RK4 plus Kreiss-Oliger dissipation on both
u and v.  Grid arrays carry `gw` ghost layers per side; ghosts are
refilled (periodic copy or polynomial extrapolation) before every
derivative evaluation, and Sommerfeld outflow conditions overwrite the
time derivatives on the outer physical shells when requested.
"""

from dataclasses import dataclass, field

import numpy as np

from . import rhs, stencils
from .errors import BlowupError, DegenerateMetricError, StateError
from .tensors import invert_metric

N_FIELDS = 14
H_SLICE = slice(0, 10)
A_SLICE = slice(10, 14)


class Grid:
    """Uniform cube [-L, L]^3 with n physical points per axis.

    Arrays are stored with `gw` ghost layers on each side of each axis,
    so field shapes end in (n + 2 gw,) * 3.  Spacing dx = 2 L / (n - 1).
    """

    def __init__(self, L, n, gw=3):
        if n < 2 * gw + 5:
            raise ValueError(f"n = {n} too small for ghost width {gw}")
        self.L = float(L)
        self.n = int(n)
        self.gw = int(gw)
        self.dx = 2.0 * self.L / (self.n - 1)
        ax = self.L + self.gw * self.dx
        self.coord1d = np.linspace(-ax, ax, self.n + 2 * self.gw)
        self.shape = (self.n + 2 * self.gw,) * 3
        self.X, self.Y, self.Z = np.meshgrid(
            self.coord1d, self.coord1d, self.coord1d, indexing="ij")
        self.R = np.sqrt(self.X ** 2 + self.Y ** 2 + self.Z ** 2)

    @property
    def interior(self):
        """Slice tuple selecting the physical region of one axis triple."""
        s = slice(self.gw, self.gw + self.n)
        return (s, s, s)

    def physical(self, arr):
        """View of arr restricted to physical points (trailing 3 axes)."""
        idx = (Ellipsis,) + self.interior
        return arr[idx]

    def zeros(self, *lead):
        return np.zeros(tuple(lead) + self.shape)

    def describe(self):
        return {"L": self.L, "n": self.n, "ghost": self.gw}


@dataclass
class SchemeParams:
    """Discretization knobs for a run."""
    cfl: float = 0.25
    sigma: float = 0.1
    order: int = 4
    boundary: str = "sommerfeld"   # or "periodic"
    g00_guard: float = 0.5


@dataclass
class PhysicsOptions:
    """Equation-level switches.

    linearize: drop the quadratic right-hand sides and use the Minkowski
    inverse metric, so every component obeys the flat wave equation.
    freeze_h: pin the metric perturbation to zero and evolve A alone.
    """
    linearize: bool = False
    freeze_h: bool = False


@dataclass
class EvolutionState:
    u: np.ndarray        # (14,) + grid.shape
    v: np.ndarray        # (14,) + grid.shape
    t: float = 0.0

    def copy(self):
        return EvolutionState(self.u.copy(), self.v.copy(), self.t)


def new_state(grid):
    return EvolutionState(grid.zeros(N_FIELDS), grid.zeros(N_FIELDS), 0.0)


def fill_ghosts(arr, grid, boundary):
    """Refill ghost layers of arr in place along the trailing 3 axes."""
    gw = grid.gw
    n = grid.n
    for ax in (-3, -2, -1):
        if boundary == "periodic":
            # physical points at indices gw .. gw+n-1; identify the two ends
            src_lo = _axslice(arr, ax, n - 1, n - 1 + gw)
            src_hi = _axslice(arr, ax, gw + 1, 2 * gw + 1)
            _axslice_set(arr, ax, 0, gw, src_lo)
            _axslice_set(arr, ax, gw + n, 2 * gw + n, src_hi)
        elif boundary == "sommerfeld":
            _extrapolate_axis(arr, ax, gw)
        else:
            raise ValueError(f"unknown boundary {boundary!r}")
    return arr


def _axslice(arr, ax, lo, hi):
    sl = [slice(None)] * arr.ndim
    sl[ax] = slice(lo, hi)
    return arr[tuple(sl)]


def _axslice_set(arr, ax, lo, hi, val):
    sl = [slice(None)] * arr.ndim
    sl[ax] = slice(lo, hi)
    arr[tuple(sl)] = val


def _line(arr, ax, i):
    sl = [slice(None)] * arr.ndim
    sl[ax] = i
    return arr[tuple(sl)]


def _extrapolate_axis(arr, ax, gw):
    """Cubic extrapolation of each ghost layer from the nearest interior."""
    m = arr.shape[ax]
    # fill outward so deeper ghosts reuse the layer just written
    for k in range(1, gw + 1):
        lo = gw - k
        val = (4.0 * _line(arr, ax, lo + 1) - 6.0 * _line(arr, ax, lo + 2)
               + 4.0 * _line(arr, ax, lo + 3) - _line(arr, ax, lo + 4))
        _line_set(arr, ax, lo, val)
        hi = m - 1 - lo
        val = (4.0 * _line(arr, ax, hi - 1) - 6.0 * _line(arr, ax, hi - 2)
               + 4.0 * _line(arr, ax, hi - 3) - _line(arr, ax, hi - 4))
        _line_set(arr, ax, hi, val)


def _line_set(arr, ax, i, val):
    sl = [slice(None)] * arr.ndim
    sl[ax] = i
    arr[tuple(sl)] = val


# second-derivative pair order for the symmetric 6-storage hessian
HESS_PAIRS = ((0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2))
HESS_INDEX = {(i, j): k for k, (i, j) in enumerate(HESS_PAIRS)}
for (_i, _j), _k in list(HESS_INDEX.items()):
    HESS_INDEX[(_j, _i)] = _k


def spatial_gradient(u, grid, order=4):
    """d_i u for i = 1..3, returned as (3,) + u.shape."""
    out = np.empty((3,) + u.shape)
    for i, ax in enumerate((-3, -2, -1)):
        out[i] = stencils.diff1(u, grid.dx, ax, order)
    return out


def spatial_hessian(u, grid, order=4, grad=None):
    """d_i d_j u in symmetric 6-storage (xx, xy, xz, yy, yz, zz).

    When the gradient is already available the mixed components reuse it
    (a first-derivative stencil applied to the gradient, identical to the
    nested application).
    """
    out = np.empty((6,) + u.shape)
    axes = (-3, -2, -1)
    if grad is None:
        grad = spatial_gradient(u, grid, order)
    for k, (i, j) in enumerate(HESS_PAIRS):
        if i == j:
            out[k] = stencils.diff2(u, grid.dx, axes[i], order)
        else:
            out[k] = stencils.diff1(grad[j], grid.dx, axes[i], order)
    return out


def laplacian(u, grid, order=4):
    """Sum of the three unmixed second derivatives."""
    out = stencils.diff2(u, grid.dx, -3, order)
    out += stencils.diff2(u, grid.dx, -2, order)
    out += stencils.diff2(u, grid.dx, -1, order)
    return out


def second_time_derivative(u, v, grad_u, grad_v, hess_u,
                           physics=None, g00_guard=0.5):
    """Pointwise d_t^2 of all 14 fields from the reduced wave equations.

    u, v: (14, ...); grad_u, grad_v: (3, 14, ...); hess_u: (6, 14, ...)
    in the HESS_PAIRS order.  The trailing axes may be any grid/batch
    shape.  Raises DegenerateMetricError when the hyperbolicity guard
    -g^{00} >= g00_guard fails.
    """
    physics = physics or PhysicsOptions()
    if physics.linearize or physics.freeze_h:
        acc = hess_u[0] + hess_u[3] + hess_u[5]  # flat wave: Laplacian
        if physics.freeze_h:
            acc = acc.copy()
            acc[H_SLICE] = 0.0
        return acc

    h = u[H_SLICE]
    ginv = invert_metric(h, g00_limit=1.0 - g00_guard + 1e-12)
    g00 = ginv.g[0, 0]
    if np.min(-g00) < g00_guard:
        raise DegenerateMetricError(
            f"hyperbolicity guard: min(-g^00) = {np.min(-g00):g}"
            f" < {g00_guard:g}")

    # first-derivative tables in the layout the assembly kernels expect
    dh = np.empty((4,) + h.shape)
    dh[0] = v[H_SLICE]
    dh[1:] = grad_u[:, H_SLICE]
    dA = np.empty((4, 4) + h.shape[1:])
    dA[0] = v[A_SLICE]
    dA[1:] = grad_u[:, A_SLICE]

    f_rhs, j_rhs = rhs.assemble_both(h, dh, dA, ginv=ginv.g)
    rhs_all = np.empty_like(u)
    rhs_all[H_SLICE] = f_rhs
    rhs_all[A_SLICE] = j_rhs

    acc = rhs_all
    for i in range(3):
        acc -= (2.0 * ginv.g[0, i + 1])[None] * grad_v[i]
    for k, (i, j) in enumerate(HESS_PAIRS):
        w = 1.0 if i == j else 2.0
        acc -= (w * ginv.g[i + 1, j + 1])[None] * hess_u[k]
    acc /= g00
    return acc


def _sommerfeld_shell(grid, depth=2):
    """Boolean mask of the outer `depth` physical layers (physical shape)."""
    n = grid.n
    idx = np.arange(n)
    near_edge = (idx < depth) | (idx >= n - depth)
    mask = (near_edge[:, None, None] | near_edge[None, :, None]
            | near_edge[None, None, :])
    return mask


class _SommerfeldCache:
    """Outflow geometry: hard outer shell plus a smooth blend layer.

    The outgoing condition replaces the interior equations outright on
    the outer `depth` physical layers; switching operators abruptly
    there reflects a noticeable fraction of outgoing waves back into the
    domain, so over a fixed physical width inside the shell the two are
    cross-faded with a cos^2 ramp, which makes the reflection spectrally
    small.
    """

    def __init__(self, grid, depth=2, width=1.0):
        self.mask = _sommerfeld_shell(grid, depth)
        phys = grid.physical
        X, Y, Z = phys(grid.X), phys(grid.Y), phys(grid.Z)
        edge = float(X.max())
        dist = edge - np.maximum(np.abs(X), np.maximum(np.abs(Y),
                                                       np.abs(Z)))
        self.blend = (dist < width) & ~self.mask
        self.gamma = np.cos(0.5 * np.pi * dist[self.blend] / width) ** 2
        self.inv_r = 1.0 / np.maximum(phys(grid.R)[self.mask], 1e-12)
        self.inv_r_b = 1.0 / np.maximum(phys(grid.R)[self.blend], 1e-12)
        self.omega = np.stack([X[self.mask], Y[self.mask],
                               Z[self.mask]]) * self.inv_r
        self.omega_b = np.stack([X[self.blend], Y[self.blend],
                                 Z[self.blend]]) * self.inv_r_b


def time_derivatives(state, grid, params, physics=None, bc_cache=None):
    """Full semidiscrete right-hand side (du, dv) at the physical points.

    Ghosts of the state are refilled in place.  Returned arrays have the
    full ghosted shape with valid values on the physical region.
    """
    physics = physics or PhysicsOptions()
    linear = physics.linearize or physics.freeze_h
    # with the metric frozen only the potential block moves
    sub = A_SLICE if physics.freeze_h else slice(None)

    us = state.u[sub]
    vs = state.v[sub]
    fill_ghosts(us, grid, params.boundary)
    fill_ghosts(vs, grid, params.boundary)

    du = np.zeros_like(state.u)
    dv = np.zeros_like(state.u)
    du[sub] = vs
    dus = du[sub]
    dvs = dv[sub]

    grad_u = spatial_gradient(us, grid, params.order)
    grad_v = spatial_gradient(vs, grid, params.order)
    phys = grid.physical
    if linear:
        acc = laplacian(us, grid, params.order)
        phys(dvs)[...] = phys(acc)
    else:
        hess_u = spatial_hessian(us, grid, params.order, grad=grad_u)
        acc = second_time_derivative(
            phys(us), phys(vs), phys(grad_u), phys(grad_v),
            phys(hess_u), physics, params.g00_guard)
        phys(dvs)[...] = acc

    if params.sigma > 0.0:
        diss_u = stencils.ko_dissipation(
            us, grid.dx, params.sigma, params.order)
        diss_v = stencils.ko_dissipation(
            vs, grid.dx, params.sigma, params.order)
        phys(dus)[...] += phys(diss_u)
        phys(dvs)[...] += phys(diss_v)

    if params.boundary == "sommerfeld":
        if bc_cache is None:
            bc_cache = _SommerfeldCache(grid)
        m = bc_cache.mask
        b = bc_cache.blend
        gam = bc_cache.gamma
        for arr, grad, der in ((us, grad_u, dus), (vs, grad_v, dvs)):
            a = phys(arr)[:, m]
            radial = np.einsum('ic...,i...->c...',
                               phys(grad)[:, :, m], bc_cache.omega)
            phys(der)[:, m] = -radial - a * bc_cache.inv_r
            ab = phys(arr)[:, b]
            radial_b = np.einsum('ic...,i...->c...',
                                 phys(grad)[:, :, b], bc_cache.omega_b)
            target = -radial_b - ab * bc_cache.inv_r_b
            phys(der)[:, b] = ((1.0 - gam) * phys(der)[:, b]
                               + gam * target)
    return du, dv


@dataclass
class StepController:
    """Reusable per-run scratch: boundary cache and last dt used."""
    grid: Grid
    params: SchemeParams
    physics: PhysicsOptions = field(default_factory=PhysicsOptions)

    def __post_init__(self):
        self.bc = (_SommerfeldCache(self.grid)
                   if self.params.boundary == "sommerfeld" else None)

    def dt(self, state):
        hmax = float(np.max(np.abs(self.grid.physical(state.u[H_SLICE]))))
        return self.params.cfl * self.grid.dx / (1.0 + 4.0 * hmax)


def step(state, grid, params, physics=None, dt=None, controller=None):
    """Advance one classical RK4 step in place; returns the state.

    Raises BlowupError when non-finite values appear after the update.
    """
    physics = physics or PhysicsOptions()
    if controller is None:
        controller = StepController(grid, params, physics)
    if dt is None:
        dt = controller.dt(state)

    u0, v0, t0 = state.u, state.v, state.t

    def f(us, vs, ts):
        s = EvolutionState(us, vs, ts)
        return time_derivatives(s, grid, params, physics, controller.bc)

    k1u, k1v = f(u0.copy(), v0.copy(), t0)
    k2u, k2v = f(u0 + 0.5 * dt * k1u, v0 + 0.5 * dt * k1v, t0 + 0.5 * dt)
    k3u, k3v = f(u0 + 0.5 * dt * k2u, v0 + 0.5 * dt * k2v, t0 + 0.5 * dt)
    k4u, k4v = f(u0 + dt * k3u, v0 + dt * k3v, t0 + dt)

    state.u = u0 + (dt / 6.0) * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
    state.v = v0 + (dt / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
    state.t = t0 + dt

    bad = ~np.isfinite(grid.physical(state.u))
    if bad.any():
        loc = np.unravel_index(np.argmax(bad), bad.shape)
        raise BlowupError("non-finite field value after step",
                          t=state.t, location=tuple(int(i) for i in loc))
    return state


def evolve(state, grid, params, physics=None, t_end=None, n_steps=None,
           callback=None):
    """Step until t_end (or for n_steps), calling callback(state) after
    each step.  Exactly one of t_end / n_steps must be given."""
    if (t_end is None) == (n_steps is None):
        raise StateError("give exactly one of t_end or n_steps")
    physics = physics or PhysicsOptions()
    controller = StepController(grid, params, physics)
    count = 0
    while True:
        if n_steps is not None and count >= n_steps:
            break
        if t_end is not None and state.t >= t_end - 1e-12:
            break
        dt = controller.dt(state)
        if t_end is not None and state.t + dt > t_end:
            dt = t_end - state.t
        step(state, grid, params, physics, dt=dt, controller=controller)
        count += 1
        if callback is not None:
            callback(state)
    return state
