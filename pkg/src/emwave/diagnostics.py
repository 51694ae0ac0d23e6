"""Run-time measurements: decay weight, weighted energies, gauge residual
monitors, null-frame component norms, shell sup-norms and decay-rate fits.

The decay weight in q := r - t is

    w(q) = 1 + (1 + |q|)^{1+2 gamma}   for q > 0
    w(q) = 1 + (1 + |q|)^{-2 mu}       for q < 0      (both branches give
                                                       w(0) = 2)
    w'(q) = (1 + 2 gamma)(1 + q)^{2 gamma}        for q > 0
    w'(q) = 2 mu (1 - q)^{-2 mu - 1}              for q < 0

with gamma, mu in the open interval (0, 1/2).

The order-N energy sums, over all ordered words I of length <= N in the
11 commuting fields,

    E_N = sum_I ( ||sqrt(w) dZ^I h||_L2 + ||sqrt(w) dZ^I A||_L2 ),

a sum of norms (not a norm of sums), with d the full spacetime gradient
and trapezoidal quadrature over the physical region.  The record also
carries the w'-weighted flux integral of the cone-tangential derivative
|dbar Z^I u|^2, the quantity whose time integral the energy inequality
controls.
"""

from dataclasses import dataclass, field

import numpy as np

from . import zfields
from .errors import ConfigError, FitError
from .evolution import A_SLICE, H_SLICE, spatial_gradient
from .nullframe import FramePoint, frame_norm
from .tensors import invert_metric, sym_to_full


def check_profile(gamma, mu):
    if not (0.0 < gamma < 0.5):
        raise ConfigError(f"gamma = {gamma:g} outside the open (0, 1/2)")
    if not (0.0 < mu < 0.5):
        raise ConfigError(f"mu = {mu:g} outside the open (0, 1/2)")


def decay_weight(q, gamma=0.25, mu=0.25):
    """Weight w(q) and derivative w'(q); q may be any array."""
    check_profile(gamma, mu)
    q = np.asarray(q, dtype=float)
    pos = q > 0.0
    w = np.empty(q.shape)
    wp = np.empty(q.shape)
    qp = np.where(pos, q, 0.0)
    qn = np.where(pos, 0.0, q)
    w[pos] = 1.0 + (1.0 + qp[pos]) ** (1.0 + 2.0 * gamma)
    w[~pos] = 1.0 + (1.0 - qn[~pos]) ** (-2.0 * mu)
    wp[pos] = (1.0 + 2.0 * gamma) * (1.0 + qp[pos]) ** (2.0 * gamma)
    wp[~pos] = 2.0 * mu * (1.0 - qn[~pos]) ** (-2.0 * mu - 1.0)
    return w, wp


def trapezoid_weights(grid):
    """Product trapezoid quadrature weights over the physical region."""
    w1 = np.ones(grid.n)
    w1[0] = 0.5
    w1[-1] = 0.5
    return (w1[:, None, None] * w1[None, :, None] * w1[None, None, :]
            * grid.dx ** 3)


@dataclass
class EnergyRecord:
    """Weighted energies at one time."""
    t: float
    levels: np.ndarray            # E_0 .. E_N, cumulative in word length
    h_part: np.ndarray            # metric-block share per level
    A_part: np.ndarray            # potential-block share per level
    flux: float                   # sum_I int w' |dbar Z^I u|^2 dx

    @property
    def total(self):
        return float(self.levels[-1])


def energy(state, grid, params, physics=None, N=1, gamma=0.25, mu=0.25,
           n_max=2):
    """Order-N weighted energy of an evolution state."""
    check_profile(gamma, mu)
    if N < 0 or N > n_max:
        raise ConfigError(f"energy order {N} outside 0..{n_max}")
    jet = zfields.build_jet(state, grid, params, physics, depth=N + 1)
    t = state.t

    xp = grid.physical(grid.X)
    yp = grid.physical(grid.Y)
    zp = grid.physical(grid.Z)
    rp = grid.physical(grid.R)
    q = rp - t
    w, wp = decay_weight(q, gamma, mu)
    quad = trapezoid_weights(grid)
    rsafe = np.maximum(rp, 1e-12)
    om = np.stack([xp, yp, zp]) / rsafe

    h_norms = np.zeros(N + 1)
    a_norms = np.zeros(N + 1)
    flux = 0.0
    for word in zfields.words_up_to(N):
        op = zfields.compose_word(word)
        # spacetime gradient of Z^I u, evaluated through the jet
        dz = []
        for beta in range(4):
            dop = zfields.left_compose(zfields.Z_FIELDS[f"d{beta}"], op)
            dz.append(grid.physical(zfields.apply_op(dop, jet, grid, t)))
        dz = np.stack(dz)                      # (4, 14) + phys
        sq = dz ** 2
        h_sq = sq[:, H_SLICE].sum(axis=(0, 1))
        a_sq = sq[:, A_SLICE].sum(axis=(0, 1))
        h_norms[len(word)] += np.sqrt((w * h_sq * quad).sum())
        a_norms[len(word)] += np.sqrt((w * a_sq * quad).sum())
        # cone-tangential part: dbar_0 = d_t + om.grad, dbar_i = d_i - om_i (om.grad)
        radial = np.einsum('i...,i...->...', om, dz[1:])
        good = (dz[0] + radial) ** 2
        for i in range(3):
            good += (dz[1 + i] - om[i] * radial) ** 2
        flux += (wp * good.sum(axis=0) * quad).sum()

    levels = np.cumsum(h_norms + a_norms)
    return EnergyRecord(t, levels, np.cumsum(h_norms), np.cumsum(a_norms),
                        float(flux))


@dataclass
class GaugeResiduals:
    """Wave-coordinate vector and Lorenz scalar residual fields with norms."""
    wave: np.ndarray        # (4, ...) over the full ghosted grid
    lorenz: np.ndarray
    wave_sup: float
    lorenz_sup: float
    wave_l2: float
    lorenz_l2: float


def gauge_monitors(state, grid, order=4, gamma=0.25, mu=0.25):
    """Gauge residuals of an evolution state at its current time.

    Wave residual Fhat^lambda = g^{lambda mu}(g^{ab} d_a g_{mu b}
    - (1/2) g^{ab} d_mu g_{ab}); Lorenz residual div_g A =
    g^{al} d_l A_a - Fhat^mu A_mu.  Time derivatives come from the
    stored v, spatial derivatives from stencils; norms are sup and
    sqrt(w)-weighted L2 over the physical region with q = r - t.
    """
    h = state.u[H_SLICE]
    hfull = sym_to_full(h)
    htfull = sym_to_full(state.v[H_SLICE])
    shape = h.shape[1:]
    ginv = invert_metric(h).g
    dg = np.empty((4, 4, 4) + shape)
    dg[0] = htfull
    for a in range(4):
        for b in range(a, 4):
            dg[1:, a, b] = spatial_gradient(hfull[a, b], grid, order)
            if b != a:
                dg[1:, b, a] = dg[1:, a, b]
    c = np.einsum('ab...,amb...->m...', ginv, dg, optimize=True)
    s = np.einsum('ab...,mab...->m...', ginv, dg, optimize=True)
    wave = np.einsum('lm...,m...->l...', ginv, c - 0.5 * s, optimize=True)

    A = state.u[A_SLICE]
    dA = np.empty((4, 4) + shape)
    dA[0] = state.v[A_SLICE]
    for a in range(4):
        dA[1:, a] = spatial_gradient(A[a], grid, order)
    lorenz = (np.einsum('al...,la...->...', ginv, dA, optimize=True)
              - np.einsum('m...,m...->...', wave, A))

    wmag = np.sqrt((grid.physical(wave) ** 2).sum(axis=0))
    lmag = np.abs(grid.physical(lorenz))
    w, _ = decay_weight(grid.physical(grid.R) - state.t, gamma, mu)
    quad = trapezoid_weights(grid)
    return GaugeResiduals(
        wave, lorenz,
        float(wmag.max()), float(lmag.max()),
        float(np.sqrt((w * wmag ** 2 * quad).sum())),
        float(np.sqrt((w * lmag ** 2 * quad).sum())))


@dataclass
class FrameMonitors:
    """Exterior maxima of the frame-graded smallness quantities."""
    dH_TU: float            # |dH|_{T U}
    H_LT: float             # |H|_{L T}
    ZH_LL: float            # max over the 11 Z of |Z H|_{L L}
    H_LT_ratio: float       # sup |H|_{L T} / (1 + |q|)
    ZH_LL_ratio: float      # sup over Z of |Z H|_{L L} / (1 + |q|)


def frame_monitors(state, grid, order=4, r_min_factor=2.0):
    """Frame-component monitors of the inverse-metric deviation H.

    Evaluated on the physical points with r > r_min_factor * dx; the
    derivative slot of dH is last and ungraded.
    """
    h = state.u[H_SLICE]
    shape = h.shape[1:]
    inv = invert_metric(h)
    G = inv.g
    H = inv.deviation
    hfull = sym_to_full(h)
    htfull = sym_to_full(state.v[H_SLICE])
    dg = np.empty((4, 4, 4) + shape)     # slots (a, b, derivative)
    dg[:, :, 0] = htfull
    for a in range(4):
        for b in range(a, 4):
            grad = spatial_gradient(hfull[a, b], grid, order)
            for i in range(3):
                dg[a, b, 1 + i] = grad[i]
                if b != a:
                    dg[b, a, 1 + i] = grad[i]
    # dH = d(g^-1) = -G dg G
    dH = -np.einsum('am...,mnd...,nb...->abd...', G, dg, G, optimize=True)

    # restrict to exterior physical points
    mask = grid.physical(grid.R) > r_min_factor * grid.dx
    xs = np.stack([grid.physical(grid.X)[mask],
                   grid.physical(grid.Y)[mask],
                   grid.physical(grid.Z)[mask]])
    t = state.t
    pt = FramePoint(t, xs)
    Hm = grid.physical(H)[..., mask]
    dHm = grid.physical(dH)[..., mask]
    qfac = 1.0 + np.abs(pt.q)

    dH_TU = frame_norm(dHm, ("T", "U"), pt)
    H_LT = frame_norm(Hm, ("L", "T"), pt)
    zh_ll = np.zeros(Hm.shape[2:])
    for name in zfields.Z_ORDER:
        zH = np.zeros_like(Hm)
        for (d,), poly in zfields.Z_FIELDS[name].items():
            coef = poly.evaluate(t, xs[0], xs[1], xs[2])
            zH += coef * dHm[:, :, d]
        zh_ll = np.maximum(zh_ll, frame_norm(zH, ("L", "L"), pt))
    return FrameMonitors(
        float(dH_TU.max(initial=0.0)),
        float(H_LT.max(initial=0.0)),
        float(zh_ll.max(initial=0.0)),
        float((H_LT / qfac).max(initial=0.0)),
        float((zh_ll / qfac).max(initial=0.0)))


def shell_sup(values, grid, t, bin_width=1.0, drop_outer=2):
    """Shell-wise sup of |values| over |q|-bins of the given width.

    values: array whose trailing axes are the grid; leading axes are
    reduced with abs-max first.  Points within drop_outer cells of a box
    face are excluded.  Returns (bin centers in q, sups) for nonempty
    bins.
    """
    mag = np.abs(np.asarray(values))
    while mag.ndim > 3:
        mag = mag.max(axis=0)
    mag = grid.physical(mag) if mag.shape != (grid.n,) * 3 else mag
    edge = grid.L - drop_outer * grid.dx
    keep = ((np.abs(grid.physical(grid.X)) <= edge)
            & (np.abs(grid.physical(grid.Y)) <= edge)
            & (np.abs(grid.physical(grid.Z)) <= edge))
    q = grid.physical(grid.R) - t
    idx = np.floor(q[keep] / bin_width).astype(int)
    vals = mag[keep]
    lo = idx.min()
    sups = np.zeros(idx.max() - lo + 1)
    np.maximum.at(sups, idx - lo, vals)
    centers = (lo + np.arange(sups.size) + 0.5) * bin_width
    nonempty = np.bincount(idx - lo, minlength=sups.size) > 0
    return centers[nonempty], sups[nonempty]


def decay_fit(times, sups, qabs=0.0, min_samples=8):
    """Fit sup(t) ~ (1 + t + |q|)^p by log-log regression.

    Returns (exponent, standard error).  Raises FitError when fewer than
    min_samples positive samples are available.
    """
    times = np.asarray(times, dtype=float)
    sups = np.asarray(sups, dtype=float)
    good = sups > 0.0
    if good.sum() < min_samples:
        raise FitError(
            f"{int(good.sum())} usable samples < {min_samples} required")
    x = np.log1p(times[good] + qabs)
    y = np.log(sups[good])
    (slope, _), cov = np.polyfit(x, y, 1, cov=True)
    return float(slope), float(np.sqrt(cov[0, 0]))
