"""Gauge-compatible Cauchy data built from geometric initial-data sets.

A geometric data set lives on the t = 0 slice: a Riemannian 3-metric
gbar_ij, extrinsic curvature K_ij, spatial vector potential Abar_i, time
potential Abar_0, electric field Ebar^i (upper index), and lapse Nbar,
with zero shift.  `build_cauchy` converts it into the evolution unknowns
(h, d_t h, A, d_t A)|_{t=0} so that the wave-coordinate and Lorenz gauge
conditions hold on the initial slice:

    g_ij = gbar_ij,  g_00 = -Nbar^2,  g_0i = 0
    d_t g_ij = -2 Nbar K_ij
    d_t g_00 = 2 Nbar^3 tr_gbar K
    d_t g_0l = Nbar^2 gbar^{ij} d_j gbar_il
               - (1/2) Nbar^2 gbar^{ij} d_l gbar_ij - Nbar d_l Nbar
    A_i = Abar_i,  A_0 = Abar_0
    d_t A_0 = Nbar^2 gbar^{ij} d_i Abar_j
    d_t A_i = d_i Abar_0 + Nbar Ebar^j gbar_ji

The constraint residuals evaluated here are

    hamiltonian: Rbar - |K|^2_gbar + (tr K)^2
                 - (1/2) gbar^{ik} gbar^{jl} Fbar_ij Fbar_kl
                 - 3 gbar_ij Ebar^i Ebar^j          (Fbar := d Abar)
    momentum_i:  (div_gbar K)_i - d_i (tr K) - Ebar^l Fbar_li
    divE:        del_i Ebar^i + Gamma^i_il Ebar^l

Spatial symmetric 2-tensors use 6-slot storage in the fixed order
(xx, xy, xz, yy, yz, zz), shared with the Hessian storage of the
evolution module.

Derivatives use the shared centered stencils; quantities involving two
nested stencil applications (curvature terms) are valid only in the core
that sits at least two stencil radii inside the ghosted array.  The
shipped analytic families are compactly supported well inside the box,
so the contaminated rim carries exactly zero fields.
"""

from dataclasses import dataclass

import numpy as np

from . import stencils
from .errors import DataError
from .evolution import EvolutionState, spatial_gradient

# spatial symmetric pair order, identical to the evolution Hessian storage
S3_PAIRS = ((0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2))
S3_INDEX = np.empty((3, 3), dtype=int)
for _k, (_i, _j) in enumerate(S3_PAIRS):
    S3_INDEX[_i, _j] = _k
    S3_INDEX[_j, _i] = _k

# identity 3-metric in 6-slot storage
DELTA3 = np.array([1.0, 0.0, 0.0, 1.0, 0.0, 1.0])


def s3_to_full(s):
    """Expand (6, ...) symmetric storage to full (3, 3, ...)."""
    s = np.asarray(s)
    out = np.empty((3, 3) + s.shape[1:], dtype=s.dtype)
    for k, (i, j) in enumerate(S3_PAIRS):
        out[i, j] = s[k]
        out[j, i] = s[k]
    return out


def full_to_s3(a):
    """Compress full (3, 3, ...) to (6, ...); stores the symmetric part."""
    a = np.asarray(a)
    out = np.empty((6,) + a.shape[2:], dtype=a.dtype)
    for k, (i, j) in enumerate(S3_PAIRS):
        out[k] = 0.5 * (a[i, j] + a[j, i])
    return out


def s3_inverse(s):
    """Closed-form inverse and determinant of a symmetric 3x3 field.

    s: (6, ...) storage.  Returns (inv (6, ...), det).  Raises DataError
    if the matrix is not positive definite somewhere (checked through
    the leading principal minors).
    """
    a, b, c, d, e, f = (np.asarray(s[k], dtype=float) for k in range(6))
    m1 = a
    m2 = a * d - b * b
    det = a * (d * f - e * e) - b * (b * f - c * e) + c * (b * e - c * d)
    if np.min(m1) <= 0.0 or np.min(m2) <= 0.0 or np.min(det) <= 0.0:
        raise DataError(
            "3-metric not positive definite: minors "
            f"min {np.min(m1):g}, {np.min(m2):g}, {np.min(det):g}")
    inv = np.empty((6,) + np.asarray(s).shape[1:], dtype=float)
    inv[0] = d * f - e * e
    inv[1] = c * e - b * f
    inv[2] = b * e - c * d
    inv[3] = a * f - c * c
    inv[4] = b * c - a * e
    inv[5] = a * d - b * b
    inv /= det
    return inv, det


@dataclass
class DataSet:
    """Geometric data on the initial slice (zero shift).

    gbar, K: (6, ...) symmetric storage; Aspace, E: (3, ...); A0, N:
    scalar fields.  E carries an upper index.

    Analytic families may also supply closed-form spatial gradients
    (dgbar (3, 6, ...), dN (3, ...), dAspace (3, 3, ...) indexed
    [derivative, component], dA0 (3, ...)); `build_cauchy` then uses
    them instead of stencils, so the discrete gauge residual of the
    produced state measures genuine discretization error rather than
    cancelling identically.
    """
    gbar: np.ndarray
    K: np.ndarray
    Aspace: np.ndarray
    A0: np.ndarray
    E: np.ndarray
    N: np.ndarray
    dgbar: np.ndarray = None
    dN: np.ndarray = None
    dAspace: np.ndarray = None
    dA0: np.ndarray = None

    def validate(self):
        for name in ("gbar", "K", "Aspace", "A0", "E", "N"):
            arr = getattr(self, name)
            if not np.isfinite(arr).all():
                raise DataError(f"non-finite values in {name}")
        if np.min(self.N) <= 0.0:
            raise DataError(f"lapse not positive: min N = {np.min(self.N):g}")
        s3_inverse(self.gbar)   # raises on indefinite metric
        return self


@dataclass
class CauchyState:
    """Evolution unknowns on the initial slice.

    h, ht: (10, ...) spacetime symmetric storage; A, At: (4, ...).
    """
    h: np.ndarray
    ht: np.ndarray
    A: np.ndarray
    At: np.ndarray

    def to_state(self):
        """Pack into an evolution state (u, v) at t = 0."""
        return EvolutionState(np.concatenate([self.h, self.A]),
                              np.concatenate([self.ht, self.At]), 0.0)


def build_cauchy(data, grid, order=4):
    """Convert a geometric data set into gauge-compatible Cauchy data."""
    data.validate()
    gb = np.asarray(data.gbar, dtype=float)
    K = np.asarray(data.K, dtype=float)
    N = np.asarray(data.N, dtype=float)
    ginv, _ = s3_inverse(gb)
    ginv_f = s3_to_full(ginv)
    gb_f = s3_to_full(gb)
    K_f = s3_to_full(K)

    shape = N.shape
    h = np.zeros((10,) + shape)
    ht = np.zeros((10,) + shape)
    A = np.zeros((4,) + shape)
    At = np.zeros((4,) + shape)

    # slice metric: g_ij = gbar, g_00 = -N^2, g_0i = 0
    h[0] = 1.0 - N * N                       # h_00 = g_00 - (-1)
    for k in range(6):
        h[_ST_SLOT[k]] = gb[k] - DELTA3[k]

    trK = np.einsum('ij...,ij...->...', ginv_f, K_f)
    ht[0] = 2.0 * N ** 3 * trK
    for k in range(6):
        ht[_ST_SLOT[k]] = -2.0 * N * K[k]

    # d_t g_0l from the spatial derivatives of gbar and N
    if data.dgbar is not None:
        dgb = np.asarray(data.dgbar, dtype=float)
    else:
        dgb = np.empty((3, 6) + shape)
        for k in range(6):
            dgb[:, k] = spatial_gradient(gb[k], grid, order)
    if data.dN is not None:
        dN = np.asarray(data.dN, dtype=float)
    else:
        dN = spatial_gradient(N, grid, order)
    for l in range(3):
        # gbar^{ij} d_j gbar_il
        t1 = np.zeros(shape)
        t2 = np.zeros(shape)
        for i in range(3):
            for j in range(3):
                t1 += ginv_f[i, j] * dgb[j, S3_INDEX[i, l]]
                t2 += ginv_f[i, j] * dgb[l, S3_INDEX[i, j]]
        ht[1 + l] = N * N * (t1 - 0.5 * t2) - N * dN[l]

    # potentials
    A[0] = data.A0
    A[1:] = data.Aspace
    if data.dAspace is not None:
        dAs = np.asarray(data.dAspace, dtype=float)
    else:
        dAs = np.empty((3, 3) + shape)
        for j in range(3):
            dAs[:, j] = spatial_gradient(data.Aspace[j], grid, order)
    At[0] = N * N * np.einsum('ij...,ij...->...', ginv_f, dAs)
    if data.dA0 is not None:
        dA0 = np.asarray(data.dA0, dtype=float)
    else:
        dA0 = spatial_gradient(data.A0, grid, order)
    lowE = np.einsum('ij...,j...->i...', gb_f, data.E)
    At[1:] = dA0 + N * lowE
    return CauchyState(h, ht, A, At)


# spacetime symmetric slot of each spatial pair: S3 slot k holds the pair
# (i, j), which lands at the slot of (i+1, j+1) in the 10-component order
_ST_SLOT = np.array([4, 5, 6, 7, 8, 9])


def christoffel(gbar, grid, order=4, ginv=None):
    """Gamma^k_ij of the 3-metric, shape (3, 6, ...) over S3 pairs (ij).

    Also returns the gradient dgb[l, pair] used to build it.
    """
    gb = np.asarray(gbar, dtype=float)
    if ginv is None:
        ginv, _ = s3_inverse(gb)
    ginv_f = s3_to_full(ginv)
    shape = gb.shape[1:]
    dgb = np.empty((3, 6) + shape)
    for k in range(6):
        dgb[:, k] = spatial_gradient(gb[k], grid, order)
    gam = np.zeros((3, 6) + shape)
    for p, (i, j) in enumerate(S3_PAIRS):
        for k in range(3):
            acc = np.zeros(shape)
            for l in range(3):
                acc += ginv_f[k, l] * (dgb[i, S3_INDEX[l, j]]
                                       + dgb[j, S3_INDEX[i, l]]
                                       - dgb[l, S3_INDEX[i, j]])
            gam[k, p] = 0.5 * acc
    return gam, dgb


def ricci(gbar, grid, order=4, ginv=None):
    """Ricci tensor of the 3-metric in (6, ...) storage.

    R_ij = d_k Gamma^k_ij - d_i Gamma^k_kj
           + Gamma^k_kl Gamma^l_ij - Gamma^k_il Gamma^l_kj.
    Valid two stencil radii inside the array edge.
    """
    gam, _ = christoffel(gbar, grid, order, ginv=ginv)
    shape = gam.shape[2:]
    # trace Gamma^k_kl
    trg = np.empty((3,) + shape)
    for l in range(3):
        trg[l] = sum(gam[k, S3_INDEX[k, l]] for k in range(3))
    out = np.empty((6,) + shape)
    axes = (-3, -2, -1)
    for p, (i, j) in enumerate(S3_PAIRS):
        term = np.zeros(shape)
        for k in range(3):
            term += stencils.diff1(gam[k, p], grid.dx, axes[k], order)
        term -= stencils.diff1(trg[j], grid.dx, axes[i], order)
        for l in range(3):
            term += trg[l] * gam[l, p]
        for k in range(3):
            for l in range(3):
                term -= gam[k, S3_INDEX[i, l]] * gam[l, S3_INDEX[k, j]]
        out[p] = term
    return out


def hamiltonian_residual(data, grid, order=4):
    """Pointwise Hamiltonian constraint residual (scalar field)."""
    data.validate()
    gb = np.asarray(data.gbar, dtype=float)
    ginv, _ = s3_inverse(gb)
    ginv_f = s3_to_full(ginv)
    gb_f = s3_to_full(gb)
    K_f = s3_to_full(np.asarray(data.K, dtype=float))
    ric = ricci(gb, grid, order, ginv=ginv)
    rbar = sum(ginv_f[i, j] * ric[S3_INDEX[i, j]]
               for i in range(3) for j in range(3))
    KK = np.einsum('ik...,jl...,ij...,kl...->...',
                   ginv_f, ginv_f, K_f, K_f, optimize=True)
    trK = np.einsum('ij...,ij...->...', ginv_f, K_f)
    Fbar = faraday3(data.Aspace, grid, order)
    FF = np.einsum('ik...,jl...,ij...,kl...->...',
                   ginv_f, ginv_f, Fbar, Fbar, optimize=True)
    EE = np.einsum('ij...,i...,j...->...', gb_f, data.E, data.E)
    return rbar - KK + trK ** 2 - 0.5 * FF - 3.0 * EE


def faraday3(Aspace, grid, order=4):
    """Spatial field strength Fbar_ij = d_i Abar_j - d_j Abar_i, (3,3,...)."""
    A = np.asarray(Aspace, dtype=float)
    shape = A.shape[1:]
    dA = np.empty((3, 3) + shape)
    for j in range(3):
        dA[:, j] = spatial_gradient(A[j], grid, order)
    return dA - dA.transpose(1, 0, *range(2, dA.ndim))


def momentum_residual(data, grid, order=4):
    """Pointwise momentum constraint residual, (3, ...) lower index."""
    data.validate()
    gb = np.asarray(data.gbar, dtype=float)
    K = np.asarray(data.K, dtype=float)
    ginv, _ = s3_inverse(gb)
    ginv_f = s3_to_full(ginv)
    gam, _ = christoffel(gb, grid, order, ginv=ginv)
    shape = gb.shape[1:]
    dK = np.empty((3, 6) + shape)
    for p in range(6):
        dK[:, p] = spatial_gradient(K[p], grid, order)
    trK = np.einsum('ij...,ij...->...', ginv_f, s3_to_full(K))
    dtrK = spatial_gradient(trK, grid, order)
    Fbar = faraday3(data.Aspace, grid, order)
    out = np.empty((3,) + shape)
    for i in range(3):
        div = np.zeros(shape)
        for j in range(3):
            for k in range(3):
                div += ginv_f[j, k] * dK[j, S3_INDEX[k, i]]
                for l in range(3):
                    div -= ginv_f[j, k] * (gam[l, S3_INDEX[j, k]]
                                           * K[S3_INDEX[l, i]]
                                           + gam[l, S3_INDEX[j, i]]
                                           * K[S3_INDEX[k, l]])
        source = sum(data.E[l] * Fbar[l, i] for l in range(3))
        out[i] = div - dtrK[i] - source
    return out


def divE_residual(data, grid, order=4):
    """Pointwise covariant divergence of Ebar^i (scalar field)."""
    data.validate()
    gam, _ = christoffel(data.gbar, grid, order)
    axes = (-3, -2, -1)
    out = np.zeros(np.asarray(data.N).shape)
    for i in range(3):
        out += stencils.diff1(data.E[i], grid.dx, axes[i], order)
        for l in range(3):
            out += gam[i, S3_INDEX[i, l]] * data.E[l]
    return out


def gauge_residual_initial(cauchy, grid, order=4, gamma=0.25, mu=0.25):
    """Initial-slice gauge residuals of a Cauchy state.

    Delegates to the run-time gauge monitor at t = 0: wave residual
    Fhat^lambda and Lorenz residual div_g A with sup and weighted-L2
    norms over the physical region.
    """
    from .diagnostics import gauge_monitors
    return gauge_monitors(cauchy.to_state(), grid, order, gamma, mu)
