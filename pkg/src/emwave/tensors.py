"""Pointwise tensor algebra on the Minkowski background.

All kernels are plain numpy functions.  Tensor slots come first, arbitrary
grid/broadcast axes follow, so the same code serves a single point, a batch
of random samples, or a full 3-d grid.

Symmetric rank-2 tensors are stored as 10-vectors over unordered index
pairs (mu <= nu).  The fixed component order, shared by every module, is::

    slot   0     1     2     3     4     5     6     7     8     9
    pair (0,0) (0,1) (0,2) (0,3) (1,1) (1,2) (1,3) (2,2) (2,3) (3,3)

The Minkowski metric has signature (-,+,+,+).
"""

import numpy as np

from .errors import ConvergenceError, DegenerateMetricError

# (mu, nu) pair for each of the 10 symmetric slots, mu <= nu.
SYM_PAIRS = [(0, 0), (0, 1), (0, 2), (0, 3),
             (1, 1), (1, 2), (1, 3),
             (2, 2), (2, 3), (3, 3)]

# slot lookup for an arbitrary (mu, nu)
SYM_INDEX = np.empty((4, 4), dtype=int)
for _k, (_m, _n) in enumerate(SYM_PAIRS):
    SYM_INDEX[_m, _n] = _k
    SYM_INDEX[_n, _m] = _k

# diagonal signs of m^{alpha alpha} (= m_{alpha alpha})
MINK_SIGNS = np.array([-1.0, 1.0, 1.0, 1.0])

# Minkowski metric and its inverse as 4x4 matrices (numerically equal).
MINK = np.diag(MINK_SIGNS)
MINK_INV = np.diag(MINK_SIGNS)

# Minkowski metric as a symmetric 10-vector.
MINK_SYM = np.array([-1.0, 0, 0, 0, 1.0, 0, 0, 1.0, 0, 1.0])

# sign picked up by each symmetric slot when both indices are raised with m
SYM_RAISE_SIGNS = np.array(
    [MINK_SIGNS[m] * MINK_SIGNS[n] for (m, n) in SYM_PAIRS])


def sym_to_full(s):
    """Expand a (10, ...) symmetric storage array to full (4, 4, ...)."""
    s = np.asarray(s)
    out = np.empty((4, 4) + s.shape[1:], dtype=s.dtype)
    for k, (m, n) in enumerate(SYM_PAIRS):
        out[m, n] = s[k]
        out[n, m] = s[k]
    return out


def full_to_sym(a, check=False):
    """Compress a full (4, 4, ...) array to symmetric (10, ...) storage.

    With check=True the input must be symmetric to round-off; otherwise the
    symmetric part (a + a^T)/2 is stored.
    """
    a = np.asarray(a)
    if check:
        asym = np.max(np.abs(a - np.swapaxes(a, 0, 1)))
        scale = max(np.max(np.abs(a)), 1.0)
        if asym > 1e-12 * scale:
            raise ValueError(f"input not symmetric: asymmetry {asym:g}")
    out = np.empty((10,) + a.shape[2:], dtype=a.dtype)
    for k, (m, n) in enumerate(SYM_PAIRS):
        out[k] = 0.5 * (a[m, n] + a[n, m])
    return out


def mink_raise(p, slots):
    """Raise the given index slots of a covariant tensor with m^{mu nu}.

    p has its k <= 4 tensor slots leading (each of length 4); any trailing
    axes broadcast.  Because m is diagonal, raising a slot multiplies each
    component by the diagonal sign of that slot's index.
    """
    p = np.asarray(p)
    rank = _leading_rank(p)
    if rank > 4:
        raise ValueError(f"tensor rank {rank} > 4 not supported")
    if isinstance(slots, int):
        slots = (slots,)
    out = np.array(p, dtype=float, copy=True)
    for s in slots:
        if not 0 <= s < rank:
            raise ValueError(f"slot {s} invalid for rank-{rank} tensor")
        shape = [1] * out.ndim
        shape[s] = 4
        out = out * MINK_SIGNS.reshape(shape)
    return out


# raising and lowering with a diagonal self-inverse metric are one operation
mink_lower = mink_raise


def _leading_rank(p):
    rank = 0
    for n in p.shape:
        if n != 4:
            break
        rank += 1
    return rank


def sym_raise(s):
    """Raise both slots of a symmetric 10-vector: h_{mu nu} -> h^{mu nu}."""
    s = np.asarray(s)
    return s * SYM_RAISE_SIGNS.reshape((10,) + (1,) * (s.ndim - 1))


sym_lower = sym_raise


class InverseMetric:
    """Exact inverse g^{mu nu} of g = m + h, with deviation H = g^-1 - m^-1.

    g and deviation are stored as full (4, 4, ...) arrays (symmetric to
    round-off).
    """

    def __init__(self, g, deviation):
        self.g = g
        self.deviation = deviation


def _inv4_batched(a):
    """Closed-form inverse of a stack of 4x4 matrices, (..., 4, 4).

    Cofactor expansion through 2x2 complements; one vectorized pass, no
    per-matrix LAPACK dispatch.  Returns (inverse, determinant).
    """
    m = [[a[..., i, j] for j in range(4)] for i in range(4)]
    # 2x2 minors of rows 2-3 and rows 0-1
    s0 = m[0][0] * m[1][1] - m[1][0] * m[0][1]
    s1 = m[0][0] * m[1][2] - m[1][0] * m[0][2]
    s2 = m[0][0] * m[1][3] - m[1][0] * m[0][3]
    s3 = m[0][1] * m[1][2] - m[1][1] * m[0][2]
    s4 = m[0][1] * m[1][3] - m[1][1] * m[0][3]
    s5 = m[0][2] * m[1][3] - m[1][2] * m[0][3]
    c5 = m[2][2] * m[3][3] - m[3][2] * m[2][3]
    c4 = m[2][1] * m[3][3] - m[3][1] * m[2][3]
    c3 = m[2][1] * m[3][2] - m[3][1] * m[2][2]
    c2 = m[2][0] * m[3][3] - m[3][0] * m[2][3]
    c1 = m[2][0] * m[3][2] - m[3][0] * m[2][2]
    c0 = m[2][0] * m[3][1] - m[3][0] * m[2][1]
    det = s0 * c5 - s1 * c4 + s2 * c3 + s3 * c2 - s4 * c1 + s5 * c0
    inv = np.empty_like(a)
    inv[..., 0, 0] = m[1][1] * c5 - m[1][2] * c4 + m[1][3] * c3
    inv[..., 0, 1] = -m[0][1] * c5 + m[0][2] * c4 - m[0][3] * c3
    inv[..., 0, 2] = m[3][1] * s5 - m[3][2] * s4 + m[3][3] * s3
    inv[..., 0, 3] = -m[2][1] * s5 + m[2][2] * s4 - m[2][3] * s3
    inv[..., 1, 0] = -m[1][0] * c5 + m[1][2] * c2 - m[1][3] * c1
    inv[..., 1, 1] = m[0][0] * c5 - m[0][2] * c2 + m[0][3] * c1
    inv[..., 1, 2] = -m[3][0] * s5 + m[3][2] * s2 - m[3][3] * s1
    inv[..., 1, 3] = m[2][0] * s5 - m[2][2] * s2 + m[2][3] * s1
    inv[..., 2, 0] = m[1][0] * c4 - m[1][1] * c2 + m[1][3] * c0
    inv[..., 2, 1] = -m[0][0] * c4 + m[0][1] * c2 - m[0][3] * c0
    inv[..., 2, 2] = m[3][0] * s4 - m[3][1] * s2 + m[3][3] * s0
    inv[..., 2, 3] = -m[2][0] * s4 + m[2][1] * s2 - m[2][3] * s0
    inv[..., 3, 0] = -m[1][0] * c3 + m[1][1] * c1 - m[1][2] * c0
    inv[..., 3, 1] = m[0][0] * c3 - m[0][1] * c1 + m[0][2] * c0
    inv[..., 3, 2] = -m[3][0] * s3 + m[3][1] * s1 - m[3][2] * s0
    inv[..., 3, 3] = m[2][0] * s3 - m[2][1] * s1 + m[2][2] * s0
    inv /= det[..., None, None]
    return inv, det


def _move_mats_last(a):
    """(4, 4, ...) -> (..., 4, 4) for batched linalg."""
    return np.moveaxis(a, (0, 1), (-2, -1))


def _move_mats_first(a):
    return np.moveaxis(a, (-2, -1), (0, 1))


def invert_metric(h, cond_limit=1e6, g00_limit=0.5):
    """Exact inverse of g = m + h for symmetric perturbations h.

    h: (10, ...) symmetric storage (or (4, 4, ...) full).
    Raises DegenerateMetricError when |g^{00} + 1| > g00_limit or the
    1-norm condition estimate of g exceeds cond_limit.
    """
    h = np.asarray(h, dtype=float)
    if h.shape[:1] == (10,):
        hfull = sym_to_full(h)
    elif h.shape[:2] == (4, 4):
        hfull = h
    else:
        raise ValueError("h must be (10, ...) symmetric or (4, 4, ...) full")

    g = hfull + MINK.reshape((4, 4) + (1,) * (hfull.ndim - 2))
    gm = _move_mats_last(g)
    if np.abs(gm[..., 0, 0] + 1.0).max() > g00_limit + 1e-15:
        raise DegenerateMetricError(
            "g_00 too far from -1: max |g_00 + 1| = "
            f"{np.abs(gm[..., 0, 0] + 1.0).max():g}")
    ginv_m, det = _inv4_batched(gm)
    if not np.isfinite(ginv_m).all() or np.abs(det).min() < 1e-300:
        raise DegenerateMetricError("singular metric: zero determinant")
    cond = (np.abs(gm).sum(axis=-2).max(axis=-1)
            * np.abs(ginv_m).sum(axis=-2).max(axis=-1))
    if cond.max() > cond_limit:
        raise DegenerateMetricError(
            f"condition estimate {cond.max():g} exceeds {cond_limit:g}")
    # enforce exact symmetry of the stored inverse
    ginv_m = 0.5 * (ginv_m + np.swapaxes(ginv_m, -1, -2))
    ginv = _move_mats_first(ginv_m)
    dev = ginv - MINK_INV.reshape((4, 4) + (1,) * (ginv.ndim - 2))
    return InverseMetric(ginv, dev)


def neumann_H(h, order):
    """Truncated geometric series for the inverse-metric deviation.

    Returns sum_{k=1..order} (-1)^k m^{-1} (h m^{-1})^k as a full
    (4, 4, ...) array; order 1 is exactly -h^{mu nu}.  Raises
    ConvergenceError if successive terms grow (series outside its radius).
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    h = np.asarray(h, dtype=float)
    hfull = sym_to_full(h) if h.shape[:1] == (10,) else h
    hm = _move_mats_last(hfull)
    minv = MINK_INV
    # hat{h}^mu_nu = m^{mu a} h_{a nu}
    hat = minv @ hm
    term = -(minv @ hm @ minv)          # k = 1: -h^{mu nu}
    total = term.copy()
    prev_norm = np.abs(term).max()
    for _k in range(2, order + 1):
        term = -(hat @ term)
        norm = np.abs(term).max()
        if norm > prev_norm and norm > 1e-300:
            raise ConvergenceError(
                f"series term growth at order {_k}: {prev_norm:g} -> {norm:g}")
        total += term
        prev_norm = norm
    return _move_mats_first(total)
