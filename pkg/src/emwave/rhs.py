"""Pointwise right-hand sides of the reduced wave-gauge system.

The evolved unknowns obey two quasilinear wave equations,

    boxtilde_g h_mu_nu = F_mu_nu,      boxtilde_g A_beta = J_beta,

with boxtilde_g = g^{alpha beta} d_alpha d_beta.  This module assembles
F and J from the pointwise fields: the perturbation h (symmetric
10-storage), its first derivatives dh[lambda] (4 x 10), and the
potential derivatives dA[lambda, beta] (4 x 4).

Every inverse metric that appears is the exact dense inverse of
g = m + h; the truncated expansions of g^{-1} are test-only artifacts
(see tensors.neumann_H).  All kernels broadcast over trailing axes.

Internally the trailing axes are flattened into a leading batch axis so
each contraction becomes a stack of small matrix products; this keeps
the hot evolution loop inside numpy's batched matmul instead of general
einsum dispatch.
"""

import numpy as np

from .tensors import (MINK, MINK_INV, SYM_INDEX, SYM_PAIRS, full_to_sym,
                      invert_metric, sym_to_full)

# m^{alpha beta} x_{alpha beta} over symmetric 10-storage
_SYM_MTRACE = np.array([-1.0, 0, 0, 0, 1.0, 0, 0, 1.0, 0, 1.0])
# multiplicity of each symmetric slot in a full double sum
_SYM_MULT = np.array([1.0, 2, 2, 2, 1, 2, 2, 1, 2, 1])
# sign m^{aa} m^{bb} picked up by slot (a, b)
_SYM_SS = np.array([1.0, -1, -1, -1, 1, 1, 1, 1, 1, 1])


def _dh_full(dh):
    """(4, 10, ...) symmetric-derivative storage -> (4, 4, 4, ...)."""
    dh = np.asarray(dh, dtype=float)
    if dh.shape[:2] == (4, 10):
        out = np.empty((4, 4, 4) + dh.shape[2:])
        for lam in range(4):
            out[lam] = sym_to_full(dh[lam])
        return out
    if dh.shape[:3] == (4, 4, 4):
        return dh
    raise ValueError("dh must be (4, 10, ...) or (4, 4, 4, ...)")


def _batch(a, nlead):
    """Move trailing (grid) axes into one leading batch axis, contiguous."""
    a = np.asarray(a, dtype=float)
    lead = a.shape[:nlead]
    trail = a.shape[nlead:]
    n = 1
    for m in trail:
        n *= m
    flat = a.reshape(lead + (n,))
    return np.ascontiguousarray(np.moveaxis(flat, -1, 0)), trail


def _unbatch(b, trail):
    """Inverse of _batch: (n,) + lead -> lead + trail."""
    a = np.moveaxis(b, 0, -1)
    return np.ascontiguousarray(a).reshape(a.shape[:-1] + trail)


def _bcast_minv(ndim_trailing):
    return MINK_INV.reshape((4, 4) + (1,) * ndim_trailing)


def faraday(dA):
    """Field strength F_{alpha beta} = dA[alpha, beta] - dA[beta, alpha]."""
    dA = np.asarray(dA, dtype=float)
    return dA - np.swapaxes(dA, 0, 1)


def p_term(dh_mu, dh_nu):
    """Flat-background P(d_mu h, d_nu h) for two symmetric 10-gradients.

    P = 1/4 tr_m(d_mu h) tr_m(d_nu h) - 1/2 <d_nu h, d_mu h>_m, the trace
    and inner product taken with m^{alpha beta}.
    """
    a = np.asarray(dh_mu, dtype=float)
    b = np.asarray(dh_nu, dtype=float)
    w = _SYM_MTRACE.reshape((10,) + (1,) * (a.ndim - 1))
    tra = (w * a).sum(axis=0)
    trb = (w * b).sum(axis=0)
    ip = (_SYM_MULT * _SYM_SS).reshape((10,) + (1,) * (a.ndim - 1))
    inner = (ip * a * b).sum(axis=0)
    return 0.25 * tra * trb - 0.5 * inner


def _pq_intermediates(db, Gb):
    """Shared contractions for the P- and Q-type quadratic forms.

    db: (n, 4, 4, 4) with db[p, l, a, b] = d_l h_ab at point p;
    Gb: (n, 4, 4) inverse metric.  Returns (dT, P1, P2, Q1, s, c):
    dT[n, a, b] = d_a h_bn (derivative slot moved third), P1 = G dT,
    P2 = dT G, Q1 = G db, s[l] = <d_l h, G>, c[n] = <dT[n], G>.
    """
    n = db.shape[0]
    G1 = Gb[:, None]
    dT = np.ascontiguousarray(db.transpose(0, 3, 1, 2))
    P1 = G1 @ dT
    P2 = dT @ G1
    Q1 = G1 @ db
    # transposed contiguous views shared by several contractions below
    P1S = np.ascontiguousarray(P1.swapaxes(-1, -2))
    Q1S = np.ascontiguousarray(Q1.swapaxes(-1, -2))
    Gf = Gb.reshape(n, 16, 1)
    s = (db.reshape(n, 4, 16) @ Gf)[:, :, 0]
    c = (dT.reshape(n, 4, 16) @ Gf)[:, :, 0]
    return dT, P1, P2, Q1, P1S, Q1S, s, c


def _mat_inner(x, y):
    """Batched t[p, m, n] = sum_{A,B} x[p, m, A, B] y[p, n, A, B]."""
    n = x.shape[0]
    xf = x.reshape(n, 4, 16)
    yf = y.reshape(n, 4, 16)
    return xf @ yf.transpose(0, 2, 1)


def _p_batch(db, Gb, inter=None):
    dT, P1, P2, Q1, P1S, Q1S, s, c = (inter if inter is not None
                                      else _pq_intermediates(db, Gb))
    # cross[m, n] = sum g g d_m h d_n h; db[m] is symmetric so db G = Q1^T
    cross = _mat_inner(Q1S, Q1)
    return 0.25 * s[:, :, None] * s[:, None, :] - 0.5 * cross


def _q_batch(db, Gb, inter=None):
    dT, P1, P2, Q1, P1S, Q1S, s, c = (inter if inter is not None
                                      else _pq_intermediates(db, Gb))
    # groups 1-2 contract the field slots of both factors through g;
    # sum_{A,b} P1[m,A,b] P2[n,A,b] regroups G dT[m] G against dT[n]
    out = _mat_inner(P1, P2)
    out -= _mat_inner(P1S, P1)
    out += c[:, :, None] * c[:, None, :]
    gc = (Gb @ c[:, :, None])[:, :, 0]
    gs = (Gb @ s[:, :, None])[:, :, 0]
    # sum_b d_m h_{bn} x^b regrouped through dT: dT[n, m, b] = d_m h_{bn}
    dgc = (dT @ gc[:, None, :, None])[..., 0].swapaxes(-1, -2)
    dgs = (dT @ gs[:, None, :, None])[..., 0].swapaxes(-1, -2)
    t35 = _mat_inner(Q1S, P1) - dgc + 0.5 * dgs
    t35 -= (0.5 * s[:, :, None]) * c[:, None, :]
    out += t35
    out += t35.swapaxes(-1, -2)
    return out


def p_matrix(dh, ginv):
    """P-type bilinear for all slot pairs, with a general inverse metric.

    dh: (4, 10, ...) or (4, 4, 4, ...); ginv: (4, 4, ...).  Returns the
    symmetric (4, 4, ...) array P_{mu nu} = P(d_mu h, d_nu h) with every
    contraction through ginv.
    """
    d = _dh_full(dh)
    db, trail = _batch(d, 3)
    Gb, _ = _batch(np.broadcast_to(ginv, (4, 4) + trail), 2)
    return _unbatch(_p_batch(db, Gb), trail)


def q_matrix(dh, ginv):
    """Q-type quadratic form with a general inverse metric, full (4,4,...).

    The six printed term groups of the flat-background null form, with
    m^{..} replaced by ginv.  Symmetric in (mu, nu) after assembly.
    """
    d = _dh_full(dh)
    db, trail = _batch(d, 3)
    Gb, _ = _batch(np.broadcast_to(ginv, (4, 4) + trail), 2)
    return _unbatch(_q_batch(db, Gb), trail)


def q_term(dh):
    """Flat-background null form Q_{mu nu}(dh, dh), symmetric 10-storage."""
    d = _dh_full(dh)
    minv = _bcast_minv(d.ndim - 3)
    return full_to_sym(q_matrix(d, minv))


def g_term(h, dh, ginv=None):
    """Remainder G_{mu nu}(h)(dh, dh), symmetric 10-storage.

    Defined exactly as (P + Q with full g^{-1}) minus (P + Q with m^{-1}),
    so the reduced Einstein right-hand side regroups without truncation.
    Vanishes identically at h = 0.
    """
    d = _dh_full(dh)
    if ginv is None:
        ginv = invert_metric(h).g
    db, trail = _batch(d, 3)
    Gb, _ = _batch(np.broadcast_to(ginv, (4, 4) + trail), 2)
    Mb = np.broadcast_to(MINK_INV, Gb.shape)
    ig = _pq_intermediates(db, Gb)
    im = _pq_intermediates(db, Mb)
    full = (_p_batch(db, Gb, ig) + _q_batch(db, Gb, ig)
            - _p_batch(db, Mb, im) - _q_batch(db, Mb, im))
    return full_to_sym(_unbatch(full, trail))


def _maxwell_batch(Fb, Gb, glb):
    """-2 g^{ab} F_{a.} F_{b.} + (g/2) g^{ar} g^{bs} F_ab F_rs, batched.

    Fb: (n, 4, 4) Faraday tensor; Gb: inverse metric; glb: lower metric.
    """
    GF = Gb @ Fb
    quad = -2.0 * (Fb.transpose(0, 2, 1) @ GF)
    inv2 = ((GF @ Gb) * Fb).sum(axis=(-2, -1))
    return quad + 0.5 * glb * inv2[:, None, None]


def maxwell_stress(h, dA, ginv):
    """Electromagnetic source block of the reduced Einstein equation.

    -2 g^{ab} F_{a mu} F_{b nu} + 1/2 g_{mu nu} g^{ar} g^{bs} F_{ab} F_{rs}
    with F the Faraday tensor of dA.  Returns full (4, 4, ...).
    """
    hfull = sym_to_full(np.asarray(h, dtype=float))
    trail = hfull.shape[2:]
    gl = hfull + MINK.reshape((4, 4) + (1,) * len(trail))
    Fb, _ = _batch(np.broadcast_to(faraday(dA), (4, 4) + trail), 2)
    Gb, _ = _batch(np.broadcast_to(ginv, (4, 4) + trail), 2)
    glb, _ = _batch(gl, 2)
    return _unbatch(_maxwell_batch(Fb, Gb, glb), trail)


def _j_batch(db, dAb, Gb):
    """Reduced Maxwell right-hand side J_beta, batched (n, 4)."""
    n = db.shape[0]
    dbf = db.reshape(n, 4, 16)          # [b, (t, m)]
    dff = db.reshape(n, 16, 4)          # [(l, m), b]
    # j1_b = g^{at} g^{ml} d_b h_{tm} d_l A_a = sum_{t,m} d_b h_{tm} Z[m,t]
    Z = Gb @ dAb @ Gb
    j1 = (dbf @ Z.transpose(0, 2, 1).reshape(n, 16, 1))[:, :, 0]
    # j2_b = 1/2 g^{al} g^{tm} (d_l h_{mb} + d_b h_{ml} - d_m h_{lb}) F_at
    #      = 1/2 sum_{l,m} (...) W[l,m] with W = G F G
    Fb = dAb - dAb.transpose(0, 2, 1)
    W = Gb @ Fb @ Gb
    Wf = W.reshape(n, 16, 1)
    Wtf = W.transpose(0, 2, 1).reshape(n, 16, 1)
    t13 = (dff.transpose(0, 2, 1) @ (Wf - Wtf))[:, :, 0]
    t2 = (dbf @ Wtf)[:, :, 0]
    return j1 + 0.5 * (t13 + t2)


def assemble_F(h, dh, dA, ginv=None):
    """Right-hand side F_{mu nu} of the reduced Einstein equation.

    h: (10, ...); dh: (4, 10, ...) with dh[lambda] = d_lambda h;
    dA: (4, 4, ...) with dA[lambda, beta] = d_lambda A_beta.
    Returns symmetric 10-storage.  P + Q + G is evaluated in its exactly
    resummed form (all contractions through the dense inverse metric).
    """
    f, _ = assemble_both(h, dh, dA, ginv=ginv, want_j=False)
    return f


def assemble_J(h, dh, dA, ginv=None):
    """Right-hand side J_beta of the reduced Maxwell equation, (4, ...).

    J_b = g^{at} g^{ml} d_b h_{tm} d_l A_a
          + 1/2 g^{al} g^{tm} (d_l h_{mb} + d_b h_{ml} - d_m h_{lb})
                              (d_a A_t - d_t A_a)
    with exact inverse metrics.
    """
    _, j = assemble_both(h, dh, dA, ginv=ginv, want_f=False)
    return j


# flat (m, n) -> symmetric slot index, as a length-16 lookup
_SYM_FLAT = SYM_INDEX.reshape(16)
_MINK_FLAT = MINK.reshape(16)


def _sym_from_batch(full_b, trail):
    """(n, 4, 4) batched full tensor -> (10,) + trail symmetric storage."""
    n = full_b.shape[0]
    f16 = full_b.reshape(n, 16)
    out = np.empty((10, n))
    # average the two mirror entries of each unordered pair
    for k, (m, mm) in enumerate(SYM_PAIRS):
        out[k] = 0.5 * (f16[:, 4 * m + mm] + f16[:, 4 * mm + m])
    return out.reshape((10,) + trail)


def assemble_both(h, dh, dA, ginv=None, want_f=True, want_j=True):
    """Assemble (F sym-10, J) sharing the batched intermediates."""
    h = np.asarray(h, dtype=float)
    dh = np.asarray(dh, dtype=float)
    if ginv is None:
        ginv = invert_metric(h).g
    if dh.shape[:2] == (4, 10):
        trail = dh.shape[2:]
        dhb, _ = _batch(dh, 2)                        # (n, 4, 10)
        db = np.ascontiguousarray(
            dhb[:, :, _SYM_FLAT]).reshape(-1, 4, 4, 4)
    else:
        trail = dh.shape[3:]
        db, _ = _batch(dh, 3)
    Gb, _ = _batch(np.broadcast_to(ginv, (4, 4) + trail), 2)
    dAb, _ = _batch(np.broadcast_to(np.asarray(dA, dtype=float),
                                    (4, 4) + trail), 2)
    f_out = None
    j_out = None
    if want_f:
        hb, _ = _batch(np.broadcast_to(h, (10,) + trail), 1)  # (n, 10)
        glb = (hb[:, _SYM_FLAT] + _MINK_FLAT).reshape(-1, 4, 4)
        Fb = dAb - dAb.transpose(0, 2, 1)
        inter = _pq_intermediates(db, Gb)
        full = (_p_batch(db, Gb, inter) + _q_batch(db, Gb, inter)
                + _maxwell_batch(Fb, Gb, glb))
        f_out = _sym_from_batch(full, trail)
    if want_j:
        j_out = _unbatch(_j_batch(db, dAb, Gb), trail)
    return f_out, j_out
