"""Null-frame geometry at points of Minkowski space.

The outgoing/ingoing null pair is L = dt + dr, Lbar = dt - dr.  Sphere
directions are never chosen explicitly: every sum over an orthonormal
tangent pair (S1, S2) is evaluated through the completeness relation
Pi_ij = delta_ij - omega_i omega_j, which makes the norms manifestly
independent of the choice of pair.

Frame-graded norms contract each graded tensor slot with a symmetric
slot operator M^{alpha beta}:

    'L' ->  L (x) L
    'S' ->  Pi
    'T' ->  (1/2) L (x) L + Pi
    'U' ->  (1/2) L (x) L + (1/2) Lbar (x) Lbar + Pi

and ungraded slots with the Euclidean delta.  The weights on T and U are
the inverse-Euclidean frame weights (eu^{LL} = eu^{LbarLbar} = 1/2,
cross terms zero, eu^{AB} = delta).
"""

import numpy as np

from .errors import EmwaveError

FAMILY_TAGS = ("L", "S", "T", "U")


class AxisDegeneracyError(EmwaveError):
    """The spatial radius is below r_min; the frame is undefined there."""


class FramePoint:
    """A spacetime point with its radial/null bookkeeping.

    t is a scalar or array; x has shape (3, ...) broadcasting against t.
    Exposes r = |x|, q = r - t and omega = x/r.
    """

    def __init__(self, t, x, r_min=1e-8):
        self.t = np.asarray(t, dtype=float)
        self.x = np.asarray(x, dtype=float)
        if self.x.shape[:1] != (3,):
            raise ValueError("x must have leading shape (3, ...)")
        self.r = np.sqrt((self.x ** 2).sum(axis=0))
        self.r_min = r_min
        if np.min(self.r) <= r_min:
            raise AxisDegeneracyError(
                f"r = {np.min(self.r):g} <= r_min = {r_min:g}")
        self.q = self.r - self.t
        self.omega = self.x / self.r


def null_vectors(pt):
    """Return (L, Lbar) in Cartesian components, each of shape (4, ...)."""
    shape = (4,) + pt.r.shape
    L = np.empty(shape)
    Lb = np.empty(shape)
    L[0] = 1.0
    Lb[0] = 1.0
    L[1:] = pt.omega
    Lb[1:] = -pt.omega
    return L, Lb


def tangential_projector(pt):
    """Pi_ij = delta_ij - omega_i omega_j, shape (3, 3, ...)."""
    om = pt.omega
    eye = np.eye(3).reshape((3, 3) + (1,) * (om.ndim - 1))
    return eye - om[:, None] * om[None, :]


def tangential_derivative(grad, pt):
    """Project the gradient of a tensor onto cone-tangential directions.

    grad holds the components d_beta(p_...) with the derivative slot LAST
    (length 4); trailing axes after the tensor slots broadcast against pt.
    The output replaces slot component 0 by L(p) = d_t p + omega^j d_j p
    and component i by dbar_i p = d_i p - omega_i omega^j d_j p.
    """
    grad = np.asarray(grad, dtype=float)
    # locate the derivative slot: last axis of length 4 before broadcast axes
    # caller convention: tensor slots + derivative slot lead, grid axes trail
    dslot = _derivative_axis(grad, pt)
    g = np.moveaxis(grad, dslot, 0)     # (4, ..., grid)
    radial = np.einsum('i...,i...->...', pt.omega, g[1:])
    out = np.empty_like(g)
    out[0] = g[0] + radial
    out[1:] = g[1:] - pt.omega * radial
    return np.moveaxis(out, 0, dslot)


def _derivative_axis(grad, pt):
    ngrid = pt.r.ndim
    axis = grad.ndim - 1 - ngrid
    if axis < 0 or grad.shape[axis] != 4:
        raise ValueError("gradient shape incompatible with point batch")
    return axis


def _slot_operators(pt):
    L, Lb = null_vectors(pt)
    trail = pt.r.shape
    ops = {}
    LL = L[:, None] * L[None, :]
    LbLb = Lb[:, None] * Lb[None, :]
    Pi4 = np.zeros((4, 4) + trail)
    Pi4[1:, 1:] = tangential_projector(pt)
    ops["L"] = LL
    ops["S"] = Pi4
    ops["T"] = 0.5 * LL + Pi4
    ops["U"] = 0.5 * LL + 0.5 * LbLb + Pi4
    return ops


def frame_norm(p, families, pt):
    """Frame-graded norm |p|_{V1...Vl} of a covariant tensor at pt.

    p: full-component array, rank k <= 3 leading slots of length 4,
    trailing axes broadcasting against pt.  families: sequence of tags
    from 'L', 'S', 'T', 'U' applied to the first len(families) slots; an
    empty sequence gives the plain Euclidean (Frobenius) norm.
    """
    p = np.asarray(p, dtype=float)
    ngrid = pt.r.ndim
    rank = p.ndim - ngrid
    if rank < 0 or rank > 3 or any(n != 4 for n in p.shape[:rank]):
        raise ValueError("p must have rank <= 3 of leading length-4 slots")
    families = list(families)
    if len(families) > rank:
        raise ValueError(
            f"{len(families)} families exceed tensor rank {rank}")
    for tag in families:
        if tag not in FAMILY_TAGS:
            raise ValueError(f"unknown family tag {tag!r}")

    if not families:
        sq = (p ** 2).sum(axis=tuple(range(rank)))
        return np.sqrt(sq)

    ops = _slot_operators(pt)
    # contract p with itself slot by slot: graded slots through M, the
    # rest through the Euclidean delta
    a = p
    b = p
    sq = None
    # build sum_{slots} prod M^{a_i b_i} p_{a...} p_{b...} iteratively
    # by contracting one slot of `a` at a time against the operator and
    # accumulating into an outer-product-free running einsum
    letters = "abcdef"
    terms = []
    in_a = "".join(letters[i] for i in range(rank))
    in_b = "".join(letters[rank + i] for i in range(rank))
    subs = [in_a + "...", in_b + "..."]
    args = [a, b]
    for i, tag in enumerate(families):
        subs.append(in_a[i] + in_b[i] + "...")
        args.append(ops[tag])
    for i in range(len(families), rank):
        # ungraded slot: Euclidean sum means identifying the two labels
        in_b = in_b[:i] + in_a[i] + in_b[i + 1:]
        subs[1] = in_b + "..."
    expr = ",".join(subs) + "->..."
    sq = np.einsum(expr, *args, optimize=True)
    return np.sqrt(np.maximum(sq, 0.0))
