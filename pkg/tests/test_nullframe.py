import numpy as np
import pytest

from emwave import nullframe
from emwave.nullframe import (AxisDegeneracyError, FramePoint, frame_norm,
                              null_vectors, tangential_derivative,
                              tangential_projector)
from emwave.tensors import MINK


def _pt(rng, npts=40):
    x = rng.standard_normal((3, npts)) * 3.0
    x += np.sign(x) * 0.5          # keep away from the origin
    t = rng.standard_normal(npts)
    return FramePoint(t, x)


def test_framepoint_bookkeeping():
    pt = FramePoint(1.0, np.array([[3.0], [4.0], [0.0]]))
    assert np.allclose(pt.r, 5.0)
    assert np.allclose(pt.q, 4.0)
    assert np.allclose(pt.omega[:, 0], [0.6, 0.8, 0.0])


def test_framepoint_degenerate():
    with pytest.raises(AxisDegeneracyError):
        FramePoint(0.0, np.zeros((3, 1)))


def test_null_vectors(rng):
    pt = _pt(rng)
    L, Lb = null_vectors(pt)
    mdot = lambda a, b: np.einsum('a...,ab,b...->...', a, np.diag(
        [-1.0, 1, 1, 1]), b)
    assert np.abs(mdot(L, L)).max() < 1e-14
    assert np.abs(mdot(Lb, Lb)).max() < 1e-14
    assert np.abs(mdot(L, Lb) + 2.0).max() < 1e-14


def test_tangential_projector(rng):
    pt = _pt(rng)
    Pi = tangential_projector(pt)
    assert np.abs(np.einsum('ij...,j...->i...', Pi, pt.omega)).max() < 1e-14
    Pi2 = np.einsum('ij...,jk...->ik...', Pi, Pi)
    assert np.abs(Pi2 - Pi).max() < 1e-13
    assert np.abs(np.einsum('ii...->...', Pi) - 2.0).max() < 1e-13


def test_outgoing_profile_annihilated(rng):
    """All cone-tangential derivatives of f(r - t) vanish."""
    pt = _pt(rng)
    fp = np.cos(pt.q)                       # f'(q) for f = sin
    grad = np.empty((4,) + pt.r.shape)
    grad[0] = -fp
    grad[1:] = pt.omega * fp
    out = tangential_derivative(grad, pt)
    assert np.abs(out).max() < 1e-13


def test_tangential_decomposition_identity(rng):
    """|dbar p|^2 = |L p|^2 + |S1 p|^2 + |S2 p|^2, independent of the
    choice of the orthonormal tangent pair."""
    pt = _pt(rng)
    grad = rng.standard_normal((4,) + pt.r.shape)
    out = tangential_derivative(grad, pt)
    lhs = (out ** 2).sum(axis=0)

    # explicit tangent pairs: one reference, one rotated in the tangent
    # plane by a random per-point angle
    om = pt.omega
    helper = np.zeros_like(om)
    helper[np.argmin(np.abs(om), axis=0), np.arange(om.shape[1])] = 1.0
    s1 = np.cross(om.T, helper.T).T
    s1 /= np.sqrt((s1 ** 2).sum(axis=0))
    s2 = np.cross(om.T, s1.T).T
    Lp = grad[0] + (om * grad[1:]).sum(axis=0)
    for theta in (0.0, 0.77):
        a = np.cos(theta) * s1 + np.sin(theta) * s2
        b = -np.sin(theta) * s1 + np.cos(theta) * s2
        rhs = (Lp ** 2 + ((a * grad[1:]).sum(axis=0)) ** 2
               + ((b * grad[1:]).sum(axis=0)) ** 2)
        assert np.abs(lhs - rhs).max() < 1e-12 * max(1.0, lhs.max())


def test_minkowski_frame_values():
    pt = FramePoint(0.5, np.array([[1.0], [2.0], [2.0]]))
    m = MINK[:, :, None]
    assert abs(float(frame_norm(m, ("L", "U"), pt)[0]) - np.sqrt(2)) < 1e-12
    assert float(frame_norm(m, ("L", "L"), pt)[0]) < 1e-12
    # spatial projector part: |m|_SS = |Pi|_F = sqrt(2)
    assert abs(float(frame_norm(m, ("S", "S"), pt)[0]) - np.sqrt(2)) < 1e-12


def test_frame_norm_rotation_invariance(rng):
    """Rotating the point and the tensor together leaves every graded
    norm unchanged."""
    # random rotation from QR
    q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    if np.linalg.det(q) < 0:
        q[:, 0] *= -1.0
    R = np.eye(4)
    R[1:, 1:] = q
    x = rng.standard_normal((3, 10)) + 0.5
    t = rng.standard_normal(10)
    p = rng.standard_normal((4, 4, 10))
    pt = FramePoint(t, x)
    pt_rot = FramePoint(t, np.einsum('ij,j...->i...', q, x))
    p_rot = np.einsum('am,bn,mn...->ab...', R, R, p)
    for tags in (("L", "L"), ("L", "T"), ("T", "U"), ("U", "U"),
                 ("S", "S"), ("L",)):
        n1 = frame_norm(p, tags, pt)
        n2 = frame_norm(p_rot, tags, pt_rot)
        assert np.abs(n1 - n2).max() < 1e-11


def test_frame_norm_euclidean_fallback(rng):
    pt = _pt(rng, npts=5)
    p = rng.standard_normal((4, 4, 5))
    n = frame_norm(p, (), pt)
    assert np.allclose(n, np.sqrt((p ** 2).sum(axis=(0, 1))))


def test_frame_norm_errors(rng):
    pt = _pt(rng, npts=2)
    p = rng.standard_normal((4, 4, 2))
    with pytest.raises(ValueError):
        frame_norm(p, ("L", "L", "L"), pt)     # more tags than rank
    with pytest.raises(ValueError):
        frame_norm(p, ("X",), pt)
    with pytest.raises(ValueError):
        frame_norm(rng.standard_normal((4, 4, 4, 4, 2)), ("L",), pt)
