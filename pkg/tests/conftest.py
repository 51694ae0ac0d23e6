import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


def random_sym10(rng, npts, amp=0.05):
    return amp * rng.standard_normal((10, npts))


def random_dh(rng, npts, amp=1.0):
    return amp * rng.standard_normal((4, 10, npts))


def random_dA(rng, npts, amp=1.0):
    return amp * rng.standard_normal((4, 4, npts))


def rel_err(a, b):
    scale = max(np.abs(a).max(), np.abs(b).max(), 1e-300)
    return np.abs(a - b).max() / scale


def fit_order(dxs, errs):
    """Least-squares slope of log(err) against log(dx)."""
    return float(np.polyfit(np.log(dxs), np.log(errs), 1)[0])
