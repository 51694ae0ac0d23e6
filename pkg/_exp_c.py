import numpy as np

n = 96
dx = 48.0 / 95
c = (np.arange(n) - n // 2) * dx
X, Y, Z = np.meshgrid(c, c, c, indexing="ij")
R = np.sqrt(X * X + Y * Y + Z * Z)

k1 = 2 * np.pi * np.fft.fftfreq(n, d=dx)
th = k1 * dx
k2hat = (15.0 - 16.0 * np.cos(th) + np.cos(2 * th)) / 6.0 / dx ** 2
K2 = (k2hat[:, None, None] + k2hat[None, :, None]
      + k2hat[None, None, :])
K = np.sqrt(np.maximum(K2, 0.0))


def poly_bump(p):
    u = (R / 2.0) ** 2
    out = np.where(u < 1, (1 - np.minimum(u, 1)) ** p, 0.0)
    return out


def cos_bump(p):
    out = np.where(R < 2, np.cos(np.pi * R / 4.0) ** p, 0.0)
    return out


def curl_xy(phi):
    # A = (d_y phi, -d_x phi); spectral derivative is fine for screening
    ph = np.fft.fftn(phi)
    ax = np.real(np.fft.ifftn(1j * k1[None, :, None] * ph))
    ay = -np.real(np.fft.ifftn(1j * k1[:, None, None] * ph))
    return ax, ay


def run(name, phi, psi):
    a0 = curl_xy(phi)
    e0 = curl_xy(psi)
    # normalize sup to eps (irrelevant for the exponent, skip)
    ah = [np.fft.fftn(a) for a in a0]
    eh = [np.fft.fftn(e) for e in e0]
    ts = np.arange(5.0, 20.01, 0.75)
    sups = []
    with np.errstate(invalid="ignore", divide="ignore"):
        sinc_base = None
    for t in ts:
        cosKt = np.cos(K * t)
        sincKt = np.where(K > 1e-14, np.sin(K * t) / np.maximum(K, 1e-14), t)
        sup = 0.0
        for comp in range(2):
            at = np.real(np.fft.ifftn(ah[comp] * cosKt + eh[comp] * sincKt))
            sup = max(sup, np.abs(at).max())
        sups.append(sup)
    ts = np.asarray(ts)
    sups = np.asarray(sups)
    A = np.vstack([np.log(ts), np.ones_like(ts)]).T
    p, _ = np.linalg.lstsq(A, np.log(sups), rcond=None)[0]
    print(f"{name:16s} p = {p:.3f}", flush=True)


run("poly p=8", poly_bump(8), poly_bump(9))
run("poly p=4", poly_bump(4), poly_bump(5))
run("poly p=3", poly_bump(3), poly_bump(4))
run("poly p=2", poly_bump(2), poly_bump(3))
run("cos^2", cos_bump(2), cos_bump(4))
run("cos^3", cos_bump(3), cos_bump(5))
run("cos^4", cos_bump(4), cos_bump(6))
