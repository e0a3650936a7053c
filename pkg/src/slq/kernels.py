"""Inner loops of the integrators.

Each kernel exists twice: an explicit-loop version compiled with numba and a
numpy version used when numba is missing or ``SLQ_DISABLE_NUMBA=1``. The
public names (:func:`dopri_step`, :func:`propagate_batch`) point at whichever
is active; both variants stay importable for testing and benchmarking.
"""
import numpy as np

from ._accel import HAVE_NUMBA, njit

# Dormand-Prince 5(4)
C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
A = np.zeros((7, 7))
A[1, 0] = 1 / 5
A[2, :2] = [3 / 40, 9 / 40]
A[3, :3] = [44 / 45, -56 / 15, 32 / 9]
A[4, :4] = [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]
A[5, :5] = [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]
A[6, :6] = [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]
E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])
# continuous extension (Hairer, Norsett & Wanner, dopri5 contd5)
D = np.array([
    -12715105075 / 11282082432, 0.0, 87487479700 / 32700410799, -10690763975 / 1880347072,
    701980252875 / 199316789632, -1453857185 / 822651844, 69997945 / 29380423,
])


def dopri_step_numpy(a, g, y, h, rtol, atol):
    """One Dormand-Prince step of y' = a(x) y + g(x).

    Args:
        a: (7, 2, 2) complex matrices at the stage nodes x + C*h.
        g: (7, 2) complex forcing at the same nodes.
        y: (2,) complex state at x.

    Returns:
        (y_new, err, rcont): the 5th-order update, the scaled RMS error norm
        and the (5, 2) dense-output coefficients.
    """
    k = np.zeros((7, 2), dtype=np.complex128)
    for s in range(7):
        yt = y + h * (A[s, :s] @ k[:s]) if s else y
        k[s] = a[s] @ yt + g[s]
    y_new = y + h * (A[6, :6] @ k[:6])
    err_vec = h * (E @ k)
    sc = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
    err = np.sqrt(np.mean((np.abs(err_vec) / sc) ** 2))
    rc = np.empty((5, 2), dtype=np.complex128)
    rc[0] = y
    rc[1] = y_new - y
    rc[2] = h * k[0] - rc[1]
    rc[3] = rc[1] - h * k[6] - rc[2]
    rc[4] = h * (D @ k)
    return y_new, err, rc


def _dopri_step_loop(a, g, y, h, rtol, atol):
    k = np.zeros((7, 2), dtype=np.complex128)
    yt = np.empty(2, dtype=np.complex128)
    for s in range(7):
        for i in range(2):
            acc = 0j
            for j in range(s):
                acc += A[s, j] * k[j, i]
            yt[i] = y[i] + h * acc
        for i in range(2):
            k[s, i] = a[s, i, 0] * yt[0] + a[s, i, 1] * yt[1] + g[s, i]
    y_new = yt.copy()  # stage 7 input is the 5th-order solution
    err = 0.0
    rc = np.empty((5, 2), dtype=np.complex128)
    for i in range(2):
        e = 0j
        d = 0j
        for j in range(7):
            e += E[j] * k[j, i]
            d += D[j] * k[j, i]
        sc = atol + rtol * max(abs(y[i]), abs(y_new[i]))
        err += (abs(h * e) / sc) ** 2
        rc[0, i] = y[i]
        rc[1, i] = y_new[i] - y[i]
        rc[2, i] = h * k[0, i] - rc[1, i]
        rc[3, i] = rc[1, i] - h * k[6, i] - rc[2, i]
        rc[4, i] = h * d
    return y_new, np.sqrt(err / 2.0), rc


def propagate_batch_numpy(a, hs, lams, y0):
    """Classical RK4 for many spectral parameters at once.

    Args:
        a: (n_steps, 3, 2, 2) complex matrices at lam = 0 for the nodes
            x_j, x_j + h_j/2, x_j + h_j.
        hs: (n_steps,) step sizes.
        lams: (m,) spectral parameters; lam is subtracted from entry [1, 0].
        y0: (2,) complex initial state.

    Returns:
        (m, 2) complex end states.
    """
    m = lams.shape[0]
    u = np.full(m, y0[0], dtype=np.complex128)
    v = np.full(m, y0[1], dtype=np.complex128)
    lam = lams.astype(np.complex128)
    for j in range(hs.shape[0]):
        h = hs[j]
        m0, m1, m2 = a[j, 0], a[j, 1], a[j, 2]
        k1u = m0[0, 0] * u + m0[0, 1] * v
        k1v = (m0[1, 0] - lam) * u + m0[1, 1] * v
        u2, v2 = u + 0.5 * h * k1u, v + 0.5 * h * k1v
        k2u = m1[0, 0] * u2 + m1[0, 1] * v2
        k2v = (m1[1, 0] - lam) * u2 + m1[1, 1] * v2
        u3, v3 = u + 0.5 * h * k2u, v + 0.5 * h * k2v
        k3u = m1[0, 0] * u3 + m1[0, 1] * v3
        k3v = (m1[1, 0] - lam) * u3 + m1[1, 1] * v3
        u4, v4 = u + h * k3u, v + h * k3v
        k4u = m2[0, 0] * u4 + m2[0, 1] * v4
        k4v = (m2[1, 0] - lam) * u4 + m2[1, 1] * v4
        u = u + h / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u)
        v = v + h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v)
    return np.stack((u, v), axis=1)


def _propagate_batch_loop(a, hs, lams, y0):
    m = lams.shape[0]
    out = np.empty((m, 2), dtype=np.complex128)
    for q in range(m):
        lam = lams[q]
        u = y0[0]
        v = y0[1]
        for j in range(hs.shape[0]):
            h = hs[j]
            k1u = a[j, 0, 0, 0] * u + a[j, 0, 0, 1] * v
            k1v = (a[j, 0, 1, 0] - lam) * u + a[j, 0, 1, 1] * v
            u2 = u + 0.5 * h * k1u
            v2 = v + 0.5 * h * k1v
            k2u = a[j, 1, 0, 0] * u2 + a[j, 1, 0, 1] * v2
            k2v = (a[j, 1, 1, 0] - lam) * u2 + a[j, 1, 1, 1] * v2
            u3 = u + 0.5 * h * k2u
            v3 = v + 0.5 * h * k2v
            k3u = a[j, 1, 0, 0] * u3 + a[j, 1, 0, 1] * v3
            k3v = (a[j, 1, 1, 0] - lam) * u3 + a[j, 1, 1, 1] * v3
            u4 = u + h * k3u
            v4 = v + h * k3v
            k4u = a[j, 2, 0, 0] * u4 + a[j, 2, 0, 1] * v4
            k4v = (a[j, 2, 1, 0] - lam) * u4 + a[j, 2, 1, 1] * v4
            u = u + h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
            v = v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        out[q, 0] = u
        out[q, 1] = v
    return out


dopri_step_numba = njit(_dopri_step_loop)
propagate_batch_numba = njit(_propagate_batch_loop)

if HAVE_NUMBA:
    dopri_step = dopri_step_numba
    propagate_batch = propagate_batch_numba
else:
    dopri_step = dopri_step_numpy
    propagate_batch = propagate_batch_numpy

BACKEND = "numba" if HAVE_NUMBA else "numpy"
