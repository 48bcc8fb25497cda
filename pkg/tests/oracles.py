"""Independent reference computations the tests check the library against.

Nothing here imports the code paths under test: matrix exponentials come from
a plain Taylor series, Bloch rotations from the Rodrigues formula, and the
feedback loop from a literal reduced-form RK4.
"""

import numpy as np


def taylor_expm(A, terms=30):
    A = np.asarray(A, dtype=complex)
    result = np.eye(A.shape[0], dtype=complex)
    term = np.eye(A.shape[0], dtype=complex)
    for n in range(1, terms + 1):
        term = term @ A / n
        result = result + term
    return result


def scaled_taylor_expm(A, terms=30):
    """Taylor series after 2^-s scaling, squared back s times."""
    A = np.asarray(A, dtype=complex)
    norm = np.linalg.norm(A, 2)
    s = 0 if norm <= 0.5 else int(np.ceil(np.log2(norm / 0.5)))
    R = taylor_expm(A / 2**s, terms)
    for _ in range(s):
        R = R @ R
    return R


def rodrigues(n, alpha):
    """3x3 rotation matrix about unit axis n by angle alpha (right-handed)."""
    n = np.asarray(n, dtype=float)
    K = np.array([[0.0, -n[2], n[1]], [n[2], 0.0, -n[0]], [-n[1], n[0], 0.0]])
    return np.eye(3) + np.sin(alpha) * K + (1.0 - np.cos(alpha)) * (K @ K)


def taylor_cos(A, terms=40):
    """cos of a Hermitian matrix: even Taylor series plus double-angle reduction.

    The argument is scaled by 2^-s until its norm is below 1/2 (keeping the
    series free of cancellation), then cos(2X) = 2 cos(X)^2 - I is applied s
    times.
    """
    A = np.asarray(A, dtype=complex)
    norm = np.linalg.norm(A, 2)
    s = 0 if norm <= 0.5 else int(np.ceil(np.log2(norm / 0.5)))
    X = A / 2**s
    X2 = X @ X
    result = np.eye(A.shape[0], dtype=complex)
    term = np.eye(A.shape[0], dtype=complex)
    for n in range(1, terms + 1):
        term = term @ X2 * (-1.0 / ((2 * n - 1) * (2 * n)))
        result = result + term
    eye = np.eye(A.shape[0], dtype=complex)
    for _ in range(s):
        result = 2.0 * result @ result - eye
    return result


def pauli_coefficients(H):
    """(cx, cy, cz) with H = c0 I + cx sx + cy sy + cz sz."""
    H = np.asarray(H, dtype=complex)
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sy = np.array([[0, -1j], [1j, 0]], dtype=complex)
    sz = np.array([[1, 0], [0, -1]], dtype=complex)
    return np.array([np.trace(H @ P).real / 2 for P in (sx, sy, sz)])


def reduced_loop_rk4(r0, rf, alpha, beta, dt, steps):
    """Fine-step RK4 on the gain-only closed loop dr/dt = f(r; alpha, beta)."""
    rf = np.asarray(rf, dtype=float)

    def f(r):
        w = r[0] * rf[2] - rf[0] * r[2]
        u = rf[1] * r[2] - r[1] * rf[2]
        return np.array([-alpha * w * r[2], beta * u * r[2],
                         alpha * w * r[0] - beta * u * r[1]])

    r = np.asarray(r0, dtype=float).copy()
    out = np.empty((steps + 1, 3))
    out[0] = r
    for k in range(steps):
        k1 = f(r)
        k2 = f(r + 0.5 * dt * k1)
        k3 = f(r + 0.5 * dt * k2)
        k4 = f(r + dt * k3)
        r = r + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        out[k + 1] = r
    return out
