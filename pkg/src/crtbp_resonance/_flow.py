"""Compiled kernels for the Delaunay-variable flow between Poincare sections.

The perihelion argument decreases monotonically (``dg/dt = -1 + O(mu)``), so
``s = g0 - g`` serves as the independent variable and a return to the
section is simply ``s = 2 pi``: no event location is needed. The state is
``(l, L, G, t)``. Because the unperturbed flow is linear in ``s`` the local
truncation error of the Runge-Kutta scheme is proportional to ``mu``.
"""

from __future__ import annotations

import numpy as np
from numba import njit
from scipy.integrate._ivp import dop853_coefficients as _dop

#: Butcher tableau of the 12-stage, order-8 Dormand-Prince pair
RK_A = np.ascontiguousarray(_dop.A[: _dop.N_STAGES, : _dop.N_STAGES])
RK_B = np.ascontiguousarray(_dop.B)
RK_C = np.ascontiguousarray(_dop.C[: _dop.N_STAGES])
N_STAGES = _dop.N_STAGES
TWO_PI = 2.0 * np.pi


@njit(cache=True)
def _kepler(e, l):
    k = np.floor(l / TWO_PI + 0.5)
    M = l - k * TWO_PI
    E = M + e * np.sin(M)
    for _ in range(60):
        dE = (E - e * np.sin(E) - M) / (1.0 - e * np.cos(E))
        E -= dE
        if abs(dE) < 1e-15:
            break
    return E + k * TWO_PI


@njit(cache=True)
def omega_prime_grad(l, L, G, g, mu):
    """``(W, W_l, W_L, W_G, W_g)`` for ``W = 1/|x - x2| - r cos(theta)``, ``a = L^2/(1-mu)``."""
    m = 1.0 - mu
    e = np.sqrt(max(0.0, 1.0 - (G / L) ** 2))
    a = L * L / m
    E = _kepler(e, l)
    cE, sE = np.cos(E), np.sin(E)
    den = 1.0 - e * cE
    eta = np.sqrt(1.0 - e * e)
    cn = (cE - e) / den
    sn = eta * sE / den
    r = a * den
    ct = np.cos(g) * cn - np.sin(g) * sn
    st = np.sin(g) * cn + np.cos(g) * sn
    d2 = 1.0 + r * r - 2.0 * r * ct
    inv = 1.0 / np.sqrt(d2)
    inv3 = inv / d2
    W = inv - r * ct
    w_r = -(r - ct) * inv3 - ct
    w_t = -r * st * inv3 + r * st
    k = 1.0 + e * cn
    r_l = a * e * sn / eta
    t_l = k * k / eta**3
    W_l = w_r * r_l + w_t * t_l
    r_e = -a * cn
    t_e = sn * (2.0 + e * cn) / (eta * eta)
    e_L = G * G / (L**3 * e)
    e_G = -G / (L * L * e)
    a_L = 2.0 * L / m
    W_L = w_r * (r / a * a_L + r_e * e_L) + w_t * t_e * e_L
    W_G = (w_r * r_e + w_t * t_e) * e_G
    return W, W_l, W_L, W_G, w_t


@njit(cache=True)
def _rhs(y, s, g0, mu, out):
    l, L, G = y[0], y[1], y[2]
    _, W_l, W_L, W_G, W_g = omega_prime_grad(l, L, G, g0 - s, mu)
    m = 1.0 - mu
    dsdt = 1.0 + mu * W_G
    out[0] = (m * m / L**3 - mu * W_L) / dsdt
    out[1] = mu * W_l / dsdt
    out[2] = mu * W_g / dsdt
    out[3] = 1.0 / dsdt


@njit(cache=True)
def _rk_step(y, s, h, g0, mu, A, B, C, K, tmp):
    n = y.size
    for i in range(K.shape[0]):
        for c in range(n):
            acc = y[c]
            for j in range(i):
                acc += h * A[i, j] * K[j, c]
            tmp[c] = acc
        _rhs(tmp, s + C[i] * h, g0, mu, K[i])
    for c in range(n):
        acc = 0.0
        for i in range(K.shape[0]):
            acc += B[i] * K[i, c]
        y[c] += h * acc


@njit(cache=True)
def propagate(Y, g0, mu, s_end, nsteps, A, B, C):
    """Advance each row ``(l, L, G, t)`` of ``Y`` from ``s = 0`` to ``s_end`` in place.

    A negative ``s_end`` runs the flow backwards.
    """
    h = s_end / nsteps
    K = np.empty((A.shape[0], 4))
    tmp = np.empty(4)
    y = np.empty(4)
    for p in range(Y.shape[0]):
        for c in range(4):
            y[c] = Y[p, c]
        s = 0.0
        for _ in range(nsteps):
            _rk_step(y, s, h, g0, mu, A, B, C, K, tmp)
            s += h
        for c in range(4):
            Y[p, c] = y[c]


@njit(cache=True)
def energy(l, L, G, g, mu):
    W = omega_prime_grad(l, L, G, g, mu)[0]
    m = 1.0 - mu
    return -m * m / (2.0 * L * L) - G - mu * W


@njit(cache=True)
def solve_G(l, L, g, H, mu, G0, tol, maxiter):
    """Newton for ``energy(l, L, G, g) = H``; returns ``(G, residual, iterations)``."""
    G = G0
    m = 1.0 - mu
    res = 0.0
    for it in range(maxiter):
        W, _, _, W_G, _ = omega_prime_grad(l, L, G, g, mu)
        res = -m * m / (2.0 * L * L) - G - mu * W - H
        G -= res / (-1.0 - mu * W_G)
        if abs(res) <= tol:
            return G, res, it
    return G, res, maxiter
