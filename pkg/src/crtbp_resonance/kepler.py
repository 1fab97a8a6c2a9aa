"""Two-body kinematics in heliocentric Delaunay variables.

The heavy primary (mass ``1 - mu``) sits at the origin, the light one at
``(1, 0)`` in a frame rotating anticlockwise with unit angular velocity.
All functions accept numpy arrays as well as floats.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CollisionError, ConvergenceError, DomainError

TWO_PI = 2.0 * np.pi

__all__ = [
    "DelaunayState",
    "CartesianState",
    "solve_kepler",
    "true_anomaly",
    "delaunay_to_polar",
    "delaunay_to_cartesian",
    "cartesian_to_delaunay",
    "hamiltonian_cartesian",
    "hamiltonian_delaunay",
]


def wrap_angle(x):
    """Map angles to [0, 2*pi)."""
    y = np.mod(x, TWO_PI)
    # np.mod returns exactly 2*pi for tiny negative inputs
    y = np.where(y >= TWO_PI, y - TWO_PI, y)
    return float(y) if y.ndim == 0 else y


@dataclass(frozen=True)
class DelaunayState:
    """Point in heliocentric Delaunay variables ``(L, l, G, g)``."""

    L: float
    l: float
    G: float
    g: float

    def __post_init__(self):
        if not (self.L > 0 and 0 < self.G <= self.L):
            raise DomainError(f"need 0 < G <= L, got L={self.L}, G={self.G}")
        object.__setattr__(self, "l", wrap_angle(self.l))
        object.__setattr__(self, "g", wrap_angle(self.g))

    @property
    def e(self) -> float:
        return float(np.sqrt(max(0.0, 1.0 - (self.G / self.L) ** 2)))

    def a(self, mu: float = 0.0) -> float:
        return self.L**2 / (1.0 - mu)


@dataclass(frozen=True)
class CartesianState:
    """Rotating-frame position and conjugate momenta."""

    x: float
    y: float
    px: float
    py: float

    def __post_init__(self):
        if np.hypot(self.x, self.y) == 0.0 or np.hypot(self.x - 1.0, self.y) == 0.0:
            raise CollisionError("state coincides with a primary")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.px, self.py])


def solve_kepler(e, l, tol=1e-14, maxiter=50):
    """Eccentric anomaly E from ``l = E - e sin E``.

    Newton from ``E0 = M + e sin M`` on the reduced anomaly M in [-pi, pi];
    entries that miss ``tol`` after ``maxiter`` steps are finished by
    bisection. The result keeps the branch of ``l``, so ``E - l`` is
    2*pi-periodic and odd.
    """
    e = np.asarray(e, dtype=float)
    l = np.asarray(l, dtype=float)
    if np.any((e < 0) | (e >= 1)) or not np.all(np.isfinite(e)):
        raise DomainError("eccentricity must lie in [0, 1)")
    e, l = np.broadcast_arrays(e, l)
    k = np.round(l / TWO_PI)
    M = l - k * TWO_PI
    E = M + e * np.sin(M)
    for _ in range(maxiter):
        f = E - e * np.sin(E) - M
        dE = f / (1.0 - e * np.cos(E))
        E = E - dE
        if np.all(np.abs(E - e * np.sin(E) - M) <= tol):
            break
    bad = np.abs(E - e * np.sin(E) - M) > tol
    if np.any(bad):
        E = np.array(E, copy=True)
        idx = np.nonzero(bad)
        lo = np.full(np.shape(E[idx]), -np.pi)
        hi = np.full(np.shape(E[idx]), np.pi)
        eb, Mb = e[idx], M[idx]
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            f = mid - eb * np.sin(mid) - Mb
            lo = np.where(f < 0, mid, lo)
            hi = np.where(f < 0, hi, mid)
        E[idx] = 0.5 * (lo + hi)
        if np.any(np.abs(E - e * np.sin(E) - M) > 10 * tol):
            raise ConvergenceError("Kepler solve failed", float(np.max(np.abs(E - e * np.sin(E) - M))))
    E = E + k * TWO_PI
    return float(E) if E.ndim == 0 else E


def true_anomaly(e, E):
    """True anomaly from eccentric anomaly using both sine and cosine lines."""
    den = 1.0 - e * np.cos(E)
    cos_nu = (np.cos(E) - e) / den
    sin_nu = np.sqrt(1.0 - e * e) * np.sin(E) / den
    return np.arctan2(sin_nu, cos_nu)


def _polar(L, l, G, g, mu):
    e = np.sqrt(np.maximum(0.0, 1.0 - (G / L) ** 2))
    a = L * L / (1.0 - mu)
    E = solve_kepler(e, l)
    nu = true_anomaly(e, E)
    r = a * (1.0 - e * np.cos(E))
    return r, g + nu, e, a, nu


def delaunay_to_polar(s: DelaunayState, mu: float = 0.0):
    """Rotating-frame polar coordinates ``(r, theta)`` with theta in [0, 2*pi)."""
    if not 0 <= mu < 1:
        raise DomainError("mass ratio must lie in [0, 1)")
    r, theta, *_ = _polar(s.L, s.l, s.G, s.g, mu)
    return float(r), wrap_angle(theta)


def cartesian_arrays(L, l, G, g, mu=0.0):
    """Vectorised Delaunay -> (x, y, px, py).

    The momenta are the inertial Keplerian velocity (central mass ``1 - mu``)
    expressed in rotating-frame components; with that choice
    ``x*py - y*px = G``.
    """
    r, theta, e, a, nu = _polar(L, l, G, g, mu)
    m = 1.0 - mu
    slr = a * (1.0 - e * e)
    h = np.sqrt(m / slr)
    vr = h * e * np.sin(nu)
    vt = h * (1.0 + e * np.cos(nu))
    c, s = np.cos(theta), np.sin(theta)
    return r * c, r * s, vr * c - vt * s, vr * s + vt * c


def delaunay_to_cartesian(s: DelaunayState, mu: float = 0.0) -> CartesianState:
    x, y, px, py = cartesian_arrays(s.L, s.l, s.G, s.g, mu)
    if np.hypot(x - 1.0, y) < 1e-8 or np.hypot(x, y) < 1e-8:
        raise CollisionError("Delaunay state maps onto a primary")
    return CartesianState(float(x), float(y), float(px), float(py))


def delaunay_arrays(x, y, px, py, mu=0.0):
    """Vectorised (x, y, px, py) -> (L, l, G, g) via osculating elements."""
    m = 1.0 - mu
    r = np.hypot(x, y)
    v2 = px * px + py * py
    energy = 0.5 * v2 - m / r
    if np.any(energy >= 0):
        raise DomainError("osculating orbit is not elliptic")
    a = -m / (2.0 * energy)
    L = np.sqrt(m * a)
    G = x * py - y * px
    rdot = (x * px + y * py) / r
    ecosE = 1.0 - r / a
    esinE = r * rdot / np.sqrt(m * a)
    E = np.arctan2(esinE, ecosE)
    e = np.hypot(ecosE, esinE)
    l = E - esinE
    nu = true_anomaly(e, E)
    g = np.arctan2(y, x) - nu
    return L, wrap_angle(l), G, wrap_angle(g)


def cartesian_to_delaunay(c: CartesianState, mu: float = 0.0) -> DelaunayState:
    L, l, G, g = delaunay_arrays(c.x, c.y, c.px, c.py, mu)
    return DelaunayState(float(L), float(l), float(G), float(g))


def hamiltonian_cartesian(x, y, px, py, mu):
    r1 = np.hypot(x, y)
    r2 = np.hypot(x - 1.0, y)
    return 0.5 * (px * px + py * py) + y * px - x * py - (1.0 - mu) / r1 - mu * (1.0 / r2 - x)


def hamiltonian_delaunay(L, l, G, g, mu):
    """Delaunay form of the energy with the exact ``a = L^2/(1-mu)`` geometry."""
    r, theta, *_ = _polar(L, l, G, g, mu)
    omega_p = 1.0 / np.sqrt(1.0 + r * r - 2.0 * r * np.cos(theta)) - r * np.cos(theta)
    return -((1.0 - mu) ** 2) / (2.0 * L * L) - G - mu * omega_p
