"""The disturbing function and its partial derivatives in Delaunay variables.

``omega_prime = 1/sqrt(1 + r^2 - 2 r cos(theta)) - r cos(theta)`` (direct plus
indirect term) and ``omega = omega_prime - 1/L^2``.  Partials are taken by
the chain rule through ``(e, a, nu, r, theta)``; ``a = L^2/(1 - mu)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CollisionError, DomainError
from .kepler import solve_kepler, true_anomaly

#: default clearance from the second primary used by the resonance windows
COLLISION_CLEARANCE = 0.05
#: minimum of ``1 + r^2 - 2 r cos(theta)`` accepted by the evaluators
MIN_DISTANCE_SQ = 1e-8


@dataclass(frozen=True)
class PartialsBundle:
    """Value of omega and the partials entering the return-map quadratures."""

    omega: np.ndarray
    d_l: np.ndarray
    d_g: np.ndarray
    d_L: np.ndarray | None = None
    d_G: np.ndarray | None = None
    d_ll: np.ndarray | None = None
    d_lL: np.ndarray | None = None
    d_lG: np.ndarray | None = None


def _geometry(L, l, G, g, mu):
    L, l, G, g = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (L, l, G, g)))
    e = np.sqrt(np.maximum(0.0, 1.0 - (G / L) ** 2))
    a = L * L / (1.0 - mu)
    E = solve_kepler(e, l)
    nu = true_anomaly(e, E)
    r = a * (1.0 - e * np.cos(E))
    theta = g + nu
    ct, st = np.cos(theta), np.sin(theta)
    dist2 = 1.0 + r * r - 2.0 * r * ct
    if np.any(dist2 < MIN_DISTANCE_SQ):
        raise CollisionError("evaluation point is within collision distance of the second primary")
    return L, G, e, a, nu, r, ct, st, dist2


def omega_prime(L, l, G, g, mu=0.0):
    _, _, _, _, _, r, ct, _, dist2 = _geometry(L, l, G, g, mu)
    return 1.0 / np.sqrt(dist2) - r * ct


def omega(L, l, G, g, mu=0.0):
    """Perturbing function with the ``-1/L^2`` shift."""
    return omega_prime(L, l, G, g, mu) - 1.0 / np.asarray(L, dtype=float) ** 2


def omega_partials(L, l, G, g, mu=0.0, actions=True, second=True):
    """Analytic partials of omega.

    ``actions`` adds d_L and d_G, ``second`` adds d_ll (and d_lL, d_lG when
    ``actions`` is set). Action derivatives need ``e > 0``.
    """
    L, G, e, a, nu, r, ct, st, dist2 = _geometry(L, l, G, g, mu)
    if actions and np.any(e <= 0.0):
        raise DomainError("derivatives with respect to L or G need e > 0")

    inv3 = dist2**-1.5
    # partials of omega' in (r, theta)
    w_r = -(r - ct) * inv3 - ct
    w_t = -r * st * inv3 + r * st

    eta = np.sqrt(1.0 - e * e)
    cn, sn = np.cos(nu), np.sin(nu)
    k = 1.0 + e * cn
    r_l = a * e * sn / eta
    t_l = k * k / eta**3

    value = 1.0 / np.sqrt(dist2) - r * ct - 1.0 / L**2
    out = dict(omega=value, d_l=w_r * r_l + w_t * t_l, d_g=w_t)

    if actions:
        m = L * L / a
        e_L = G * G / (L**3 * e)
        e_G = -G / (L * L * e)
        a_L = 2.0 * L / m
        r_e = -a * cn
        t_e = sn * (2.0 + e * cn) / eta**2
        r_L = (r / a) * a_L + r_e * e_L
        t_L = t_e * e_L
        r_G = r_e * e_G
        t_G = t_e * e_G
        out["d_L"] = w_r * r_L + w_t * t_L + 2.0 / L**3
        out["d_G"] = w_r * r_G + w_t * t_G

    if second:
        inv5 = dist2**-2.5
        w_rr = -inv3 + 3.0 * (r - ct) ** 2 * inv5
        w_rt = -st * inv3 + 3.0 * (r - ct) * r * st * inv5 + st
        w_tt = -r * ct * inv3 + 3.0 * (r * st) ** 2 * inv5 + r * ct
        r_ll = a * e * cn * t_l / eta
        t_ll = -2.0 * k * e * sn * t_l / eta**3
        out["d_ll"] = (
            w_rr * r_l * r_l + 2.0 * w_rt * r_l * t_l + w_tt * t_l * t_l + w_r * r_ll + w_t * t_ll
        )
        if actions:
            # derivatives of r_l and t_l with respect to e at fixed l
            r_l_e = a * sn / eta**3 + (a * e * cn / eta) * t_e
            t_l_e = 2.0 * k * cn / eta**3 + 3.0 * e * k * k / eta**5 - 2.0 * k * e * sn / eta**3 * t_e
            r_lL = (e * sn / eta) * a_L + r_l_e * e_L
            t_lL = t_l_e * e_L
            r_lG = r_l_e * e_G
            t_lG = t_l_e * e_G

            def mixed(r_x, t_x, r_lx, t_lx):
                return (
                    w_rr * r_l * r_x
                    + w_rt * (r_l * t_x + t_l * r_x)
                    + w_tt * t_l * t_x
                    + w_r * r_lx
                    + w_t * t_lx
                )

            out["d_lL"] = mixed(r_L, t_L, r_lL, t_lL)
            out["d_lG"] = mixed(r_G, t_G, r_lG, t_lG)

    return PartialsBundle(**out)


def omega_partials_fd(L, l, G, g, mu=0.0, h=1e-3):
    """Finite-difference oracle for :func:`omega_partials`.

    Central differences at steps ``s`` and ``s/2`` combined by one
    Richardson step. Angle steps are ``h``; action steps are ``h * e^2``
    because ``de/dG`` grows like ``1/e``. Only :func:`omega` values are used.
    """
    L, l, G, g = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (L, l, G, g)))
    e2 = np.maximum(1.0 - (G / L) ** 2, 0.0)
    steps = {"dl": h, "dg": h, "dL": h * e2, "dG": h * e2}

    def f(dL=0.0, dl=0.0, dG=0.0, dg=0.0):
        return omega(L + dL, l + dl, G + dG, g + dg, mu)

    def rich(d):
        return (4.0 * d(0.5) - d(1.0)) / 3.0

    def d1(name):
        def d(c):
            s = c * steps[name]
            return (f(**{name: s}) - f(**{name: -s})) / (2 * s)

        return d

    def d_ll(c):
        s = c * h
        return (f(dl=s) - 2 * f() + f(dl=-s)) / (s * s)

    def mixed(name):
        def d(c):
            s, t = c * h, c * steps[name]
            return (
                f(dl=s, **{name: t}) - f(dl=s, **{name: -t}) - f(dl=-s, **{name: t}) + f(dl=-s, **{name: -t})
            ) / (4 * s * t)

        return d

    return PartialsBundle(
        omega=f(),
        d_l=rich(d1("dl")),
        d_g=rich(d1("dg")),
        d_L=rich(d1("dL")),
        d_G=rich(d1("dG")),
        d_ll=rich(d_ll),
        d_lL=rich(mixed("dL")),
        d_lG=rich(mixed("dG")),
    )
