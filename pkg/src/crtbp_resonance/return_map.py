"""Scaled p-th return map near a p:q resonance.

Along the unperturbed line ``l = l0 + t/L0^3, g = g0 - t`` (``0 <= t <= 2*pi*p``)
the first-order return map needs integrals of the partials of omega. At the
exact resonance ``L0 = (p/q)^(1/3)`` these give the resonance functions

* ``phi(l0)  = int Omega_l``
* ``psi(l0)  = int Omega_lL + (q/p) int Omega_lG - 3 (q/p)^(4/3) int t Omega_ll``
* ``chi(l0)  = -int Omega_L - (q/p) int Omega_G - 3 (q/p)^(4/3) int int Omega_l``

and, with ``L = (p/q)^(1/3) + lambda sqrt(mu)``, the map

    l1      = l0 - c1 lambda sqrt(mu) + (c2 lambda^2 + chi(l0)) mu
    lambda1 = lambda + phi(l0) sqrt(mu) + lambda psi(l0) mu.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache
from math import gcd

import numpy as np

from .errors import AssumptionAError, ConvergenceError, DomainError
from .perturbation import COLLISION_CLEARANCE, omega_partials
from .quadrature import TrigInterpolant, converged_panels, panel_rule

TWO_PI = 2.0 * np.pi
QUAD_TOL = 1e-11
MU0 = 1e-3
C_LAMBDA = 10.0


@dataclass(frozen=True)
class ResonanceContext:
    """Validated resonance parameters.

    ``h_convention`` selects how the section energy is built: ``"sqrt"`` uses
    ``G* = L* sqrt(1 - e^2)`` (consistent with the Delaunay definition of e),
    ``"linear"`` uses ``L* (1 - e^2)`` as written in the energy range formula.

    ``mu_geom`` is the mass ratio used in ``a = L^2/(1 - mu)`` when omega is
    sampled for the resonance integrals. Zero gives the formal ``mu -> 0``
    functions; the physical value shifts them by O(mu).
    """

    p: int
    q: int
    e: float
    g0: float = 0.0
    delta: float = COLLISION_CLEARANCE
    h_convention: str = "sqrt"
    mu_geom: float = 0.0

    def __post_init__(self):
        p, q = self.p, self.q
        if p < 1 or q < 1 or gcd(p, q) != 1:
            raise DomainError(f"p and q must be relatively prime positive integers, got {p}, {q}")
        if p == q:
            raise DomainError("p/q = 1 is excluded")
        if not 0 < self.e < 1:
            raise DomainError("eccentricity must lie in (0, 1)")
        if not (np.isclose(self.g0, 0.0) or np.isclose(self.g0, np.pi)):
            raise DomainError("section angle must be 0 or pi")
        object.__setattr__(self, "g0", 0.0 if np.isclose(self.g0, 0.0) else float(np.pi))
        if self.h_convention not in ("sqrt", "linear"):
            raise DomainError("h_convention must be 'sqrt' or 'linear'")
        if not 0 <= self.mu_geom < 0.5:
            raise DomainError("mu_geom must lie in [0, 0.5)")
        a = self.Lstar**2 / (1.0 - self.mu_geom)
        if p > q and not a * (1 - self.e) > 1 + self.delta:
            raise DomainError(f"perihelion {a * (1 - self.e):.4f} too close to the second primary")
        if p < q and not a * (1 + self.e) < 1 - self.delta:
            raise DomainError(f"aphelion {a * (1 + self.e):.4f} too close to the second primary")

    @property
    def Lstar(self) -> float:
        return (self.p / self.q) ** (1.0 / 3.0)

    @property
    def Gstar(self) -> float:
        return self.Lstar * np.sqrt(1.0 - self.e**2)

    @property
    def H(self) -> float:
        if self.h_convention == "sqrt":
            G = self.Gstar
        else:
            G = self.Lstar * (1.0 - self.e**2)
        return -0.5 * (self.p / self.q) ** (-2.0 / 3.0) - G

    @property
    def c1(self) -> float:
        return 6.0 * np.pi * self.q ** (4.0 / 3.0) * self.p ** (-1.0 / 3.0)

    @property
    def c2(self) -> float:
        return 12.0 * np.pi * self.q ** (5.0 / 3.0) * self.p ** (-2.0 / 3.0)

    @property
    def period(self) -> float:
        return TWO_PI * self.p

    def with_e(self, e: float) -> "ResonanceContext":
        return replace(self, e=e)


def _start_panels(ctx):
    return 4 * (ctx.p + ctx.q)


@lru_cache(maxsize=256)
def _panel_count(ctx: ResonanceContext, tol: float = QUAD_TOL) -> int:
    """Panel count for which the resonance integrals are converged to ``tol``."""
    probe = np.linspace(0.0, TWO_PI, 7, endpoint=False) + 0.1

    def ev(t, w):
        vals = line_integrals(probe, ctx.Lstar, ctx.Gstar, ctx.g0, ctx.p, rule=(t, w), mu=ctx.mu_geom)
        return np.concatenate([vals[k] for k in ("l", "L", "G", "lL", "lG", "tll", "dbl")])

    n, _, _ = converged_panels(ev, ctx.period, _start_panels(ctx), tol)
    return n


def line_integrals(l0, L0, G0, g0, p, rule=None, n_panels=None, want=None, mu=0.0):
    """Integrals of omega partials along ``l = l0 + t/L0^3``, ``g = g0 - t``.

    Returns a dict with keys ``l, L, G, ll, lL, lG`` (plain integrals of the
    corresponding partials), ``tll`` (``int t Omega_ll``) and ``dbl``
    (``int_0^T int_0^tau Omega_l dt dtau = int (T - t) Omega_l dt``), each
    an array over ``l0``.
    """
    T = TWO_PI * p
    if rule is None:
        rule = panel_rule(T, n_panels or 64)
    t, w = rule
    l0 = np.atleast_1d(np.asarray(l0, dtype=float))
    L0 = np.broadcast_to(np.asarray(L0, dtype=float), l0.shape)[:, None]
    G0 = np.broadcast_to(np.asarray(G0, dtype=float), l0.shape)[:, None]
    ll = l0[:, None] + t[None, :] / L0**3
    gg = g0 - t[None, :]
    b = omega_partials(L0, ll, G0, gg, mu)
    out = {
        "l": b.d_l @ w,
        "L": b.d_L @ w,
        "G": b.d_G @ w,
        "ll": b.d_ll @ w,
        "lL": b.d_lL @ w,
        "lG": b.d_lG @ w,
        "tll": b.d_ll @ (t * w),
        "dbl": b.d_l @ ((T - t) * w),
    }
    if want is not None:
        out = {k: out[k] for k in want}
    return out


def _combine(ctx, I):
    ratio = ctx.q / ctx.p
    K = 3.0 * ratio ** (4.0 / 3.0)
    phi = I["l"]
    psi = I["lL"] + ratio * I["lG"] - K * I["tll"]
    chi = -I["L"] - ratio * I["G"] - K * I["dbl"]
    return phi, psi, chi


def _direct(ctx, l0):
    I = line_integrals(l0, ctx.Lstar, ctx.Gstar, ctx.g0, ctx.p, n_panels=_panel_count(ctx), mu=ctx.mu_geom)
    return _combine(ctx, I), I


def phi(ctx: ResonanceContext, l0):
    """Resonance function phi by direct quadrature."""
    (val, _, _), _ = _direct(ctx, l0)
    return val if np.ndim(l0) else float(val[0])


def dphi(ctx: ResonanceContext, l0):
    """Derivative of phi, the integral of Omega_ll."""
    _, I = _direct(ctx, l0)
    return I["ll"] if np.ndim(l0) else float(I["ll"][0])


def psi_chi(ctx: ResonanceContext, l0):
    """``(psi, chi)`` by direct quadrature."""
    (_, ps, ch), _ = _direct(ctx, l0)
    if np.ndim(l0):
        return ps, ch
    return float(ps[0]), float(ch[0])


@dataclass(frozen=True)
class ResonanceFunctions:
    """Interpolated phi, psi, chi for one context."""

    ctx: ResonanceContext
    phi_i: TrigInterpolant = field(repr=False)
    psi_i: TrigInterpolant = field(repr=False)
    chi_i: TrigInterpolant = field(repr=False)

    @property
    def c1(self):
        return self.ctx.c1

    @property
    def c2(self):
        return self.ctx.c2

    def phi(self, l, deriv=0):
        return self.phi_i(l, deriv)

    def psi(self, l, deriv=0):
        return self.psi_i(l, deriv)

    def chi(self, l, deriv=0):
        return self.chi_i(l, deriv)

    @property
    def tail(self) -> float:
        return max(self.phi_i.tail, self.psi_i.tail, self.chi_i.tail)


@lru_cache(maxsize=64)
def resonance_functions(ctx: ResonanceContext, n: int = 256) -> ResonanceFunctions:
    """Sample phi, psi, chi on ``n`` uniform nodes and build interpolants."""
    grid = TWO_PI * np.arange(n) / n
    ph, ps, ch = _direct(ctx, grid)[0]
    return ResonanceFunctions(ctx, TrigInterpolant(ph), TrigInterpolant(ps), TrigInterpolant(ch))


def apply_scaled_map(ctx: ResonanceContext, mu: float, point, funcs: ResonanceFunctions | None = None):
    """Truncated scaled map ``(l0, lambda0) -> (l1, lambda1)``; l is not wrapped."""
    if not 0 <= mu:
        raise DomainError("mu must be non-negative")
    f = funcs or resonance_functions(ctx)
    l0, lam0 = (np.asarray(v, dtype=float) for v in point)
    s = np.sqrt(mu)
    l1 = l0 - ctx.c1 * lam0 * s + (ctx.c2 * lam0**2 + f.chi(l0)) * mu
    lam1 = lam0 + f.phi(l0) * s + lam0 * f.psi(l0) * mu
    return l1, lam1


def scaled_map_jacobian(ctx, mu, l, lam, funcs=None):
    f = funcs or resonance_functions(ctx)
    s = np.sqrt(mu)
    return np.array(
        [
            [1.0 + f.chi(l, 1) * mu, -ctx.c1 * s + 2.0 * ctx.c2 * lam * mu],
            [f.phi(l, 1) * s + lam * f.psi(l, 1) * mu, 1.0 + f.psi(l) * mu],
        ]
    )


@dataclass(frozen=True)
class FixedPoint:
    j: int
    l: float
    lam: float
    kind: str
    multipliers: tuple
    slopes: tuple

    def L(self, ctx: ResonanceContext, mu: float) -> float:
        return ctx.Lstar + self.lam * np.sqrt(mu)


def _newton_fixed_point(ctx, mu, f, l, lam, tol=1e-13, maxiter=50):
    s = np.sqrt(mu)
    c1, c2 = ctx.c1, ctx.c2
    for _ in range(maxiter):
        r1 = -c1 * lam + (c2 * lam**2 + f.chi(l)) * s
        r2 = f.phi(l) + lam * f.psi(l) * s
        J = np.array(
            [
                [f.chi(l, 1) * s, -c1 + 2.0 * c2 * lam * s],
                [f.phi(l, 1) + lam * f.psi(l, 1) * s, f.psi(l) * s],
            ]
        )
        dl, dlam = np.linalg.solve(J, [r1, r2])
        l, lam = l - dl, lam - dlam
        if abs(dl) < tol and abs(dlam) < tol:
            return float(l), float(lam)
    raise ConvergenceError("fixed-point Newton iteration did not converge", max(abs(dl), abs(dlam)))


def find_fixed_points(ctx: ResonanceContext, mu: float, funcs=None, check=True, mu0=MU0):
    """The 2p fixed points of the truncated map seeded at ``(j pi/p, chi sqrt(mu)/c1)``."""
    if not 0 < mu <= mu0:
        raise DomainError(f"mu must lie in (0, {mu0}]")
    if check:
        from .thresholds import check_assumption_a

        rep = check_assumption_a(ctx)
        if not rep.holds:
            raise AssumptionAError(f"assumption A fails for {ctx}: extra zeros {rep.extra_zeros}")
    f = funcs or resonance_functions(ctx)
    out = []
    for j in range(2 * ctx.p):
        l_seed = j * np.pi / ctx.p
        lam_seed = f.chi(l_seed) * np.sqrt(mu) / ctx.c1
        try:
            l, lam = _newton_fixed_point(ctx, mu, f, l_seed, lam_seed)
        except (ConvergenceError, np.linalg.LinAlgError) as exc:
            raise AssumptionAError(f"no fixed point near j={j}: {exc}") from exc
        kind = "hyperbolic" if f.phi(l_seed, 1) < 0 else "elliptic"
        fp = FixedPoint(j, l, lam, kind, (), ())
        mult, slopes = eigen_data(ctx, mu, fp, funcs=f)
        out.append(FixedPoint(j, l, lam, kind, mult, slopes))
    return out


def eigen_data(ctx: ResonanceContext, mu: float, fp: FixedPoint, funcs=None):
    """Multipliers and eigen-slopes ``dlambda/dl`` of the truncated map at ``fp``.

    Hyperbolic points return ``(stable, unstable)`` ordering for both.
    Elliptic points return the complex pair and, in place of slopes, the
    rotation angle and the ellipse aspect ratio of the linearisation.
    """
    J = scaled_map_jacobian(ctx, mu, fp.l, fp.lam, funcs)
    w, V = np.linalg.eig(J)
    if fp.kind == "hyperbolic" and np.all(np.isreal(w)):
        w, V = w.real, V.real
        order = np.argsort(np.abs(w))
        w, V = w[order], V[:, order]
        slopes = tuple(float(V[1, i] / V[0, i]) for i in range(2))
        return (float(w[0]), float(w[1])), slopes
    angle = float(abs(np.angle(w[0])))
    aspect = float(np.sqrt(abs(J[0, 1] / J[1, 0]))) if J[1, 0] != 0 else np.inf
    return (complex(w[0]), complex(w[1])), (angle, aspect)
