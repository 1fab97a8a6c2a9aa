"""Formal expansion of the stable manifold of a hyperbolic resonant point.

With the map recentred on the hyperbolic point ``l = j pi/p`` the stable
manifold is the graph ``lambda = u(l) + v(l) sqrt(mu) + O(mu)`` with

    u(l)^2 = -(2/c1) int_0^l Phi
    v(l)   = -1/(c1 u) int_0^l [c1 u Phi'/2 + (c2 u^2 + Chi) Phi/(c1 u) + Phi^2/(2u) + u Psi]

where ``Phi, Psi, Chi`` are phi, psi, chi shifted by ``j pi/p`` (Chi also
has its value at the fixed point subtracted). In the ``(l, L)`` plane

    L = Lstar + chi(j pi/p) mu/c1 + u(l - j pi/p) sqrt(mu) + v(l - j pi/p) mu.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import AssumptionAError, DomainError
from .quadrature import panel_rule
from .return_map import ResonanceContext, ResonanceFunctions, resonance_functions


@dataclass(frozen=True)
class SeparatrixExpansion:
    """u, v and the shifted resonance functions about hyperbolic index ``j``."""

    ctx: ResonanceContext
    j: int
    funcs: ResonanceFunctions = field(repr=False)

    def __post_init__(self):
        if not self.Phi(0.0, 1) < 0:
            raise DomainError(f"j = {self.j} is not a hyperbolic index (Phi'(0) >= 0)")

    @property
    def shift(self) -> float:
        return self.j * np.pi / self.ctx.p

    @property
    def half_width(self) -> float:
        """Half-length ``3 pi/(2p)`` of the interval where u and v are defined."""
        return 1.5 * np.pi / self.ctx.p

    @property
    def alpha2(self) -> float:
        """``alpha^2 = sqrt(-Phi'(0)/c1)``, the leading stable slope."""
        return float(np.sqrt(-self.Phi(0.0, 1) / self.ctx.c1))

    def Phi(self, l, deriv=0):
        return self.funcs.phi(np.asarray(l) + self.shift, deriv)

    def Psi(self, l, deriv=0):
        return self.funcs.psi(np.asarray(l) + self.shift, deriv)

    def Chi(self, l, deriv=0):
        val = self.funcs.chi(np.asarray(l) + self.shift, deriv)
        return val - self.funcs.chi(self.shift) if deriv == 0 else val

    def U(self, l):
        """``u^2 = -(2/c1) int_0^l Phi``, integrated exactly on the Fourier series."""
        l = np.asarray(l, dtype=float)
        return -(2.0 / self.ctx.c1) * self.funcs.phi_i.integral(np.full(l.shape, self.shift), l + self.shift)

    @property
    def v_slope(self) -> float:
        """``v'(0) = (Chi'(0) - Psi(0))/(2 c1)``."""
        return float((self.Chi(0.0, 1) - self.Psi(0.0)) / (2.0 * self.ctx.c1))


def hyperbolic_index(ctx: ResonanceContext, funcs=None) -> int:
    """0 or 1, whichever of ``phi'(0)``, ``phi'(pi/p)`` is negative."""
    f = funcs or resonance_functions(ctx)
    return 0 if f.phi(0.0, 1) < 0 else 1


def separatrix_expansion(ctx: ResonanceContext, j: int | None = None, funcs=None) -> SeparatrixExpansion:
    f = funcs or resonance_functions(ctx)
    return SeparatrixExpansion(ctx, hyperbolic_index(ctx, f) if j is None else j, f)


def _check_domain(exp, l):
    l = np.asarray(l, dtype=float)
    if np.any(np.abs(l) > exp.half_width * (1 + 1e-12)):
        raise DomainError(f"l outside [-3 pi/2p, 3 pi/2p] = +-{exp.half_width:.6f}")
    return l


def _u(exp, l):
    U = exp.U(l)
    scale = exp.alpha2**2 * exp.half_width**2
    if np.any(U < -1e-12 * scale):
        raise DomainError("u^2 < 0: phi changes sign inside the interval (assumption A fails)")
    return np.sign(l) * np.sqrt(np.maximum(U, 0.0))


def u_of_l(exp: SeparatrixExpansion, l, deriv: int = 0):
    """Signed root u(l) (positive for l > 0), or its derivative with ``deriv=1``."""
    l = _check_domain(exp, l)
    u = _u(exp, l)
    if deriv == 0:
        return u
    if deriv != 1:
        raise ValueError("only deriv 0 and 1 are available")
    zero = l == 0.0
    safe = np.where(zero, 1.0, u)
    du = np.where(zero, exp.alpha2, -exp.Phi(l) / (exp.ctx.c1 * safe))
    return du if du.ndim else float(du)


def _v_integrand(exp, x):
    c1, c2 = exp.ctx.c1, exp.ctx.c2
    u = _u(exp, x)
    Ph = exp.Phi(x)
    return c1 * u * exp.Phi(x, 1) / 2 + (c2 * u * u + exp.Chi(x)) * Ph / (c1 * u) + Ph * Ph / (2 * u) + u * exp.Psi(x)


def v_of_l(exp: SeparatrixExpansion, l, tol: float = 1e-12, max_panels: int = 256):
    """Second term v(l) of the expansion.

    ``int_0^l f = l int_0^1 f(l t) dt`` and ``u(l) = l u~(l)`` with ``u~``
    smooth and positive, so ``v = -int_0^1 f(l t) dt / (c1 u~(l))`` has no
    0/0 at the origin; Gauss-Legendre nodes never touch ``t = 0``.
    """
    l = _check_domain(exp, l)
    flat = np.atleast_1d(l).ravel()
    nz = flat != 0.0
    out = np.zeros(flat.shape)
    if np.any(nz):
        x = flat[nz]
        prev = None
        n = 2
        while True:
            t, w = panel_rule(1.0, n)
            J = _v_integrand(exp, np.multiply.outer(x, t)) @ w
            if prev is not None and np.max(np.abs(J - prev)) <= tol * max(1.0, np.max(np.abs(J))):
                break
            if n >= max_panels:
                raise DomainError(f"v quadrature did not settle to {tol:g}")
            prev, n = J, 2 * n
        ut = _u(exp, x) / x
        out[nz] = -J / (exp.ctx.c1 * ut)
    out = out.reshape(np.shape(l))
    return out if out.ndim else float(out)


def manifold_in_Ll(exp: SeparatrixExpansion, mu: float, l):
    """L on the stable-manifold graph above ``l`` (absolute, not shifted)."""
    if not mu >= 0:
        raise DomainError("mu must be non-negative")
    x = np.asarray(l, dtype=float) - exp.shift
    _check_domain(exp, x)
    s = np.sqrt(mu)
    base = exp.ctx.Lstar + exp.funcs.chi(exp.shift) * mu / exp.ctx.c1
    return base + u_of_l(exp, x) * s + v_of_l(exp, x) * mu


def sample_curves(exp: SeparatrixExpansion, mu: float, n: int = 201, lo: float = 0.0, hi: float | None = None):
    """``(l, u, v, L)`` on a uniform grid of shifted l in ``[lo, hi]``."""
    hi = exp.half_width if hi is None else hi
    x = np.linspace(lo, hi, n)
    u = u_of_l(exp, x)
    v = v_of_l(exp, x)
    L = manifold_in_Ll(exp, mu, x + exp.shift)
    return x + exp.shift, u, v, L


@dataclass(frozen=True)
class HomoclinicEstimate:
    """Predicted homoclinic point ``(l_h, L_h)`` and how it was chosen.

    ``L_h`` is the leading-order value ``Lstar + u(pi/p) sqrt(mu)``;
    ``L_graph`` adds the O(mu) terms of the manifold graph.
    """

    section: float
    j: int
    l_h: float
    L_h: float
    mu: float
    L_graph: float
    ctx: ResonanceContext = field(repr=False)


def choose_section(ctx: ResonanceContext):
    """Section and hyperbolic index by the odd/even case rule.

    p odd: section g = 0; j = -1 if phi'(0) > 0, else j = p - 1.
    p even: g = 0 with j = -1 if phi'(0) > 0, otherwise g = pi with j = -1.
    Returns ``(ctx_on_chosen_section, j)``.
    """
    c0 = replace(ctx, g0=0.0)
    d0 = resonance_functions(c0).phi(0.0, 1)
    if ctx.p % 2:
        return c0, (-1 if d0 > 0 else ctx.p - 1)
    if d0 > 0:
        return c0, -1
    cp = replace(ctx, g0=np.pi)
    if not resonance_functions(cp).phi(0.0, 1) > 0:
        raise AssumptionAError("phi'(0) < 0 on both sections; no case of the rule applies")
    return cp, -1


def homoclinic_point(ctx: ResonanceContext, mu: float, check: bool = True) -> HomoclinicEstimate:
    """Homoclinic point on the symmetry line ``l_h = (j + 1) pi/p`` (0 or pi)."""
    from .thresholds import check_assumption_a

    c, j = choose_section(ctx)
    if check and not check_assumption_a(c).holds:
        raise AssumptionAError(f"assumption A fails for {c}")
    exp = separatrix_expansion(c, j)
    l_h = float(np.mod((j + 1) * np.pi / c.p, 2 * np.pi))
    half = np.pi / c.p
    L_h = c.Lstar + float(u_of_l(exp, half)) * np.sqrt(mu)
    L_graph = float(manifold_in_Ll(exp, mu, exp.shift + half))
    return HomoclinicEstimate(c.g0, j, l_h, L_h, mu, L_graph, c)
