"""Assumption A checks and eccentricity thresholds.

* :func:`check_assumption_a` locates every zero of phi on one period.
* :func:`asymmetric_threshold` finds the eccentricity at which phi'(pi/p)
  changes sign, where the symmetric libration center of an exterior
  resonance splits into an asymmetric pair.
* :func:`boundary_threshold` finds the smallest eccentricity at which the
  truncated fixed-point system still has its 2p resonant solutions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import ConvergenceError, DomainError
from .return_map import ResonanceContext, dphi, resonance_functions

#: Sun-Jupiter mass ratio
MU_JUPITER = 1.0 / 1047.35
TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class AssumptionAReport:
    """Zeros of phi on ``[0, 2 pi/p)`` with ``phi'`` at each.

    ``zeros`` always lists ``0`` and ``pi/p`` first; ``extra_zeros`` holds
    any others.
    """

    ctx: ResonanceContext
    holds: bool
    zeros: list
    extra_zeros: list
    grid: int = 0
    note: str = ""


def _reduced(f, p, l):
    """``phi(l)/sin(p l)``, continued through the forced zeros by l'Hopital."""
    s = np.sin(p * l)
    near = np.abs(s) < 1e-9
    out = np.empty_like(l, dtype=float)
    far = ~near
    out[far] = f.phi(l[far]) / s[far]
    if np.any(near):
        out[near] = f.phi(l[near], 1) / (p * np.cos(p * l[near]))
    return out


def check_assumption_a(ctx: ResonanceContext, n: int = 1024, tol: float = 1e-10, max_grid: int = 1 << 16):
    """Verify that phi vanishes on ``[0, 2 pi/p)`` only at 0 and pi/p, simply.

    phi is odd and ``2 pi/p`` periodic, so 0 and pi/p are always zeros.
    The remaining zeros are those of ``phi(l)/sin(p l)``, which is smooth and
    even about both points; a pitchfork pair straddling pi/p therefore shows
    up as two sign changes even when it is narrower than a grid cell.
    """
    f = resonance_functions(ctx)
    p = ctx.p
    P = TWO_PI / p
    note = ""
    while True:
        x = np.linspace(0.0, P, n + 1)
        h = _reduced(f, p, x)
        sgn = np.sign(h)
        cells = np.nonzero(sgn[:-1] * sgn[1:] <= 0)[0]
        exact = cells[h[cells] == 0.0]
        cells = cells[h[cells] != 0.0]
        crowded = np.any(np.diff(cells) == 1)
        if not crowded or n >= max_grid:
            if crowded:
                note = f"adjacent sign changes persist at grid {n}"
            break
        n *= 2

    def hfun(l):
        return float(_reduced(f, p, np.array([l]))[0])

    extra = [float(x[k]) for k in exact]
    for k in cells:
        extra.append(brentq(hfun, x[k], x[k + 1], xtol=tol))
    extra = sorted({round(r, 12) % P for r in extra})
    extra = [(r, float(f.phi(r, 1))) for r in extra]

    d0, dh = float(f.phi(0.0, 1)), float(f.phi(np.pi / p, 1))
    floor = 10.0 * f.tail * p
    holds = not extra and abs(d0) > floor and abs(dh) > floor
    return AssumptionAReport(ctx, holds, [(0.0, d0), (np.pi / p, dh)], extra, n, note)


def _collision_limit(p, q, mu, delta):
    a = (p / q) ** (2.0 / 3.0) / (1.0 - mu)
    return (1.0 - (1.0 + delta) / a) if p > q else ((1.0 - delta) / a - 1.0)


def asymmetric_threshold(p, q=1, mu=MU_JUPITER, g0=0.0, e_lo=1e-3, e_hi=None, step=1e-3, xtol=1e-7, floor=1e-12):
    """Eccentricity where ``phi'(pi/p)`` changes sign (onset of asymmetric librations).

    phi is sampled with the orbit geometry ``a = L^2/(1 - mu)``. The scan
    runs from ``e_lo`` to ``e_hi`` (default: just inside the collision
    clearance) in steps of ``step``; the first bracket is refined by Brent.
    phi' is O(e^(p-q)), so brackets where both ends are below ``floor`` are
    quadrature noise and skipped.
    """
    if not p > q:
        raise DomainError("asymmetric librations are an exterior-resonance (p > q) effect")
    delta = ResonanceContext.__dataclass_fields__["delta"].default
    if e_hi is None:
        e_hi = _collision_limit(p, q, mu, delta) - 1e-9
    grid = np.arange(e_lo, e_hi, step)

    def F(e):
        ctx = ResonanceContext(p, q, float(e), g0, mu_geom=mu)
        return dphi(ctx, np.pi / p)

    prev = F(grid[0])
    for a, b in zip(grid[:-1], grid[1:]):
        cur = F(b)
        if np.sign(cur) != np.sign(prev) and max(abs(cur), abs(prev)) > floor:
            return float(brentq(F, a, b, xtol=xtol))
        prev = cur
    raise ConvergenceError(f"phi'(pi/p) keeps its sign on [{e_lo}, {e_hi:.4f}] for p={p}, q={q}", None)


@dataclass(frozen=True)
class BoundaryThreshold:
    """Result of :func:`boundary_threshold`.

    ``e_min`` comes from the truncated system; ``oracle`` from continuation
    of the numerically integrated map (``None`` if not requested).
    ``flagged`` is set when the two differ by more than ``band``.
    """

    p: int
    q: int
    mu: float
    e_min: float
    criterion: str
    oracle: float | None = None
    band: float = 0.02
    scan: list = field(default_factory=list, repr=False)

    @property
    def flagged(self) -> bool:
        return self.oracle is not None and abs(self.oracle - self.e_min) > self.band


def truncated_residual(ctx: ResonanceContext, mu: float, l, funcs=None):
    """``phi(l) + mu chi(l) psi(l)/c1``: the fixed-point condition after eliminating lambda."""
    f = funcs or resonance_functions(ctx)
    return f.phi(l) + mu * f.chi(l) * f.psi(l) / ctx.c1


def resonant_roots(ctx: ResonanceContext, mu: float, n: int = 4096, tol: float = 1e-12):
    """All zeros of :func:`truncated_residual` on ``[0, 2 pi)``."""
    f = resonance_functions(ctx)
    # offset the grid so no node sits on a symmetry point
    x = (np.arange(n + 1) + 0.5) * TWO_PI / n
    g = truncated_residual(ctx, mu, x, f)
    idx = np.nonzero(np.sign(g[:-1]) != np.sign(g[1:]))[0]
    roots = [brentq(lambda l: float(truncated_residual(ctx, mu, l, f)), x[k], x[k + 1], xtol=tol) for k in idx]
    return np.sort(np.mod(roots, TWO_PI))


def has_resonant_structure(roots, p):
    """True if there is exactly one root within ``pi/(2p)`` of each ``j pi/p``."""
    if len(roots) != 2 * p:
        return False
    w = np.pi / p
    j = np.round(np.asarray(roots) / w).astype(int) % (2 * p)
    return np.array_equal(np.sort(j), np.arange(2 * p))


def boundary_threshold(p, q, mu=1e-3, g0=0.0, e_lo=0.005, e_hi=None, step=5e-3, etol=1e-4, oracle=False):
    """Smallest e at which the truncated fixed-point system keeps its 2p solutions.

    The fixed points of the truncated map satisfy ``lambda = chi sqrt(mu)/c1``
    and ``phi + mu chi psi/c1 = 0``. Starting from the largest e on the scan
    grid where that equation has exactly one simple root near each
    ``j pi/p``, e is decreased until a root pair is created or destroyed (a
    tangency); the crossing is then refined by bisection to ``etol``.

    With ``oracle=True`` the same continuation is repeated on the
    numerically integrated p-th return map.
    """
    delta = ResonanceContext.__dataclass_fields__["delta"].default
    if e_hi is None:
        e_hi = min(0.5, _collision_limit(p, q, mu, delta) - 1e-9)
    grid = np.arange(e_lo, e_hi, step)[::-1]

    def ok(e):
        ctx = ResonanceContext(p, q, float(e), g0, mu_geom=mu)
        return has_resonant_structure(resonant_roots(ctx, mu), p)

    e_min = _continue_down(grid, ok, etol)
    result = BoundaryThreshold(p, q, mu, e_min, "truncated fixed-point system")
    if oracle:
        from .dynamics import numeric_boundary_threshold

        e_num = numeric_boundary_threshold(p, q, mu, g0=g0, e_lo=e_lo, e_hi=e_hi)
        result = BoundaryThreshold(p, q, mu, e_min, result.criterion, e_num)
    return result


def _continue_down(grid, ok, etol):
    """Walk a decreasing grid; return the lower end of the first valid run."""
    started = False
    last = None
    for e in grid:
        good = ok(e)
        if good:
            started, last = True, e
        elif started:
            lo, hi = e, last
            while hi - lo > etol:
                mid = 0.5 * (lo + hi)
                if ok(mid):
                    hi = mid
                else:
                    lo = mid
            return float(hi)
    if not started:
        raise ConvergenceError("no eccentricity in the scan has the resonant fixed-point structure", None)
    return float(last)
