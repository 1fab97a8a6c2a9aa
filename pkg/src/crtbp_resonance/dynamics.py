"""Direct integration of the unaveraged problem: numeric return maps and manifolds.

Two integrators are available.

``"delaunay"`` (default)
    Fixed-step 8th-order Runge-Kutta in Delaunay variables with the
    perihelion argument as independent variable (see ``_flow``). Sections are
    hit exactly and the truncation error is proportional to mu, which keeps
    O(mu^2) remainders at mu = 1e-6 resolvable.
``"cartesian"``
    scipy's adaptive DOP853 on the rotating-frame Cartesian equations, with
    the section located by event detection on the osculating perihelion
    argument. Used as an independent cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np
from scipy.integrate import solve_ivp

from . import _flow
from .errors import CollisionError, ConvergenceError, DomainError
from .kepler import cartesian_arrays, delaunay_arrays, hamiltonian_cartesian
from .return_map import MU0, ResonanceContext, apply_scaled_map, find_fixed_points, line_integrals, resonance_functions

TWO_PI = 2.0 * np.pi
STEP_TOL = 1e-13


@dataclass(frozen=True)
class SectionPoint:
    """Point ``(l, L)`` on the section ``g = g0`` at energy ``H``.

    ``l`` is not wrapped so that the advance ``2 pi q`` of a p-fold return
    stays visible. ``G`` is recovered from the energy.
    """

    l: float
    L: float
    H: float
    g0: float
    mu: float
    G: float = field(default=None)

    def __post_init__(self):
        if self.G is None:
            G = float(_solve_G(self.l, self.L, self.g0, self.H, self.mu))
            object.__setattr__(self, "G", G)
        if not 0 < self.G <= self.L:
            raise DomainError(f"G = {self.G} is not in (0, L]")


@dataclass(frozen=True)
class Trajectory:
    """Cartesian samples of one integration with the energy error along it."""

    t: np.ndarray
    states: np.ndarray
    energy_drift: float


def _solve_G(l, L, g, H, mu, tol=1e-14, maxiter=50):
    l, L = np.broadcast_arrays(np.asarray(l, dtype=float), np.asarray(L, dtype=float))
    out = np.empty(l.shape)
    for i in np.ndindex(l.shape):
        G0 = -H - 1.0 / (2.0 * L[i] ** 2)
        if mu == 0.0:
            out[i] = G0
            continue
        if not 0 < G0 < L[i]:
            raise DomainError(f"(H, L) = ({H}, {L[i]}) lies outside the elliptic window")
        try:
            G, res, _ = _flow.solve_G(l[i], L[i], g, H, mu, G0, tol, maxiter)
        except ZeroDivisionError:
            raise DomainError(f"energy surface reaches e = 0 at l={l[i]}, L={L[i]}") from None
        if not abs(res) <= 1e-12 or not 0 < G < L[i]:
            raise ConvergenceError(f"energy equation for G not solved at l={l[i]}, L={L[i]}", abs(res))
        out[i] = G
    return out if out.ndim else float(out)


def solve_G_from_H(ctx: ResonanceContext, mu: float, l, L, g=None):
    """Angular momentum G on the energy surface ``ctx.H``.

    Newton on the Delaunay energy with ``a = L^2/(1 - mu)``; with mu = 0 the
    energy is linear in G and the result is exact.
    """
    if not 0 <= mu <= MU0:
        raise DomainError(f"mu must lie in [0, {MU0}]")
    return _solve_G(l, L, ctx.g0 if g is None else g, ctx.H, mu)


@lru_cache(maxsize=128)
def steps_per_return(ctx: ResonanceContext, mu: float, tol: float = STEP_TOL) -> int:
    """Runge-Kutta steps per section return, doubled until one p-fold return converges."""
    probe = np.linspace(0.0, TWO_PI, 5, endpoint=False) + 0.3
    L = np.full(probe.shape, ctx.Lstar)
    G = _solve_G(probe, L, ctx.g0, ctx.H, mu)
    base = np.column_stack([probe, L, G, np.zeros_like(probe)])

    def run(n):
        Y = base.copy()
        try:
            _flow.propagate(Y, ctx.g0, mu, TWO_PI * ctx.p, n * ctx.p, _flow.RK_A, _flow.RK_B, _flow.RK_C)
        except ZeroDivisionError:
            raise DomainError("trajectory reaches e = 0, where Delaunay variables are singular") from None
        return Y[:, :3]

    n = 16
    prev = run(n)
    last = np.inf
    while n < 4096:
        cur = run(2 * n)
        diff = float(np.max(np.abs(cur - prev)))
        if diff <= tol:
            return n
        # truncation error has fallen below accumulated roundoff in the unwrapped l
        if diff > 0.25 * last and diff <= 1e3 * tol:
            return n // 2
        n, prev, last = 2 * n, cur, diff
    raise ConvergenceError("section-to-section integration did not converge", diff)


class NumericMap:
    """Numeric first-return map of the section ``g = ctx.g0`` at energy ``ctx.H``.

    Works on arrays of states ``(l, L, G)``; G is carried along by the flow
    rather than re-solved, so energy conservation is a diagnostic.
    """

    def __init__(self, ctx: ResonanceContext, mu: float, nsteps: int | None = None):
        if not 0 <= mu <= MU0:
            raise DomainError(f"mu must lie in [0, {MU0}]")
        self.ctx, self.mu = ctx, mu
        self.nsteps = nsteps or steps_per_return(ctx, mu)

    def states(self, l, L):
        l, L = np.broadcast_arrays(np.asarray(l, dtype=float), np.asarray(L, dtype=float))
        G = _solve_G(l, L, self.ctx.g0, self.ctx.H, self.mu)
        return np.stack([l, L, np.atleast_1d(G).reshape(l.shape)], axis=-1)

    def advance(self, S, returns=1, inverse=False):
        """Apply ``T_1`` (or its inverse) ``returns`` times to the rows of ``S``."""
        S = np.atleast_2d(np.asarray(S, dtype=float))
        Y = np.column_stack([S[:, :3], np.zeros(len(S))])
        if inverse:
            # T^-1 = R T R with R(l, L, G) = (-l, L, G)
            Y[:, 0] *= -1.0
        try:
            _flow.propagate(Y, self.ctx.g0, self.mu, TWO_PI * returns, self.nsteps * returns, _flow.RK_A, _flow.RK_B, _flow.RK_C)
        except ZeroDivisionError:
            raise DomainError("trajectory reaches e = 0, where Delaunay variables are singular") from None
        if inverse:
            Y[:, 0] *= -1.0
        return Y[:, :3]

    def __call__(self, l, L, returns=None, inverse=False):
        """``T_p`` by default; returns ``(l, L)`` with l unwrapped."""
        shape = np.broadcast(np.asarray(l), np.asarray(L)).shape
        S = self.states(l, L).reshape(-1, 3)
        out = self.advance(S, self.ctx.p if returns is None else returns, inverse)
        return out[:, 0].reshape(shape), out[:, 1].reshape(shape)

    def energy(self, S):
        S = np.atleast_2d(S)
        return np.array([_flow.energy(s[0], s[1], s[2], self.ctx.g0, self.mu) for s in S])


def _section_event(g0):
    def event(t, y, *args):
        # g starts on the section and decreases, so sin(g - g0) < 0 for about
        # half a revolution; masking the start stops a roundoff root at t = 0
        if t < 0.5:
            return -1.0
        x, yy, px, py = y
        r = np.hypot(x, yy)
        m = event.m
        ecosE = 1.0 - r * (2.0 / r - (px * px + py * py) / m)
        a = 1.0 / (2.0 / r - (px * px + py * py) / m)
        esinE = (x * px + yy * py) / np.sqrt(m * a)
        e = np.hypot(ecosE, esinE)
        E = np.arctan2(esinE, ecosE)
        nu = 2.0 * np.arctan2(np.sqrt(1.0 + e) * np.sin(E / 2), np.sqrt(1.0 - e) * np.cos(E / 2))
        return np.sin(np.arctan2(yy, x) - nu - g0)

    event.direction = -1.0
    return event


def _cartesian_rhs(t, y, mu):
    x, yy, px, py = y
    r1 = np.hypot(x, yy)
    r2 = np.hypot(x - 1.0, yy)
    if r2 < 1e-6 or r1 < 1e-6:
        raise CollisionError(f"trajectory within 1e-6 of a primary at t={t:.6g}")
    m = 1.0 - mu
    i1, i2 = r1**-3, r2**-3
    return [
        px + yy,
        py - x,
        py - m * x * i1 - mu * (x - 1.0) * i2 - mu,
        -px - m * yy * i1 - mu * yy * i2,
    ]


def cartesian_return(ctx: ResonanceContext, mu: float, state, returns=1, rtol=1e-12, atol=1e-13, dense=False):
    """``T_1^returns`` of one state ``(l, L, G)`` by Cartesian integration.

    Returns ``(l, L, G)`` (l unwrapped) and the :class:`Trajectory`.
    """
    l0, L0, G0 = (float(v) for v in state)
    y0 = np.array(cartesian_arrays(L0, l0, G0, ctx.g0, mu))
    ev = _section_event(ctx.g0)
    ev.m = 1.0 - mu
    ev.terminal = returns
    t_max = TWO_PI * returns * 1.2 + 1.0
    sol = solve_ivp(
        _cartesian_rhs, (0.0, t_max), y0, method="DOP853", rtol=rtol, atol=atol,
        events=ev, args=(mu,), dense_output=dense,
    )
    te, ye = sol.t_events[0], sol.y_events[0]
    if len(te) < returns:
        raise ConvergenceError(f"only {len(te)} section crossings found", None)
    yf = ye[returns - 1]
    L, l, G, g = delaunay_arrays(*yf, mu)
    advance = l0 + returns * TWO_PI * (1.0 - mu) ** 2 / L0**3
    l = l + TWO_PI * np.round((advance - l) / TWO_PI)
    H = hamiltonian_cartesian(*sol.y, mu)
    traj = Trajectory(sol.t, sol.y.T, float(np.max(np.abs(H - H[0]))))
    return np.array([l, L, G]), traj


def numeric_return_map(ctx: ResonanceContext, mu: float, point, iterates: int = 1, method: str = "delaunay"):
    """Apply ``T_1`` ``iterates`` times to ``(l0, L0)`` on the section of ``ctx``."""
    l0, L0 = (float(v) for v in point)
    sp = SectionPoint(l0, L0, ctx.H, ctx.g0, mu)
    S = np.array([sp.l, sp.L, sp.G])
    if method == "delaunay":
        out = NumericMap(ctx, mu).advance(S, iterates)[0]
    elif method == "cartesian":
        out, _ = cartesian_return(ctx, mu, S, iterates)
    else:
        raise ValueError(f"unknown method {method!r}")
    return SectionPoint(float(out[0]), float(out[1]), ctx.H, ctx.g0, mu, float(out[2]))


# ---------------------------------------------------------------- error orders


def first_order_map(ctx: ResonanceContext, mu: float, l0, L0, G0):
    """The O(mu) truncation of ``T_p`` along the unperturbed line from ``(l0, L0, G0)``."""
    I = line_integrals(l0, L0, G0, ctx.g0, ctx.p, n_panels=256, want=("l", "L", "G", "dbl"))
    T = ctx.period
    l1 = l0 + T / L0**3 + mu * (-I["G"] / L0**3 - I["L"] - 3.0 / L0**4 * I["dbl"])
    L1 = L0 + mu * I["l"]
    return l1, L1


@dataclass(frozen=True)
class ErrorScan:
    mu: np.ndarray
    errors: np.ndarray
    exponent: float
    expected: tuple

    @property
    def ok(self) -> bool:
        return self.expected[0] <= self.exponent <= self.expected[1]


def _fit_exponent(mu, err):
    return float(np.polyfit(np.log(mu), np.log(err), 1)[0])


def perturbative_error_scan(ctx: ResonanceContext, point=(0.5, None), mu_list=(1e-4, 1e-5, 1e-6), scaled=False):
    """Remainder of the O(mu) map (``scaled=False``) or the scaled map against numeric ``T_p``.

    For the first-order map ``point`` is ``(l0, L0)`` (``L0`` defaults to
    the resonant value) and the max-norm remainder should scale like mu^2.
    For the scaled map ``point`` is ``(l0, lambda0)`` with
    ``L0 = Lstar + lambda0 sqrt(mu)`` and the residual scales like mu^1.5.
    """
    l0, second = point
    errs = []
    for mu in mu_list:
        nm = NumericMap(ctx, mu)
        if scaled:
            lam0 = 0.0 if second is None else second
            L0 = ctx.Lstar + lam0 * np.sqrt(mu)
        else:
            L0 = ctx.Lstar if second is None else second
        S = nm.states(l0, L0)
        l1n, L1n, _ = nm.advance(S, ctx.p)[0]
        if scaled:
            l1, lam1 = apply_scaled_map(ctx, mu, (l0, lam0))
            err = max(abs(l1n - TWO_PI * ctx.q - l1), abs((L1n - ctx.Lstar) / np.sqrt(mu) - lam1))
        else:
            l1, L1 = first_order_map(ctx, mu, l0, L0, S[2])
            err = max(abs(l1n - l1[0]), abs(L1n - L1[0]))
        errs.append(err)
    mu = np.asarray(mu_list, dtype=float)
    errs = np.asarray(errs)
    expected = (1.3, 1.7) if scaled else (1.8, 2.2)
    return ErrorScan(mu, errs, _fit_exponent(mu, errs), expected)


# ---------------------------------------------------------------- fixed points


@dataclass(frozen=True)
class NumericFixedPoint:
    """Fixed point of numeric ``T_p`` (``l`` advances by ``2 pi q``)."""

    l: float
    L: float
    G: float
    jacobian: np.ndarray = field(repr=False)
    multipliers: np.ndarray = field(repr=False)
    vectors: np.ndarray = field(repr=False)

    @property
    def hyperbolic(self) -> bool:
        return bool(np.all(np.isreal(self.multipliers)) and np.max(np.abs(self.multipliers)) > 1.0)


def _residual(nm, l, L):
    l1, L1 = nm(l, L)
    return np.array([l1 - l - TWO_PI * nm.ctx.q, L1 - L])


def _fd_jacobian(nm, l, L, h=1e-6):
    hl, hL = h, h * np.sqrt(max(nm.mu, 1e-12))
    ls = np.array([l + hl, l - hl, l, l])
    Ls = np.array([L, L, L + hL, L - hL])
    l1, L1 = nm(ls, Ls)
    J = np.empty((2, 2))
    J[0, 0] = (l1[0] - l1[1]) / (2 * hl)
    J[1, 0] = (L1[0] - L1[1]) / (2 * hl)
    J[0, 1] = (l1[2] - l1[3]) / (2 * hL)
    J[1, 1] = (L1[2] - L1[3]) / (2 * hL)
    return J


def numeric_fixed_point(ctx: ResonanceContext, mu: float, seed, nmap: NumericMap | None = None, ulps=16, maxiter=30):
    """Newton on ``T_p(l, L) - (l + 2 pi q, L)`` from ``seed = (l, L)``.

    Converged when the residual is within ``ulps`` units of roundoff of the
    unwrapped image. ``dT_p - I`` is O(sqrt(mu)), so the location itself is
    only good to about that roundoff over sqrt(mu). The Jacobian comes from
    central differences; the returned ``jacobian`` is ``dT_p`` at the point.
    """
    nm = nmap or NumericMap(ctx, mu)
    l, L = (float(v) for v in seed)
    floor = ulps * np.spacing(abs(l) + TWO_PI * ctx.q + 1.0)
    for _ in range(maxiter):
        F = _residual(nm, l, L)
        if np.max(np.abs(F)) <= floor:
            break
        J = _fd_jacobian(nm, l, L)
        dl, dL = np.linalg.solve(J - np.eye(2), F)
        l, L = l - dl, L - dL
    else:
        raise ConvergenceError("numeric fixed point did not converge", float(np.max(np.abs(F))))
    J = _fd_jacobian(nm, l, L)
    w, V = np.linalg.eig(J)
    if np.all(np.isreal(w)):
        w, V = w.real, V.real
        order = np.argsort(np.abs(w))
        w, V = w[order], V[:, order]
    G = float(_solve_G(l, L, ctx.g0, ctx.H, mu))
    return NumericFixedPoint(l, L, G, J, w, V)


def fixed_point_from_truncated(ctx, mu, fp, nmap=None):
    """Refine a truncated-map :class:`~.return_map.FixedPoint` on the numeric map."""
    return numeric_fixed_point(ctx, mu, (fp.l, ctx.Lstar + fp.lam * np.sqrt(mu)), nmap)


# ---------------------------------------------------------------- manifolds


@dataclass(frozen=True)
class ManifoldArc:
    """Stable or unstable branch of a hyperbolic fixed point, ordered away from it."""

    l: np.ndarray
    L: np.ndarray
    fixed_point: NumericFixedPoint
    direction: str
    iterations: int
    fold_at: float | None = None


def grow_manifold(
    ctx: ResonanceContext,
    mu: float,
    fp,
    direction: str = "stable",
    extent: float = np.pi,
    branch: int = 1,
    n_seed: int = 32,
    distance: float | None = None,
    max_iter: int = 200000,
    nmap: NumericMap | None = None,
    fold_tol: float = 1e-3,
):
    """Grow one branch of a manifold of a hyperbolic fixed point of ``T_p``.

    ``fp`` is a :class:`NumericFixedPoint` or a truncated-map fixed point
    (refined first). ``n_seed`` points fill one fundamental domain of the
    linearised map on the eigenline, at distances ``distance`` to
    ``distance * |multiplier|`` from the fixed point on the side ``branch``
    (``+1`` towards increasing l). Forward iterates of ``T_p`` (unstable) or
    of ``T_p^-1`` (stable) then sweep the branch out; iteration stops when l
    has moved ``extent`` from the fixed point, so the last image straddles
    it. The union of the images of the fundamental domain, in iteration
    order, is the arc; ``fold_at`` is the first l where it stops being a
    graph over l.
    """
    if direction not in ("stable", "unstable"):
        raise ValueError("direction must be 'stable' or 'unstable'")
    nm = nmap or NumericMap(ctx, mu)
    if not isinstance(fp, NumericFixedPoint):
        fp = fixed_point_from_truncated(ctx, mu, fp, nm)
    if not fp.hyperbolic:
        raise DomainError("manifolds need a hyperbolic fixed point")
    k = 0 if direction == "stable" else 1
    # growth factor per step along the branch
    grow = abs(fp.multipliers[1]) if k else 1.0 / abs(fp.multipliers[0])
    v = fp.vectors[:, k] / np.hypot(*fp.vectors[:, k])
    if np.sign(v[0]) != np.sign(branch):
        v = -v
    d = 1e-6 * np.sqrt(mu) if distance is None else distance
    s = d * grow ** (np.arange(n_seed) / n_seed)
    shift = TWO_PI * ctx.q * (1 if direction == "unstable" else -1)
    S = nm.states(fp.l + s * v[0], fp.L + s * v[1])
    # map the l-advance away so every image stays near the fixed point's l
    arcs_l, arcs_L = [S[:, 0].copy()], [S[:, 1].copy()]
    it = 0
    while it < max_iter:
        S = nm.advance(S, ctx.p, inverse=(direction == "stable"))
        S[:, 0] -= shift
        it += 1
        arcs_l.append(S[:, 0].copy())
        arcs_L.append(S[:, 1].copy())
        if branch * (S[-1, 0] - fp.l) >= extent:
            break
    l = np.concatenate(arcs_l)
    L = np.concatenate(arcs_L)
    # roundoff in the unwrapped l (~1e-15) is injected at every step and
    # stretched with the arc, jittering points along it by a small relative
    # amount; a fold is a reversal larger than fold_tol times the distance,
    # looked for only beyond ten seed distances where the jitter is resolved
    dist = branch * (l - fp.l)
    reach = np.maximum.accumulate(dist)
    back = (dist < reach * (1.0 - fold_tol)) & (reach > 10.0 * d)
    fold = float(l[np.argmax(back)]) if np.any(back) else None
    return ManifoldArc(l, L, fp, direction, it, fold)


def arc_value_at(arc: ManifoldArc, l_target: float) -> float:
    """L on the arc at ``l_target`` by cubic interpolation in the ordered samples."""
    from scipy.interpolate import CubicSpline

    order = np.argsort(arc.l)
    lo, Lo = arc.l[order], arc.L[order]
    if not lo[0] <= l_target <= lo[-1]:
        raise DomainError(f"l = {l_target} is outside the grown arc [{lo[0]}, {lo[-1]}]")
    keep = np.concatenate([[True], np.diff(lo) > 0])
    return float(CubicSpline(lo[keep], Lo[keep])(l_target))


# ---------------------------------------------------------------- threshold oracle


def numeric_resonant_roots(ctx: ResonanceContext, mu: float, n: int = 128, nmap=None, tol=1e-13):
    """Zeros in l of ``L1 - L`` along the curve where numeric ``T_p`` returns l to itself.

    For each l on a uniform grid the l-component equation is solved for L by
    secant iteration (seeded with the truncated map), then sign changes of
    ``L1 - L`` along the grid are located by linear interpolation.
    """
    nm = nmap or NumericMap(ctx, mu)
    f = resonance_functions(ctx)
    x = (np.arange(n) + 0.5) * TWO_PI / n
    sq = np.sqrt(mu)
    La = ctx.Lstar + f.chi(x) * mu / ctx.c1
    Lb = La + 1e-3 * sq

    def lres(L):
        l1, L1 = nm(x, L)
        return l1 - x - TWO_PI * ctx.q, L1 - L

    ra, _ = lres(La)
    for _ in range(40):
        rb, dL = lres(Lb)
        denom = rb - ra
        step = np.where(denom != 0, rb * (Lb - La) / np.where(denom != 0, denom, 1.0), 0.0)
        La, ra = Lb, rb
        Lb = Lb - step
        if np.max(np.abs(step)) < tol:
            break
    _, dL = lres(Lb)
    g = np.append(dL, dL[0])
    xx = np.append(x, x[0] + TWO_PI)
    idx = np.nonzero(np.sign(g[:-1]) != np.sign(g[1:]))[0]
    roots = xx[idx] - g[idx] * (xx[idx + 1] - xx[idx]) / (g[idx + 1] - g[idx])
    return np.sort(np.mod(roots, TWO_PI))


def numeric_boundary_threshold(p, q, mu, g0=0.0, e_lo=0.005, e_hi=0.3, step=5e-3, etol=1e-3, n=128):
    """Numeric-continuation counterpart of :func:`~.thresholds.boundary_threshold`."""
    from .thresholds import _continue_down, has_resonant_structure

    grid = np.arange(e_lo, e_hi, step)[::-1]

    def ok(e):
        ctx = ResonanceContext(p, q, float(e), g0, mu_geom=mu)
        try:
            roots = numeric_resonant_roots(ctx, mu, n)
        except (DomainError, ConvergenceError):
            # the section cannot be parametrised by (l, L) near the resonance
            return False
        return has_resonant_structure(roots, p)

    return _continue_down(grid, ok, etol)


# ---------------------------------------------------------------- homoclinic point


@dataclass(frozen=True)
class NumericHomoclinic:
    """Stable and unstable arcs evaluated on the symmetry line ``l = l_h``."""

    estimate: object
    stable: ManifoldArc = field(repr=False)
    unstable: ManifoldArc = field(repr=False)
    L_stable: float
    L_unstable: float

    @property
    def gap(self) -> float:
        """``L_stable - L_unstable`` on the symmetry line."""
        return self.L_stable - self.L_unstable

    @property
    def offset(self) -> float:
        """Numeric minus leading-order ``L_h``."""
        return self.L_stable - self.estimate.L_h


def _hyperbolic_near(ctx, mu, j, nm):
    """Numeric hyperbolic fixed point nearest ``j pi/p``, shifted to that l."""
    fps = find_fixed_points(ctx, mu)
    fp = next(f for f in fps if f.j == j % (2 * ctx.p))
    target = j * np.pi / ctx.p
    off = TWO_PI * np.round((target - fp.l) / TWO_PI)
    nfp = fixed_point_from_truncated(ctx, mu, fp, nm)
    return replace(nfp, l=nfp.l + off)


def numeric_homoclinic(ctx: ResonanceContext, mu: float, margin: float = 0.2, **grow_kw) -> NumericHomoclinic:
    """Grow the stable branch of the point at ``j pi/p`` rightwards and the
    unstable branch of the point at ``(j + 2) pi/p`` leftwards, and evaluate
    both on the symmetry line ``l_h = (j + 1) pi/p`` chosen by the section rule."""
    from .separatrix import homoclinic_point

    est = homoclinic_point(ctx, mu)
    c, j = est.ctx, est.j
    nm = NumericMap(c, mu)
    half = np.pi / c.p
    l_line = (j + 1) * half
    s_fp = _hyperbolic_near(c, mu, j, nm)
    u_fp = _hyperbolic_near(c, mu, j + 2, nm)
    st = grow_manifold(c, mu, s_fp, "stable", extent=half + margin, branch=1, nmap=nm, **grow_kw)
    un = grow_manifold(c, mu, u_fp, "unstable", extent=half + margin, branch=-1, nmap=nm, **grow_kw)
    return NumericHomoclinic(est, st, un, arc_value_at(st, l_line), arc_value_at(un, l_line))
