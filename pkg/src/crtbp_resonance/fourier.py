"""Fourier expansion of the disturbing function and Laplace coefficients.

``Omega = sum c_mn cos(m l + n g)`` with ``m >= 0`` and ``n`` any integer
(for ``m = 0`` only ``n >= 0`` is kept). The coefficients are functions of
``L, G``; here they are taken at ``L*, G*`` of a resonance context.

Two routes are provided.

* :func:`fourier_table` / :func:`fourier_c`: a 2-D FFT of Omega samples on
  the ``(l, g)`` torus, in double precision, with an aliasing check.
* :func:`fourier_c_mp`: the Laplace/Hansen route in arbitrary precision.
  ``Omega = sum_j A_j(r) cos(j (g + nu))`` with ``A_j`` built from Laplace
  coefficients; projecting ``A_j cos(j nu - k l)`` over the mean anomaly
  gives every ``c_mn``. This is needed where ``c_mn ~ e^|m-n|`` falls below
  double-precision roundoff of the O(1) coefficients.

Laplace coefficients follow ``(1 + a^2 - 2 a cos t)^(-1/2) = 1/2 sum b_n(a) e^(i n t)``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from functools import lru_cache

import mpmath as mp
import numpy as np

from .errors import CollisionError, ConvergenceError, DomainError
from .kepler import solve_kepler, true_anomaly
from .return_map import ResonanceContext, phi as phi_quad

TWO_PI = 2.0 * np.pi
FFT_GRID = 512
FFT_MAX_GRID = 2048
FFT_TOL = 1e-9


# ----------------------------------------------------------------------------
# Laplace coefficients


@dataclass(frozen=True)
class LaplaceSeries:
    """``b_n(alpha)`` and its alpha-derivatives ``derivs[i] = d^i b_n / d alpha^i``."""

    n: int
    alpha: float
    derivs: tuple

    @property
    def value(self) -> float:
        return self.derivs[0]

    @property
    def d1(self) -> float:
        return self.derivs[1]

    @property
    def d2(self) -> float:
        return self.derivs[2]


def _falling(s, i):
    out = 1.0
    for k in range(i):
        out *= s - k
    return out


def laplace_series(n: int, alpha: float, deriv_order: int = 0, rtol: float = 1e-15, max_terms: int = 100000):
    """Hypergeometric series for ``b_n(alpha)``, differentiated termwise.

    ``b_n = 2 sum_k (1/2)_k (1/2)_(n+k) / (k! (n+k)!) alpha^(n+2k)``; the
    coefficient ratio is ``(1/2+k)(1/2+n+k)/((k+1)(n+k+1))``.
    """
    if not 0 < alpha < 1:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    if deriv_order < 0:
        raise DomainError("deriv_order must be non-negative")
    n = abs(int(n))
    c = 2.0
    for k in range(n):
        c *= (0.5 + k) / (k + 1)
    a2 = alpha * alpha
    sums = np.zeros(deriv_order + 1)
    for k in range(max_terms):
        s = n + 2 * k
        term = c * alpha**s
        inc = np.array([term * _falling(s, i) / alpha**i for i in range(deriv_order + 1)])
        sums += inc
        # remaining terms are bounded by a geometric tail in alpha^2
        if np.all(np.abs(inc) <= rtol * np.abs(sums) * (1 - a2)) and k > deriv_order:
            break
        c *= (0.5 + k) * (0.5 + n + k) / ((k + 1) * (n + k + 1))
    else:
        raise ConvergenceError(f"Laplace series for n={n}, alpha={alpha} did not converge", None)
    return LaplaceSeries(n, float(alpha), tuple(float(v) for v in sums))


def laplace_b(n: int, alpha: float, deriv_order: int = 0) -> float:
    """``d^k b_n/d alpha^k`` at ``alpha`` with ``k = deriv_order``."""
    return laplace_series(n, alpha, deriv_order).derivs[deriv_order]


def laplace_b_quadrature(n: int, alpha: float, m: int = 256) -> float:
    """``b_n`` as a Fourier coefficient of the generating function (trapezoid rule)."""
    if not 0 < alpha < 1:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    t = TWO_PI * np.arange(m) / m
    f = (1.0 + alpha * alpha - 2.0 * alpha * np.cos(t)) ** -0.5
    return float(2.0 * np.mean(f * np.cos(n * t)))


# ----------------------------------------------------------------------------
# Double-precision table by FFT


def _omega_torus(ctx: ResonanceContext, N: int):
    """Omega on the ``N x N`` grid ``l_i = 2 pi i/N`` (rows), ``g_k = 2 pi k/N`` (columns)."""
    L, G = ctx.Lstar, ctx.Gstar
    e = np.sqrt(max(0.0, 1.0 - (G / L) ** 2))
    a = L * L / (1.0 - ctx.mu_geom)
    x = TWO_PI * np.arange(N) / N
    E = solve_kepler(e, x)
    nu = true_anomaly(e, E)
    r = (a * (1.0 - e * np.cos(E)))[:, None]
    ct = np.cos(nu[:, None] + x[None, :])
    d2 = 1.0 + r * r - 2.0 * r * ct
    if np.min(d2) <= 0:
        raise CollisionError("the orbit meets the second primary; the expansion does not exist")
    return 1.0 / np.sqrt(d2) - r * ct - 1.0 / (L * L)


def _fft_coefficients(ctx, N, mmax, nmax):
    F = np.fft.fft2(_omega_torus(ctx, N)).real / (N * N)
    n = np.arange(-nmax, nmax + 1)
    c = 2.0 * F[np.ix_(np.arange(mmax + 1), n % N)]
    c[0, n < 0] = 0.0
    c[0, nmax] *= 0.5  # c_00 is the mean itself
    return c


@dataclass(frozen=True)
class FourierTable:
    """``c[m, n + nmax] = c_mn`` for ``0 <= m <= mmax``, ``|n| <= nmax``."""

    ctx: ResonanceContext
    mmax: int
    nmax: int
    c: np.ndarray = field(repr=False)
    grid: int = FFT_GRID
    change: float = 0.0

    def coef(self, m: int, n: int) -> float:
        if not (0 <= m <= self.mmax and abs(n) <= self.nmax):
            raise DomainError(f"(m, n) = ({m}, {n}) outside the table")
        return float(self.c[m, n + self.nmax])

    def reconstruct(self, l, g, mmax=None, nmax=None):
        """Truncated sum ``sum c_mn cos(m l + n g)`` over ``m <= mmax``, ``|n| <= nmax``."""
        mmax = self.mmax if mmax is None else mmax
        nmax = self.nmax if nmax is None else nmax
        l, g = np.broadcast_arrays(np.asarray(l, dtype=float), np.asarray(g, dtype=float))
        m = np.arange(mmax + 1)
        n = np.arange(-nmax, nmax + 1)
        sub = self.c[: mmax + 1, self.nmax - nmax : self.nmax + nmax + 1]
        ph = l[..., None, None] * m[:, None] + g[..., None, None] * n[None, :]
        return (sub * np.cos(ph)).sum(axis=(-2, -1))

    def rows(self):
        for m in range(self.mmax + 1):
            for n in range(-self.nmax, self.nmax + 1):
                if m == 0 and n < 0:
                    continue
                yield m, n, self.coef(m, n)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["m", "n", "c_mn"])
            for m, n, v in self.rows():
                w.writerow([m, n, f"{v:.15g}"])


def fourier_table(ctx: ResonanceContext, mmax: int = 16, nmax: int = 16, grid: int = FFT_GRID, tol: float = FFT_TOL,
                  max_grid: int = FFT_MAX_GRID) -> FourierTable:
    """FFT table, doubling the grid until no coefficient moves by more than ``tol``."""
    if mmax < 0 or nmax < 0 or 2 * max(mmax, nmax) >= grid:
        raise DomainError("truncation orders must be non-negative and below grid/2")
    prev = _fft_coefficients(ctx, grid, mmax, nmax)
    while True:
        if 2 * grid > max_grid:
            raise ConvergenceError(f"aliasing check failed: coefficients still moving at grid {grid}", None)
        cur = _fft_coefficients(ctx, 2 * grid, mmax, nmax)
        change = float(np.max(np.abs(cur - prev)))
        if change <= tol:
            return FourierTable(ctx, mmax, nmax, prev, grid, change)
        prev, grid = cur, 2 * grid


def fourier_c(ctx: ResonanceContext, m: int, n: int, **kw) -> float:
    """Single coefficient ``c_mn`` from the FFT table."""
    if m < 0:
        raise DomainError("m must be non-negative")
    if m == 0 and n < 0:
        n = -n
    size = max(m, abs(n))
    return fourier_table(ctx, size, size, **kw).coef(m, n)


def phi_fourier(ctx: ResonanceContext, l0, table: FourierTable | None = None, kmax: int | None = None):
    """``phi(l0) = -2 pi p^2 sum_k k c_(kp,kq) sin(k p l0 + k q g0)``.

    Along ``l = l0 + q t/p``, ``g = g0 - t`` only harmonics with
    ``(m, n) = (k p, k q)`` survive the integral over ``[0, 2 pi p]``.
    """
    p, q = ctx.p, ctx.q
    if table is None:
        K = kmax or max(1, 96 // max(p, q))
        table = fourier_table(ctx, K * p, K * q)
    K = kmax or min(table.mmax // p, table.nmax // q)
    l0 = np.asarray(l0, dtype=float)
    k = np.arange(1, K + 1)
    c = np.array([table.coef(kk * p, kk * q) for kk in k])
    s = np.sin(np.multiply.outer(l0, k * p) + k * q * ctx.g0)
    out = -TWO_PI * p * p * (s * (k * c)).sum(axis=-1)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class IdentityCheck:
    l0: np.ndarray
    quadrature: np.ndarray
    series: np.ndarray
    max_error: float


def phi_identity(ctx: ResonanceContext, n: int = 64, table: FourierTable | None = None) -> IdentityCheck:
    """Compare phi by direct quadrature with its Fourier-series form on ``n`` points."""
    l0 = TWO_PI * (np.arange(n) + 0.25) / n
    a = phi_quad(ctx, l0)
    b = phi_fourier(ctx, l0, table)
    return IdentityCheck(l0, a, b, float(np.max(np.abs(a - b))))


# ----------------------------------------------------------------------------
# Arbitrary precision: Laplace / Hansen route


def _mp_laplace(jmax, alpha, eps):
    """``b_0 .. b_jmax`` at mp ``alpha``."""
    out = []
    a2 = alpha * alpha
    for n in range(jmax + 1):
        c = mp.mpf(2)
        for k in range(n):
            c *= (mp.mpf(1) / 2 + k) / (k + 1)
        term = c * alpha**n
        tot = term
        k = 0
        while abs(term) > eps * abs(tot):
            term *= (mp.mpf(1) / 2 + k) * (mp.mpf(1) / 2 + n + k) / ((k + 1) * (n + k + 1)) * a2
            tot += term
            k += 1
        out.append(tot)
    return out


def _mp_kepler(e, M):
    E = M + e * mp.sin(M)
    for _ in range(200):
        dE = (E - e * mp.sin(E) - M) / (1 - e * mp.cos(E))
        E -= dE
        if abs(dE) < mp.eps * 4:
            break
    return E


@lru_cache(maxsize=32)
def _hansen_samples(L, G, mu_geom, jmax, N, dps):
    """Mean-anomaly samples of ``(A_0..A_jmax, nu)`` at ``N`` uniform nodes."""
    with mp.workdps(dps):
        L, G = mp.mpf(L), mp.mpf(G)
        e = mp.sqrt(1 - (G / L) ** 2)
        a = L * L / (1 - mp.mpf(mu_geom))
        eps = mp.mpf(10) ** (-dps)
        rows = []
        for i in range(N):
            M = 2 * mp.pi * i / N
            E = _mp_kepler(e, M)
            r = a * (1 - e * mp.cos(E))
            nu = 2 * mp.atan2(mp.sqrt(1 + e) * mp.sin(E / 2), mp.sqrt(1 - e) * mp.cos(E / 2))
            if r < 1:
                A = _mp_laplace(jmax, r, eps)
            elif r > 1:
                A = [b / r for b in _mp_laplace(jmax, 1 / r, eps)]
            else:
                raise CollisionError("the orbit meets the second primary")
            A[0] = A[0] / 2 - 1 / (L * L)
            if jmax >= 1:
                A[1] -= r
            rows.append((A, nu, M))
        return rows


def _h(rows, j, k):
    """``(1/2 pi) int A_j cos(j nu - k l) dl`` by the trapezoid rule."""
    return mp.fsum(A[j] * mp.cos(j * nu - k * M) for A, nu, M in rows) / len(rows)


def fourier_c_mp(L, G, m: int, n: int, mu_geom=0.0, dps: int = 50, N: int | None = None, jmax: int | None = None):
    """``c_mn`` at ``(L, G)`` in ``dps``-digit arithmetic (returned as an mpf).

    ``Omega = sum_j A_j(r) cos(j (g + nu))`` and ``A_j e^(i j nu) = sum_k h_jk e^(i k l)``
    give ``c_mn = h_(n,m)`` for ``n > 0``, ``h_(|n|,-m)`` for ``n < 0`` and
    ``2 h_(0,m)`` for ``n = 0 < m``. Passing a common ``N`` and ``jmax``
    lets many coefficients share one set of samples.
    """
    if m < 0:
        raise DomainError("m must be non-negative")
    if m == 0 and n < 0:
        n = -n
    j = abs(n)
    N = N or 64 + 4 * (m + j)
    jmax = max(j, 1) if jmax is None else jmax
    if jmax < j:
        raise DomainError("jmax must be at least |n|")
    rows = _hansen_samples(str(L), str(G), str(mu_geom), jmax, N, dps)
    with mp.workdps(dps):
        if n > 0:
            return _h(rows, j, m)
        if n < 0:
            return _h(rows, j, -m)
        return _h(rows, 0, m) * (2 if m > 0 else 1)


def ctx_elements(ctx: ResonanceContext, e=None, dps: int = 50):
    """``(L*, G*)`` as strings exact to ``dps`` digits for a (possibly different) eccentricity."""
    with mp.workdps(dps + 10):
        L = (mp.mpf(ctx.p) / ctx.q) ** (mp.mpf(1) / 3)
        ee = mp.mpf(ctx.e if e is None else e)
        G = L * mp.sqrt(1 - ee * ee)
        return mp.nstr(L, dps + 5), mp.nstr(G, dps + 5)


@dataclass(frozen=True)
class ExponentFit:
    m: int
    n: int
    slope: float
    expected: int

    @property
    def ok(self) -> bool:
        return abs(self.slope - self.expected) <= 0.05


def exponent_fits(p=1, q=3, mmax=5, nmax=5, e_grid=None, dps=50):
    """Least-squares slope of ``log|c_mn|`` against ``log e`` for every ``m <= mmax``, ``|n| <= nmax``."""
    e_grid = np.geomspace(1e-3, 1e-2, 7) if e_grid is None else np.asarray(e_grid)
    ctx = ResonanceContext(p, q, float(e_grid[0]))
    logs = {}
    for e in e_grid:
        L, G = ctx_elements(ctx, e, dps)
        for m in range(mmax + 1):
            for n in range(-nmax, nmax + 1):
                if m == 0 and n < 0:
                    continue
                v = fourier_c_mp(L, G, m, n, dps=dps, N=64 + 4 * (mmax + nmax), jmax=max(nmax, 1))
                logs.setdefault((m, n), []).append(float(mp.log(abs(v))) if v != 0 else -np.inf)
    x = np.log(e_grid)
    out = []
    for (m, n), y in logs.items():
        y = np.asarray(y)
        if not np.all(np.isfinite(y)):
            continue
        out.append(ExponentFit(m, n, float(np.polyfit(x, y, 1)[0]), abs(m - n)))
    return out


# ----------------------------------------------------------------------------
# Leading-order coefficient c*(p, q)


def c_star_limit(p: int, q: int, e: float = 1e-12, dps: int = 60) -> float:
    """``lim_(e->0) c_(p,q)/e^|p-q|`` evaluated at a tiny eccentricity.

    The next term is relative O(e^2), far below double precision at the
    default ``e``.
    """
    if p == q:
        raise DomainError("p/q = 1 is excluded")
    with mp.workdps(dps + 10):
        L = (mp.mpf(p) / q) ** (mp.mpf(1) / 3)
        ee = mp.mpf(e)
        G = L * mp.sqrt(1 - ee * ee)
        v = fourier_c_mp(mp.nstr(L, dps + 5), mp.nstr(G, dps + 5), p, q, dps=dps)
        return float(v / ee ** abs(p - q))


def c_star_closed(p: int, q: int, alpha=None, dps: int = 40) -> float:
    """Closed form for interior resonances (``p < q``).

    ``-(-1)^d q^(2/3) / (6 2^d pi p^(8/3)) [sum_k binom(D + q, k) p^(d-k)/(d-k)!] (alpha b_q(alpha))``
    with ``d = q - p`` and ``D = alpha d/d alpha``; default ``alpha = (p/q)^(1/3)``.
    ``binom(D + q, k)`` is the falling-factorial polynomial; on the term
    ``alpha^s`` of ``alpha b_q`` it is the number ``binom(s + q, k)``.
    """
    if not p < q:
        raise DomainError("the closed form is stated for p < q")
    d = q - p
    with mp.workdps(dps):
        a = (mp.mpf(p) / q) ** (mp.mpf(1) / 3) if alpha is None else mp.mpf(alpha)
        if not 0 < a < 1:
            raise DomainError("alpha must lie in (0, 1)")
        eps = mp.mpf(10) ** (-dps)
        c = mp.mpf(2)
        for k in range(q):
            c *= (mp.mpf(1) / 2 + k) / (k + 1)
        tot = mp.mpf(0)
        k2 = 0
        while True:
            s = q + 2 * k2 + 1  # exponent in alpha b_q
            w = mp.fsum(mp.binomial(s + q, k) * mp.mpf(p) ** (d - k) / mp.factorial(d - k) for k in range(d + 1))
            term = c * w * a**s
            tot += term
            if abs(term) <= eps * abs(tot) and k2 > 4:
                break
            c *= (mp.mpf(1) / 2 + k2) * (mp.mpf(1) / 2 + q + k2) / ((k2 + 1) * (q + k2 + 1))
            k2 += 1
        pre = -((-1) ** d) * mp.mpf(q) ** (mp.mpf(2) / 3) / (6 * 2**d * mp.pi * mp.mpf(p) ** (mp.mpf(8) / 3))
        return float(pre * tot)


@dataclass(frozen=True)
class CStarReport:
    """Closed form against the numeric limit.

    ``closed`` is the printed expression at ``alpha = (p/q)^(1/3)``.
    ``rescaled`` is ``-6 pi p^2`` times the same expression at the
    semimajor-axis ratio ``alpha = (p/q)^(2/3)``; it is reported as a
    diagnostic of the mismatch and never substituted for ``closed``.
    """

    p: int
    q: int
    limit: float
    closed: float | None
    rescaled: float | None
    rtol: float = 1e-4

    @property
    def rel_error(self) -> float | None:
        if self.closed is None:
            return None
        return abs(self.closed - self.limit) / abs(self.limit)

    @property
    def rescaled_rel_error(self) -> float | None:
        if self.rescaled is None:
            return None
        return abs(self.rescaled - self.limit) / abs(self.limit)

    @property
    def agrees(self) -> bool:
        return self.rel_error is not None and self.rel_error <= self.rtol

    @property
    def note(self) -> str:
        if self.closed is None:
            return "no closed form for p > q; limit only"
        if self.agrees:
            return "closed form agrees with the limit"
        return (f"MISMATCH: closed form {self.closed:.10g} vs limit {self.limit:.10g} "
                f"(relative error {self.rel_error:.3g}); -6 pi p^2 x closed form at alpha=(p/q)^(2/3) "
                f"gives {self.rescaled:.10g} (relative error {self.rescaled_rel_error:.2g})")


def c_star(p: int, q: int, rtol: float = 1e-4) -> CStarReport:
    """Leading coefficient ``c*(p, q)`` with the closed form checked against the numeric limit."""
    limit = c_star_limit(p, q)
    if p < q:
        closed = c_star_closed(p, q)
        rescaled = -6.0 * np.pi * p * p * c_star_closed(p, q, alpha=(p / q) ** (2.0 / 3.0))
    else:
        closed = rescaled = None
    return CStarReport(p, q, limit, closed, rescaled, rtol)
