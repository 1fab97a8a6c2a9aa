"""Quadrature helpers: composite Gauss-Legendre along unperturbed lines and
trigonometric interpolation of 2*pi-periodic functions."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import ConvergenceError

NODES_PER_PANEL = 16


@lru_cache(maxsize=64)
def panel_rule(T: float, n_panels: int, m: int = NODES_PER_PANEL):
    """Nodes and weights of an ``n_panels`` x ``m`` Gauss-Legendre rule on [0, T]."""
    x, w = np.polynomial.legendre.leggauss(m)
    edges = np.linspace(0.0, T, n_panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    t = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    wt = (half[:, None] * w[None, :]).ravel()
    t.setflags(write=False)
    wt.setflags(write=False)
    return t, wt


def converged_panels(evaluate, T, start, tol, max_panels=4096):
    """Double the panel count until ``evaluate(t, w)`` stops changing.

    ``evaluate`` returns an array of integrals; the largest change between
    successive refinements must fall below ``tol * max(1, max|values|)``.
    Returns ``(n_panels, values, error_estimate)``.
    """
    n = start
    t, w = panel_rule(T, n)
    prev = evaluate(t, w)
    while n < max_panels:
        n *= 2
        t, w = panel_rule(T, n)
        cur = evaluate(t, w)
        err = float(np.max(np.abs(cur - prev)))
        if err <= tol * max(1.0, float(np.max(np.abs(cur)))):
            return n // 2, cur, err
        prev = cur
    raise ConvergenceError(f"quadrature did not reach {tol:g} with {max_panels} panels", err)


class TrigInterpolant:
    """Trigonometric interpolant of a 2*pi-periodic function from uniform samples.

    Samples are taken at ``2*pi*k/n``. Evaluation and derivatives are exact
    sums over the retained harmonics.
    """

    def __init__(self, samples):
        samples = np.asarray(samples, dtype=float)
        n = samples.size
        if n % 2:
            raise ValueError("sample count must be even")
        c = np.fft.rfft(samples) / n
        c[1:-1] *= 2.0
        c[-1] = 0.0  # drop the Nyquist mode; it is not a real cosine/sine pair
        self.n = n
        self.a = c.real
        self.b = -c.imag
        self.k = np.arange(c.size, dtype=float)

    @property
    def tail(self) -> float:
        """Size of the upper quarter of the spectrum, a truncation estimate."""
        m = self.k.size
        amp = np.hypot(self.a, self.b)
        return float(np.max(amp[3 * m // 4 :]))

    def integral(self, x0, x1):
        """Exact integral from ``x0`` to ``x1``.

        Written with ``sin(k h/2)`` so short intervals keep full relative
        accuracy: ``sin kx1 - sin kx0 = 2 cos(k m) sin(k h/2)``.
        """
        x0, x1 = np.broadcast_arrays(np.asarray(x0, dtype=float), np.asarray(x1, dtype=float))
        h = x1 - x0
        mid = 0.5 * (x0 + x1)
        k = self.k[1:]
        kh = np.sin(np.multiply.outer(0.5 * h, k)) * (2.0 / k)
        km = np.multiply.outer(mid, k)
        terms = kh * (self.a[1:] * np.cos(km) + self.b[1:] * np.sin(km))
        return self.a[0] * h + terms.sum(axis=-1)

    def __call__(self, x, deriv: int = 0):
        x = np.asarray(x, dtype=float)
        kx = np.multiply.outer(x, self.k)
        ck, sk = np.cos(kx), np.sin(kx)
        kd = self.k**deriv
        # d^n/dx^n of a cos + b sin cycles through (a, b) -> (b, -a) ...
        a, b = self.a, self.b
        for _ in range(deriv % 4):
            a, b = b, -a
        return (ck * (a * kd) + sk * (b * kd)).sum(axis=-1)
