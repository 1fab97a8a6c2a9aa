import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import cumulative_simpson, quad

from crtbp_resonance.errors import AssumptionAError, DomainError
from crtbp_resonance.perturbation import omega_partials
from crtbp_resonance.return_map import (
    ResonanceContext,
    apply_scaled_map,
    dphi,
    find_fixed_points,
    phi,
    psi_chi,
    resonance_functions,
    scaled_map_jacobian,
)

CONTEXTS = [
    ResonanceContext(1, 3, 0.1),
    ResonanceContext(1, 3, 0.3, np.pi),
    ResonanceContext(1, 2, 0.2),
    ResonanceContext(2, 3, 0.1),
    ResonanceContext(2, 5, 0.15, np.pi),
    ResonanceContext(3, 7, 0.1),
    ResonanceContext(3, 1, 0.16),
    ResonanceContext(2, 1, 0.1, np.pi),
    ResonanceContext(7, 1, 0.3),
    ResonanceContext(1, 4, 0.2, mu_geom=1e-3),
]


def _line(ctx, l0, t):
    return omega_partials(ctx.Lstar, l0 + ctx.q * t / ctx.p, ctx.Gstar, ctx.g0 - t, ctx.mu_geom)


def _quad(ctx, l0, key, weight=lambda t: 1.0):
    f = lambda t: float(getattr(_line(ctx, l0, t), key)) * weight(t)
    return quad(f, 0.0, 2 * np.pi * ctx.p, limit=400, epsabs=1e-13, epsrel=1e-12)[0]


@pytest.mark.parametrize("ctx", CONTEXTS[:4], ids=str)
def test_phi_against_adaptive_quadrature(ctx):
    for l0 in (0.3, np.pi / 2, 2.0):
        assert phi(ctx, l0) == pytest.approx(_quad(ctx, l0, "d_l"), abs=1e-10)
        assert dphi(ctx, l0) == pytest.approx(_quad(ctx, l0, "d_ll"), abs=1e-10)


def test_psi_against_adaptive_quadrature(ctx13):
    r = ctx13.q / ctx13.p
    K = 3 * r ** (4 / 3)
    for l0 in (0.4, 2.5):
        ref = _quad(ctx13, l0, "d_lL") + r * _quad(ctx13, l0, "d_lG") - K * _quad(ctx13, l0, "d_ll", lambda t: t)
        assert psi_chi(ctx13, l0)[0] == pytest.approx(ref, abs=1e-9)


def test_chi_against_cumulative_quadrature(ctx13):
    """The double integral by an explicit inner cumulative integral."""
    r = ctx13.q / ctx13.p
    K = 3 * r ** (4 / 3)
    T = 2 * np.pi * ctx13.p
    t = np.linspace(0.0, T, 40001)
    for l0 in (0.4, 2.5):
        b = _line(ctx13, l0, t)
        inner = cumulative_simpson(b.d_l, x=t, initial=0.0)
        dbl = np.trapezoid(inner, t)
        ref = -_quad(ctx13, l0, "d_L") - r * _quad(ctx13, l0, "d_G") - K * dbl
        assert psi_chi(ctx13, l0)[1] == pytest.approx(ref, abs=1e-7)


@pytest.mark.parametrize("ctx", CONTEXTS, ids=str)
def test_phi_odd_and_periodic(ctx):
    f = resonance_functions(ctx)
    x = np.linspace(0, 2 * np.pi, 256, endpoint=False)
    scale = max(1.0, np.max(np.abs(phi(ctx, x))))
    assert np.max(np.abs(phi(ctx, -x) + phi(ctx, x))) <= 1e-9 * scale
    assert np.max(np.abs(phi(ctx, x + 2 * np.pi / ctx.p) - phi(ctx, x))) <= 1e-9 * scale
    assert np.max(np.abs(f.phi(x) - phi(ctx, x))) <= 1e-9 * scale


@pytest.mark.parametrize("ctx", CONTEXTS[:6], ids=str)
def test_reversibility_relations(ctx):
    f = resonance_functions(ctx)
    x = np.linspace(0.1, 6.0, 37)
    c1 = ctx.c1
    tol = 1e-9 * max(1.0, np.max(np.abs(f.chi(x))))
    assert np.max(np.abs(f.chi(-x) - f.chi(x) - c1 * f.phi(x))) <= tol
    assert np.max(np.abs(f.psi(x) + f.psi(-x) + c1 * f.phi(x, 1))) <= tol


@pytest.mark.parametrize("ctx", CONTEXTS[:6], ids=str)
def test_area_preservation_identity(ctx):
    f = resonance_functions(ctx)
    x = np.linspace(0, 2 * np.pi, 50)
    lhs = f.chi(x, 1) + f.psi(x) + ctx.c1 * f.phi(x, 1)
    assert np.max(np.abs(lhs)) <= 1e-8 * max(1.0, np.max(np.abs(f.psi(x))))


@given(st.floats(0.0, 2 * np.pi), st.floats(-3.0, 3.0), st.floats(1e-8, 1e-3))
def test_scaled_map_area_preserving_to_order_mu(l, lam, mu):
    """det J = 1 + mu (chi' + psi + c1 phi') + mu^1.5 lam (c1 psi' - 2 c2 phi') + O(mu^2)."""
    ctx = CONTEXTS[0]
    f = resonance_functions(ctx)
    J = scaled_map_jacobian(ctx, mu, l, lam)
    c15 = lam * (ctx.c1 * f.psi(l, 1) - 2 * ctx.c2 * f.phi(l, 1))
    c2 = f.chi(l, 1) * f.psi(l) + 2 * ctx.c2 * lam**2 * f.psi(l, 1)
    resid = np.linalg.det(J) - 1.0 - c15 * mu**1.5
    assert abs(resid) <= 2 * abs(c2) * mu**2 + 1e-8 * mu + 1e-13


def test_fixed_points_structure(ctx13):
    mu = 1e-5
    fps = find_fixed_points(ctx13, mu)
    assert len(fps) == 2 * ctx13.p
    kinds = [f.kind for f in fps]
    assert sorted(kinds) == ["elliptic", "hyperbolic"]
    for f in fps:
        l1, lam1 = apply_scaled_map(ctx13, mu, (f.l, f.lam))
        assert l1 == pytest.approx(f.l, abs=1e-12) and lam1 == pytest.approx(f.lam, abs=1e-12)
        assert abs(f.l - f.j * np.pi / ctx13.p) < 1e-3


def test_fixed_points_alternate(rng):
    ctx = ResonanceContext(2, 5, 0.15)
    fps = find_fixed_points(ctx, 1e-6)
    kinds = [f.kind for f in sorted(fps, key=lambda f: f.j)]
    assert all(a != b for a, b in zip(kinds, kinds[1:]))
    hyp = [f for f in fps if f.kind == "hyperbolic"][0]
    s, u = hyp.multipliers
    assert abs(s) < 1 < abs(u) and s * u == pytest.approx(1.0, abs=1e-6)


def test_fixed_points_require_assumption_a():
    with pytest.raises(AssumptionAError):
        find_fixed_points(ResonanceContext(3, 1, 0.16), 1e-5)


@pytest.mark.parametrize(
    "args",
    [(1, 1, 0.1), (2, 4, 0.1), (1, 3, 0.0), (1, 3, 0.1, 1.0), (1, 2, 0.6), (3, 1, 0.5)],
)
def test_context_validation(args):
    with pytest.raises(DomainError):
        ResonanceContext(*args)


def test_scaled_map_rejects_negative_mu(ctx13):
    with pytest.raises(DomainError):
        apply_scaled_map(ctx13, -1.0, (0.0, 0.0))
