import numpy as np
import pytest
from scipy.integrate import quad

from crtbp_resonance.errors import AssumptionAError, DomainError
from crtbp_resonance.return_map import ResonanceContext
from crtbp_resonance.separatrix import (
    choose_section,
    homoclinic_point,
    hyperbolic_index,
    manifold_in_Ll,
    sample_curves,
    separatrix_expansion,
    u_of_l,
    v_of_l,
)


def _expansions():
    for g0 in (0.0, np.pi):
        ctx = ResonanceContext(1, 3, 0.1, g0)
        for j in (hyperbolic_index(ctx), hyperbolic_index(ctx) + 2):
            yield separatrix_expansion(ctx, j)


EXPANSIONS = list(_expansions())


@pytest.mark.parametrize("exp", EXPANSIONS, ids=lambda x: f"g0={x.ctx.g0:.2f},j={x.j}")
def test_u_slope(exp):
    h = 1e-5
    fd = (u_of_l(exp, h) - u_of_l(exp, -h)) / (2 * h)
    assert u_of_l(exp, 0.0, 1) == pytest.approx(np.sqrt(-exp.Phi(0.0, 1) / exp.ctx.c1), abs=1e-12)
    assert fd == pytest.approx(exp.alpha2, abs=1e-8)


@pytest.mark.parametrize("exp", EXPANSIONS, ids=lambda x: f"g0={x.ctx.g0:.2f},j={x.j}")
def test_v_slope(exp):
    h = 1e-4
    fd = (v_of_l(exp, h) - v_of_l(exp, -h)) / (2 * h)
    assert fd == pytest.approx(exp.v_slope, abs=1e-6)


def test_U_against_quad():
    exp = EXPANSIONS[0]
    for l in (0.3, 1.5, exp.half_width):
        ref = -(2 / exp.ctx.c1) * quad(lambda x: float(exp.Phi(x)), 0, l, epsabs=1e-14)[0]
        assert exp.U(l) == pytest.approx(ref, abs=1e-12)


def test_u_single_hump():
    exp = EXPANSIONS[0]
    x = np.linspace(0.0, exp.half_width, 2001)
    u = u_of_l(exp, x)
    du = np.diff(u)
    # rises from 0, one maximum at l = pi/p, then falls
    assert np.sum(np.diff(np.sign(du)) != 0) == 1
    assert x[np.argmax(u)] == pytest.approx(np.pi / exp.ctx.p, abs=2e-3)
    assert np.all(u[1:] > 0)


def test_v_against_direct_quadrature():
    exp = EXPANSIONS[0]
    c1, c2 = exp.ctx.c1, exp.ctx.c2

    def f(x):
        u = u_of_l(exp, x)
        P = float(exp.Phi(x))
        return c1 * u * float(exp.Phi(x, 1)) / 2 + (c2 * u * u + float(exp.Chi(x))) * P / (c1 * u) + P * P / (2 * u) + u * float(exp.Psi(x))

    for l in (0.5, 2.0):
        ref = -quad(f, 0.0, l, epsabs=1e-13, limit=200)[0] / (c1 * u_of_l(exp, l))
        assert v_of_l(exp, l) == pytest.approx(ref, abs=1e-9)


def test_domain_errors():
    exp = EXPANSIONS[0]
    with pytest.raises(DomainError):
        u_of_l(exp, 2 * exp.half_width)
    with pytest.raises(DomainError):
        separatrix_expansion(exp.ctx, exp.j + 1)
    with pytest.raises(DomainError):
        manifold_in_Ll(exp, -1.0, exp.shift + 0.1)


def test_sample_curves_shapes():
    l, u, v, L = sample_curves(EXPANSIONS[0], 1e-5, n=11)
    assert l.shape == u.shape == v.shape == L.shape == (11,)


@pytest.mark.parametrize(
    "p,q,e",
    [(1, 3, 0.1), (1, 2, 0.2), (2, 3, 0.1), (2, 5, 0.15), (3, 7, 0.1), (4, 1, 0.1), (4, 3, 0.05)],
)
def test_section_rule(p, q, e):
    c, j = choose_section(ResonanceContext(p, q, e))
    exp = separatrix_expansion(c, j)
    assert exp.Phi(0.0, 1) < 0
    if p % 2:
        assert c.g0 == 0.0 and j in (-1, p - 1)
    else:
        assert j == -1
    l_h = np.mod((j + 1) * np.pi / p, 2 * np.pi)
    assert min(abs(l_h), abs(l_h - np.pi)) < 1e-12


def test_homoclinic_point_on_symmetry_line():
    ctx = ResonanceContext(1, 3, 0.1)
    h = homoclinic_point(ctx, 1e-5)
    assert h.l_h in (0.0, np.pi)
    assert h.L_h > ctx.Lstar
    assert abs(h.L_graph - h.L_h) < 50 * 1e-5


def test_section_rule_without_applicable_case():
    # p even with phi'(0) < 0 on both sections
    with pytest.raises(AssumptionAError):
        choose_section(ResonanceContext(2, 1, 0.1))
