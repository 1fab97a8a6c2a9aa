import numpy as np
import pytest
from hypothesis import given, strategies as st

from crtbp_resonance import _flow
from crtbp_resonance.dynamics import (
    NumericMap,
    SectionPoint,
    arc_value_at,
    grow_manifold,
    numeric_fixed_point,
    numeric_return_map,
    perturbative_error_scan,
    solve_G_from_H,
    steps_per_return,
)
from crtbp_resonance.errors import DomainError
from crtbp_resonance.perturbation import omega_partials
from crtbp_resonance.return_map import ResonanceContext, find_fixed_points
from crtbp_resonance.separatrix import manifold_in_Ll, separatrix_expansion

MU = 1e-4


@pytest.fixture(scope="module")
def nmap(ctx13):
    return NumericMap(ctx13, MU)


def test_gradient_kernel_matches_partials():
    L, l, G, g, mu = 0.7, 1.3, 0.69, 2.1, 1e-3
    W, Wl, WL, WG, Wg = _flow.omega_prime_grad(l, L, G, g, mu)
    b = omega_partials(L, l, G, g, mu)
    # the kernel differentiates omega' (no -1/L^2 shift)
    assert Wl == pytest.approx(b.d_l, rel=1e-12)
    assert Wg == pytest.approx(b.d_g, rel=1e-12)
    assert WG == pytest.approx(b.d_G, rel=1e-12)
    assert WL == pytest.approx(b.d_L - 2 / L**3, rel=1e-12)


def test_section_point_on_energy_surface(ctx13):
    sp = SectionPoint(0.4, ctx13.Lstar + 1e-3, ctx13.H, 0.0, MU)
    assert _flow.energy(sp.l, sp.L, sp.G, 0.0, MU) == pytest.approx(ctx13.H, abs=1e-13)


def test_solve_G_exact_without_perturbation(ctx13):
    assert solve_G_from_H(ctx13, 0.0, 0.3, ctx13.Lstar) == pytest.approx(ctx13.Gstar, abs=1e-15)
    with pytest.raises(DomainError):
        solve_G_from_H(ctx13, 0.1, 0.3, ctx13.Lstar)


def test_step_count_converges(ctx13):
    n = steps_per_return(ctx13, MU)
    assert 16 <= n <= 4096


def test_cartesian_agrees_with_delaunay(ctx13):
    a = numeric_return_map(ctx13, MU, (0.7, ctx13.Lstar - 2e-3), method="delaunay")
    b = numeric_return_map(ctx13, MU, (0.7, ctx13.Lstar - 2e-3), method="cartesian")
    assert a.l == pytest.approx(b.l, abs=1e-9)
    assert a.L == pytest.approx(b.L, abs=1e-11)


def test_reversibility_hundred_points(ctx13, nmap, rng):
    l0 = rng.uniform(0, 2 * np.pi, 100)
    L0 = ctx13.Lstar + rng.uniform(-1e-2, 1e-3, 100)
    S1 = nmap.advance(nmap.states(l0, L0), 1)
    R = np.column_stack([-S1[:, 0], S1[:, 1], S1[:, 2]])
    back = nmap.advance(R, 1)
    assert np.max(np.abs(-back[:, 0] - l0)) <= 1e-9
    assert np.max(np.abs(back[:, 1] - L0)) <= 1e-9


def test_inverse_map(ctx13, nmap, rng):
    S = nmap.states(rng.uniform(0, 6, 10), ctx13.Lstar)
    back = nmap.advance(nmap.advance(S, 1), 1, inverse=True)
    assert np.max(np.abs(back - S)) <= 1e-10


def test_energy_drift(ctx13, nmap, rng):
    S = nmap.states(rng.uniform(0, 6, 20), ctx13.Lstar + 1e-3)
    Sp = nmap.advance(S, ctx13.p)
    assert np.max(np.abs(nmap.energy(Sp) - nmap.energy(S))) <= 1e-10


@given(st.floats(0.0, 2 * np.pi), st.floats(-2.0, 0.3))
def test_energy_drift_property(l, lam):
    ctx = ResonanceContext(2, 5, 0.15)
    nm = NumericMap(ctx, MU)
    S = nm.states(l, ctx.Lstar + lam * np.sqrt(MU))
    assert abs(nm.energy(nm.advance(S, ctx.p))[0] - nm.energy(S)[0]) <= 1e-10


def test_first_order_remainder_exponent(ctx13):
    scan = perturbative_error_scan(ctx13)
    assert scan.ok, scan


def test_scaled_map_residual_exponent(ctx13):
    scan = perturbative_error_scan(ctx13, point=(0.5, -0.3), scaled=True)
    assert scan.ok, scan


def test_numeric_fixed_point_near_truncated(ctx13, nmap):
    fps = find_fixed_points(ctx13, MU)
    for f in fps:
        nfp = numeric_fixed_point(ctx13, MU, (f.l, ctx13.Lstar + f.lam * np.sqrt(MU)), nmap)
        assert abs(nfp.l - f.l) < 100 * MU
        assert nfp.hyperbolic == (f.kind == "hyperbolic")
        assert np.prod(nfp.multipliers).real == pytest.approx(1.0, abs=1e-6)


def test_short_manifold_arc_follows_graph(ctx13, nmap):
    exp = separatrix_expansion(ctx13)
    fp = [f for f in find_fixed_points(ctx13, MU) if f.j == exp.j][0]
    arc = grow_manifold(ctx13, MU, fp, "stable", extent=0.6, nmap=nmap)
    assert arc.fold_at is None
    x = exp.shift + 0.4
    assert abs(arc_value_at(arc, x) - manifold_in_Ll(exp, MU, x)) < 5 * MU**1.5
    with pytest.raises(DomainError):
        arc_value_at(arc, exp.shift + 2.0)


def test_manifold_direction_validated(ctx13):
    with pytest.raises(ValueError):
        grow_manifold(ctx13, MU, None, "sideways")


def test_mu_range(ctx13):
    with pytest.raises(DomainError):
        NumericMap(ctx13, 0.1)
