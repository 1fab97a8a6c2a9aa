import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, strategies as st

from crtbp_resonance.errors import CollisionError
from crtbp_resonance.perturbation import omega, omega_partials, omega_partials_fd, omega_prime


def _omega_mp(L, l, G, g, mu=0):
    L, l, G, g = (mp.mpf(v) for v in (L, l, G, g))
    e = mp.sqrt(1 - (G / L) ** 2)
    a = L * L / (1 - mu)
    E = mp.findroot(lambda x: x - e * mp.sin(x) - l, l)
    r = a * (1 - e * mp.cos(E))
    nu = 2 * mp.atan2(mp.sqrt(1 + e) * mp.sin(E / 2), mp.sqrt(1 - e) * mp.cos(E / 2))
    ct = mp.cos(g + nu)
    return 1 / mp.sqrt(1 + r * r - 2 * r * ct) - r * ct - 1 / L**2


POINTS = [(0.693, 0.7, 0.68, 1.1), (1.26, 2.0, 1.20, 4.0), (0.55, 5.5, 0.50, 0.3)]


@pytest.mark.parametrize("pt", POINTS)
def test_partials_against_mpmath(pt):
    mp.mp.dps = 30
    b = omega_partials(*pt)
    L, l, G, g = pt
    f = lambda *v: _omega_mp(*v)
    ref = {
        "omega": f(L, l, G, g),
        "d_l": mp.diff(lambda x: f(L, x, G, g), l),
        "d_g": mp.diff(lambda x: f(L, l, G, x), g),
        "d_L": mp.diff(lambda x: f(x, l, G, g), L),
        "d_G": mp.diff(lambda x: f(L, l, x, g), G),
        "d_ll": mp.diff(lambda x: f(L, x, G, g), l, 2),
        "d_lL": mp.diff(lambda x, y: f(y, x, G, g), (l, L), (1, 1)),
        "d_lG": mp.diff(lambda x, y: f(L, x, y, g), (l, G), (1, 1)),
    }
    for k, v in ref.items():
        assert float(getattr(b, k)) == pytest.approx(float(v), rel=1e-7, abs=1e-9), k


@pytest.mark.parametrize("pt", POINTS)
def test_partials_against_finite_differences(pt):
    b = omega_partials(*pt)
    fd = omega_partials_fd(*pt)
    for k in ("d_l", "d_g", "d_L", "d_G", "d_ll", "d_lL", "d_lG"):
        assert float(getattr(b, k)) == pytest.approx(float(getattr(fd, k)), rel=1e-7, abs=1e-8), k


@given(st.floats(0.0, 2 * np.pi), st.floats(0.0, 2 * np.pi))
def test_reflection_symmetry(l, g):
    L, G = 0.693, 0.68
    assert omega(L, -l, G, -g) == pytest.approx(omega(L, l, G, g), abs=1e-13)


@given(st.floats(0.0, 2 * np.pi), st.floats(0.0, 2 * np.pi), st.floats(-1.0, 1.0))
def test_circular_orbit_depends_on_l_plus_g(l, g, d):
    L = 0.693
    assert omega(L, l + d, L, g - d) == pytest.approx(omega(L, l, L, g), abs=1e-12)


def test_shift_is_minus_inverse_L_squared():
    assert omega(0.9, 0.3, 0.85, 1.0) == pytest.approx(omega_prime(0.9, 0.3, 0.85, 1.0) - 1 / 0.81, abs=1e-15)


def test_collision_detected():
    with pytest.raises(CollisionError):
        omega(1.0, 0.0, 1.0, 0.0)
