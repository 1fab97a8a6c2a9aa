import numpy as np
import pytest
from hypothesis import given, strategies as st

from crtbp_resonance.errors import CollisionError, DomainError
from crtbp_resonance.kepler import (
    CartesianState,
    DelaunayState,
    cartesian_arrays,
    cartesian_to_delaunay,
    delaunay_arrays,
    delaunay_to_cartesian,
    delaunay_to_polar,
    hamiltonian_cartesian,
    hamiltonian_delaunay,
    solve_kepler,
    true_anomaly,
    wrap_angle,
)


def test_kepler_residual_ten_thousand_cases(rng):
    e = rng.uniform(0.0, 0.99, 10_000)
    l = rng.uniform(-50.0, 50.0, 10_000)
    E = solve_kepler(e, l)
    assert np.max(np.abs(E - e * np.sin(E) - l)) <= 1e-13


@given(st.floats(0.0, 0.95), st.floats(-100.0, 100.0))
def test_kepler_residual_property(e, l):
    E = solve_kepler(e, l)
    assert abs(E - e * np.sin(E) - l) <= 1e-13


@given(st.floats(0.0, 0.9), st.floats(0.0, 2 * np.pi))
def test_kepler_odd_and_periodic(e, l):
    assert solve_kepler(e, -l) == pytest.approx(-solve_kepler(e, l), abs=1e-13)
    assert solve_kepler(e, l + 2 * np.pi) == pytest.approx(solve_kepler(e, l) + 2 * np.pi, abs=1e-12)


def test_kepler_circular_is_identity():
    l = np.linspace(-3, 3, 11)
    assert np.array_equal(solve_kepler(0.0, l), l)


def test_kepler_rejects_bad_eccentricity():
    with pytest.raises(DomainError):
        solve_kepler(1.0, 0.3)


def test_true_anomaly_matches_half_angle_formula(rng):
    e = rng.uniform(0, 0.9, 200)
    E = rng.uniform(-np.pi, np.pi, 200)
    nu = true_anomaly(e, E)
    ref = 2 * np.arctan(np.sqrt((1 + e) / (1 - e)) * np.tan(E / 2))
    assert np.allclose(nu, ref, atol=1e-12)


def test_wrap_angle_range():
    x = np.array([-1e-300, -2 * np.pi, 7.0, 4 * np.pi])
    y = wrap_angle(x)
    assert np.all((y >= 0) & (y < 2 * np.pi))


def test_circular_orbit_polar():
    r, th = delaunay_to_polar(DelaunayState(1.2, 0.4, 1.2, 0.5))
    assert r == pytest.approx(1.44)
    assert th == pytest.approx(0.9)


@given(
    st.floats(0.6, 1.6),
    st.floats(0.0, 2 * np.pi),
    st.floats(0.05, 0.8),
    st.floats(0.0, 2 * np.pi),
    st.floats(0.0, 1e-3),
)
def test_delaunay_cartesian_roundtrip(L, l, e, g, mu):
    s = DelaunayState(L, l, L * np.sqrt(1 - e * e), g)
    try:
        c = delaunay_to_cartesian(s, mu)
    except CollisionError:
        return
    back = cartesian_to_delaunay(c, mu)
    assert back.L == pytest.approx(s.L, abs=1e-12)
    assert back.G == pytest.approx(s.G, abs=1e-12)
    d = lambda a, b: abs(np.angle(np.exp(1j * (a - b))))
    assert d(back.l, s.l) < 1e-9 and d(back.g, s.g) < 1e-9


@given(
    st.floats(0.6, 1.6),
    st.floats(0.0, 2 * np.pi),
    st.floats(0.05, 0.8),
    st.floats(0.0, 2 * np.pi),
    st.floats(1e-6, 1e-3),
)
def test_hamiltonians_agree(L, l, e, g, mu):
    G = L * np.sqrt(1 - e * e)
    x, y, px, py = cartesian_arrays(L, l, G, g, mu)
    if (x - 1) ** 2 + y**2 < 1e-4:
        return
    assert hamiltonian_cartesian(x, y, px, py, mu) == pytest.approx(hamiltonian_delaunay(L, l, G, g, mu), abs=1e-11)


def test_array_inverse(rng):
    L = rng.uniform(0.6, 1.5, 50)
    e = rng.uniform(0.05, 0.7, 50)
    l, g = rng.uniform(0, 2 * np.pi, (2, 50))
    out = delaunay_arrays(*cartesian_arrays(L, l, L * np.sqrt(1 - e * e), g))
    assert np.allclose(out[0], L, atol=1e-12)


def test_delaunay_state_validation():
    with pytest.raises(DomainError):
        DelaunayState(1.0, 0.0, 1.1, 0.0)
    with pytest.raises(CollisionError):
        delaunay_to_cartesian(DelaunayState(1.0, 0.0, 1.0, 0.0))


def test_cartesian_state_array():
    assert CartesianState(1.0, 2.0, 3.0, 4.0).as_array().tolist() == [1.0, 2.0, 3.0, 4.0]
