import numpy as np
import pytest

from crtbp_resonance.errors import ConvergenceError, DomainError
from crtbp_resonance.return_map import ResonanceContext, resonance_functions
from crtbp_resonance.thresholds import (
    MU_JUPITER,
    asymmetric_threshold,
    boundary_threshold,
    check_assumption_a,
    has_resonant_structure,
    resonant_roots,
    truncated_residual,
)

TABLE2 = [(7, 0.365900), (6, 0.320133), (5, 0.265532), (4, 0.199749), (3, 0.121094), (2, 0.036083)]


@pytest.mark.parametrize("p,ref", TABLE2)
def test_table2_rows(p, ref):
    assert asymmetric_threshold(p, 1, mu=MU_JUPITER) == pytest.approx(ref, abs=5e-5)


def test_asymmetric_threshold_is_sign_change():
    e = asymmetric_threshold(3, 1)
    from crtbp_resonance.return_map import dphi

    lo = dphi(ResonanceContext(3, 1, e - 1e-4, mu_geom=MU_JUPITER), np.pi / 3)
    hi = dphi(ResonanceContext(3, 1, e + 1e-4, mu_geom=MU_JUPITER), np.pi / 3)
    assert lo * hi < 0


def test_asymmetric_threshold_domain():
    with pytest.raises(DomainError):
        asymmetric_threshold(1, 3)
    with pytest.raises(ConvergenceError):
        asymmetric_threshold(2, 1, e_lo=0.001, e_hi=0.02)


def test_assumption_a_holds(ctx13):
    rep = check_assumption_a(ctx13)
    assert rep.holds and not rep.extra_zeros
    assert [z for z, _ in rep.zeros] == [0.0, np.pi]


def test_assumption_a_fails_past_pitchfork():
    rep = check_assumption_a(ResonanceContext(3, 1, 0.16))
    assert not rep.holds
    z = [r for r, _ in rep.extra_zeros]
    # a symmetric pair about pi/p
    assert len(z) == 2 and sum(z) / 2 == pytest.approx(np.pi / 3, abs=1e-8)


def test_resonant_roots_near_symmetry_points(ctx13):
    r = resonant_roots(ctx13, 1e-5)
    assert has_resonant_structure(r, 1)
    f = resonance_functions(ctx13)
    assert np.max(np.abs(truncated_residual(ctx13, 1e-5, r, f))) < 1e-10


def test_structure_predicate():
    assert has_resonant_structure([0.01, np.pi + 0.02], 1)
    assert not has_resonant_structure([0.01, 0.5, np.pi], 1)
    assert not has_resonant_structure([0.01, 0.02], 1)


def test_boundary_threshold_row():
    r = boundary_threshold(1, 3, mu=1e-3)
    assert 0.005 <= r.e_min < 0.5
    assert r.oracle is None and not r.flagged
