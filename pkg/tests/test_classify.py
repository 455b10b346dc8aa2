"""UGS classification: condition checks, slope fits, verdict logic."""

import math

import numpy as np
import pytest

from ccstruct.classify import (CLASSIFY_OPTS, Window, check_linear_conditions,
                               check_quadratic_conditions, dichotomy_probe,
                               doubling_ratio, fit_loglog_slope, track_slope)
from ccstruct.density import (ConstantDensity, PolynomialPotential,
                              RadialAlphaDensity, ZeroDensity,
                              decaying_bump_lattice)

SMALL_WINDOW = Window(-2, -2, 2, 2, 3)


def test_window_validation():
    with pytest.raises(ValueError):
        Window(1, 0, 0, 1, 3)
    assert len(Window(-1, -1, 1, 1, 3).points()) == 9


def test_fit_loglog_slope_power_law():
    d = np.geomspace(1, 100, 8)
    assert fit_loglog_slope(d, 3.0 * d ** 1.7) == pytest.approx(1.7,
                                                                abs=1e-12)
    assert math.isnan(fit_loglog_slope([1.0], [2.0]))


# ---------------------------------------------------------------------------
# linear conditions

def test_linear_a_fails_for_constant():
    # mu/delta = 4 pi delta grows linearly: clear trend
    a, _ = check_linear_conditions(ConstantDensity(4.0), SMALL_WINDOW,
                                   np.geomspace(1, 100, 7))
    assert a.verdict == "fail"
    assert a.context["trend_slope"] == pytest.approx(1.0, abs=1e-6)


def test_linear_b_fails_for_zero():
    _, b = check_linear_conditions(ZeroDensity(), SMALL_WINDOW,
                                   np.geomspace(1, 100, 7))
    assert b.verdict == "fail"
    assert b.statistic == 0.0


def test_linear_passes_for_decaying_lattice():
    f = decaying_bump_lattice(70)
    a, b = check_linear_conditions(f, Window(-20, -20, 20, 20, 3),
                                   np.geomspace(0.4, 40, 9))
    assert a.verdict == "pass"
    assert b.verdict == "pass"
    assert b.statistic > 0


# ---------------------------------------------------------------------------
# quadratic conditions

def test_quadratic_passes_for_constant():
    a, b = check_quadratic_conditions(ConstantDensity(4.0), SMALL_WINDOW,
                                      np.geomspace(1, 100, 7))
    assert a.verdict == "pass" and b.verdict == "pass"
    assert b.statistic == pytest.approx(1.0, rel=1e-9)   # band ratio


def test_quadratic_fails_for_radial_alpha():
    # mu(0, delta)/delta^2 decays like delta^(-alpha): drift, not a band
    a, b = check_quadratic_conditions(RadialAlphaDensity(0.5), SMALL_WINDOW,
                                      np.geomspace(1, 1000, 8))
    assert b.verdict == "fail"


def test_quadratic_fails_for_z4():
    # mu(z, delta)/delta^2 grows with |z| at fixed delta: no uniform band
    f = PolynomialPotential({(2, 2): 1.0})
    a, b = check_quadratic_conditions(f, Window(-10, -10, 10, 10, 3),
                                      np.geomspace(0.5, 50, 8))
    assert b.verdict == "fail"


# ---------------------------------------------------------------------------
# dichotomy probe

def test_probe_constant_quadratic():
    rep = dichotomy_probe(ConstantDensity(4.0), SMALL_WINDOW,
                          np.geomspace(1, 100, 7))
    assert rep.verdict == "Quadratic"
    for s in rep.slopes.values():
        assert s == pytest.approx(2.0, abs=0.02)
    assert rep.slope_spread <= 0.02


def test_probe_radial_alpha_no_ugs():
    rep = dichotomy_probe(RadialAlphaDensity(0.5), Window(-5, -5, 5, 5, 3),
                          np.geomspace(1, 1000, 8))
    assert rep.verdict == "NoUGS"
    # growth exponent 2 - alpha = 1.5: outside both admissible bands
    mean = np.mean(list(rep.slopes.values()))
    assert 1.3 <= mean <= 1.7


def test_probe_z4_no_ugs():
    f = PolynomialPotential({(2, 2): 1.0})
    rep = dichotomy_probe(f, Window(-10, -10, 10, 10, 3),
                          np.geomspace(0.5, 50, 8))
    assert rep.verdict == "NoUGS"
    assert rep.slope_spread > 0.3


def test_probe_short_ladder_inconclusive():
    rep = dichotomy_probe(ConstantDensity(4.0), SMALL_WINDOW, [1.0, 2.0])
    assert rep.verdict == "Inconclusive"
    assert "reason" in rep.meta


def test_probe_mutual_exclusion():
    # at most one of Linear/Quadratic on every probed field
    for f in (ConstantDensity(4.0), RadialAlphaDensity(0.5)):
        rep = dichotomy_probe(f, SMALL_WINDOW, np.geomspace(1, 200, 7))
        assert rep.verdict in ("Linear", "Quadratic", "NoUGS",
                               "Inconclusive")


def test_probe_scaling_covariance():
    # scaling the density must not change the verdict or the slopes
    rep1 = dichotomy_probe(ConstantDensity(1.0), SMALL_WINDOW,
                           np.geomspace(1, 100, 7))
    rep5 = dichotomy_probe(ConstantDensity(5.0), SMALL_WINDOW,
                           np.geomspace(1, 100, 7))
    assert rep1.verdict == rep5.verdict == "Quadratic"
    for z in rep1.slopes:
        assert rep1.slopes[z] == pytest.approx(rep5.slopes[z], abs=1e-9)


def test_track_slope_radial_alpha():
    f = RadialAlphaDensity(0.5)
    deltas = np.geomspace(100, 10000, 6)
    s = track_slope(f, lambda d: complex(d ** 1.5), deltas)
    assert s <= 2 - 3 * 0.5 / 2 + 0.1     # moving base point slows growth


# ---------------------------------------------------------------------------
# doubling ratios

def test_doubling_constant_is_four():
    rows = doubling_ratio(ConstantDensity(4.0), SMALL_WINDOW,
                          [1.0, 2.0, 4.0, 8.0])
    assert len(rows) == 3   # (1,2), (2,4), (4,8)
    for row in rows:
        assert row["max_ratio"] == pytest.approx(4.0, abs=0.05)
        assert not row["flagged"]


def test_doubling_zero_density_skipped():
    rows = doubling_ratio(ZeroDensity(), SMALL_WINDOW, [1.0, 2.0])
    assert len(rows) == 1
    assert math.isnan(rows[0]["max_ratio"])
    assert rows[0]["skipped"] == len(SMALL_WINDOW.points())


def test_doubling_lattice_within_chain_bound():
    f = decaying_bump_lattice(30)
    rows = doubling_ratio(f, Window(-5, -5, 5, 5, 2),
                          [2.0, 4.0, 8.0], opts=CLASSIFY_OPTS)
    for row in rows:
        assert 1.0 <= row["max_ratio"] <= 49.0
        assert not row["flagged"]
