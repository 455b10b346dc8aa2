"""Horizontal path integration: the ODE side of the metric, the bridge
identity to the line-integral side, and the samplers built on it."""

import math

import numpy as np
import pytest

from ccstruct.ccpath import (ControlSignal, ball_volume_mc,
                             control_from_polygon, integrate_path,
                             loop_displacement, random_control,
                             sample_lambda_direct)
from ccstruct.density import (ConstantDensity, PolynomialPotential,
                              ZeroDensity)
from ccstruct.geometry import circle_curve, polygon_curve
from ccstruct.structure import lambda_sup

P_Z2 = PolynomialPotential({(1, 1): 1.0})
P_Z4 = PolynomialPotential({(2, 2): 1.0})


# ---------------------------------------------------------------------------
# control signals

def test_control_validation():
    with pytest.raises(ValueError):
        ControlSignal((0.0, 1.0), ())                       # no values
    with pytest.raises(ValueError):
        ControlSignal((0.0, 0.5), ((0.1, 0.1),))            # not spanning
    with pytest.raises(ValueError):
        ControlSignal((0.0, 1.0), ((1.0, 1.0),))            # speed > 1


def test_random_control_respects_constraint():
    rng = np.random.default_rng(0)
    c = random_control(rng, 8)
    assert c.n_intervals == 8
    assert all(a * a + b * b <= 1 + 1e-12 for a, b in c.values)


# ---------------------------------------------------------------------------
# integration

def test_zero_control_stays_put():
    c = ControlSignal((0.0, 1.0), ((0.0, 0.0),))
    traj = integrate_path(P_Z2, (1.0, 2.0, 3.0), c, 5.0)
    assert traj.end == pytest.approx((1.0, 2.0, 3.0))


def test_straight_control_planar_part():
    c = ControlSignal((0.0, 1.0), ((0.5, 0.0),))
    traj = integrate_path(P_Z2, (0.0, 1.0, 0.0), c, 2.0)
    x, y, _ = traj.end
    assert x == pytest.approx(1.0, abs=1e-12)   # x advances by 0.5 * delta
    assert y == pytest.approx(1.0, abs=1e-12)   # y unchanged


def test_t_translation_invariance():
    rng = np.random.default_rng(5)
    c = random_control(rng, 4)
    t0 = integrate_path(P_Z2, (0.5, -0.5, 0.0), c, 1.5)
    t7 = integrate_path(P_Z2, (0.5, -0.5, 7.0), c, 1.5)
    assert np.allclose(t7.states[:, :2], t0.states[:, :2])
    assert np.allclose(t7.states[:, 2], t0.states[:, 2] + 7.0)


def test_square_loop_displacement():
    # clockwise square of side a under P = |z|^2: lifted displacement
    # equals mass 4 a^2
    a = 0.8
    vs = [0, a * 1j, a + a * 1j, a + 0j]    # clockwise
    perim = 4 * a
    control = control_from_polygon(vs, perim)
    traj = integrate_path(P_Z2, (0.0, 0.0, 0.0), control, perim, steps=64)
    assert traj.end[2] == pytest.approx(4 * a * a, abs=1e-8)


# ---------------------------------------------------------------------------
# bridge identity

def test_loop_displacement_is_line_integral():
    loop = circle_curve(0.5 + 0.5j, 1.0)
    assert loop_displacement(P_Z2, loop) == pytest.approx(4 * math.pi,
                                                          rel=1e-8)


def test_loop_reversal_antisymmetry():
    loop = circle_curve(1 + 0j, 0.7)
    assert loop_displacement(P_Z2, loop.reversed()) == pytest.approx(
        -loop_displacement(P_Z2, loop), rel=1e-9)


@pytest.mark.parametrize("field", [P_Z2, P_Z4])
def test_bridge_identity_random_loops(field):
    rng = np.random.default_rng(17)
    for _ in range(10):
        k = int(rng.integers(3, 7))
        ang = np.sort(rng.uniform(0, 2 * math.pi, k))
        vs = [rng.uniform(0.3, 1.0) * complex(math.cos(t), math.sin(t))
              for t in ang]
        perim = sum(abs(w - v) for v, w in zip(vs, vs[1:] + vs[:1]))
        control = control_from_polygon(vs, perim * 1.5)
        traj = integrate_path(field, (vs[0].real, vs[0].imag, 0.0),
                              control, perim * 1.5, steps=48)
        line = loop_displacement(field, polygon_curve(vs))
        assert abs(traj.end[2] - line) <= 1e-6


# ---------------------------------------------------------------------------
# direct sampler

def test_direct_sampler_isoperimetric_optimum():
    # constant density: the best loop of length delta is a single circle
    # of radius delta/(2 pi), displacement delta^2 / pi
    f = ConstantDensity(4.0)
    for d in (1.0, 3.0):
        est = sample_lambda_direct(f, 0.5 - 0.5j, d, seed=2)
        target = d * d / math.pi
        assert 0.8 * target <= est.value <= target * (1 + 1e-9)
        assert est.value <= lambda_sup(f, 0.5 - 0.5j, d).value


def test_direct_sampler_zero_density():
    est = sample_lambda_direct(ZeroDensity(), 0j, 1.0, seed=0)
    assert est.value == 0.0


def test_direct_sampler_reproducible():
    f = PolynomialPotential({(1, 1): 1.0, (2, 2): 0.5})
    a = sample_lambda_direct(f, 1 + 0j, 2.0, seed=42)
    b = sample_lambda_direct(f, 1 + 0j, 2.0, seed=42)
    assert a.value == b.value


def test_direct_below_sup_across_fields():
    for f in (ConstantDensity(4.0), P_Z4):
        for seed in (0, 1):
            est = sample_lambda_direct(f, 1 + 1j, 2.0, seed=seed)
            assert est.value <= lambda_sup(f, 1 + 1j, 2.0).value + 1e-9


# ---------------------------------------------------------------------------
# Monte-Carlo ball volume

def test_ball_volume_zero_density():
    est, _ = ball_volume_mc(ZeroDensity(), 0j, 0.0, 1.0, n_paths=1000,
                            seed=0)
    assert est == pytest.approx(0.0, abs=1e-250)


def test_ball_volume_nondecreasing_in_delta():
    f = ConstantDensity(4.0)
    e1, _ = ball_volume_mc(f, 0j, 0.0, 1.0, n_paths=2000, seed=3)
    e2, _ = ball_volume_mc(f, 0j, 0.0, 2.0, n_paths=2000, seed=3)
    assert e2 >= e1


def test_ball_volume_requires_enough_paths():
    with pytest.raises(ValueError):
        ball_volume_mc(ConstantDensity(1.0), 0j, 0.0, 1.0, n_paths=10)
