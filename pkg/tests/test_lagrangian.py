"""Extended Lagrangian: homogeneity, Legendre transform, Euler-Lagrange."""

import math

import numpy as np
import pytest

from extphase.errors import DegenerateTimeError
from extphase.lagrangian import (ExtendedVelocityPoint, LagrangianSystem,
                                 euler_lagrange_residual, extended_lagrangian,
                                 homogeneity_residual, legendre_to_h1,
                                 paired_hamiltonian)
from extphase.numkit import Trajectory, value_of


def harmonic():
    return LagrangianSystem(
        n=1, L=lambda q, qdot, t: 0.5 * qdot[0] ** 2 - 0.5 * q[0] ** 2)


PT = ExtendedVelocityPoint(q1=(1.2, 0.3), v1=(0.8, 1.4))


def test_point_validation():
    with pytest.raises(ValueError):
        ExtendedVelocityPoint(q1=(1.0, 2.0), v1=(1.0,))
    with pytest.raises(ValueError):
        ExtendedVelocityPoint(q1=(1.0,), v1=(1.0,))
    assert PT.n == 1


def test_extended_lagrangian_value():
    # L1 = L(q, v/k) * k with k = dt/ds
    got = value_of(extended_lagrangian(harmonic(), PT))
    qdot = 0.8 / 1.4
    assert got == pytest.approx((0.5 * qdot ** 2 - 0.5 * 1.2 ** 2) * 1.4,
                                abs=1e-14)


def test_degenerate_time_rejected():
    with pytest.raises(DegenerateTimeError):
        extended_lagrangian(harmonic(),
                            ExtendedVelocityPoint(q1=(1.0, 0.0),
                                                  v1=(1.0, 0.0)))


def test_homogeneity_and_euler_identity():
    for c in (0.5, 2.0, -3.0):
        scale_res, euler_res = homogeneity_residual(harmonic(), PT, c)
        assert scale_res < 1e-12
        assert euler_res < 1e-12
    with pytest.raises(ValueError):
        homogeneity_residual(harmonic(), PT, 0.0)


def test_legendre_momenta_and_vanishing_h1():
    p, p_np1, h1 = legendre_to_h1(harmonic(), PT)
    qdot = 0.8 / 1.4
    assert value_of(p[0]) == pytest.approx(qdot, abs=1e-13)
    # the time conjugate is -H(q, p, t)
    H = 0.5 * qdot ** 2 + 0.5 * 1.2 ** 2
    assert p_np1 == pytest.approx(-H, abs=1e-13)
    assert abs(h1) < 1e-13


def test_paired_hamiltonian_matches_closed_form():
    sys = paired_hamiltonian(harmonic())
    got = value_of(sys.H((1.2,), (0.7,), 0.0))
    assert got == pytest.approx(0.5 * 0.7 ** 2 + 0.5 * 1.2 ** 2, abs=1e-12)


def exact_trajectory(time_map, dtime_map, s_end=3.0, m=6001):
    """Tabulate the exact orbit q = cos(t(s)) as a dense Trajectory in s."""
    s = np.linspace(0.0, s_end, m)
    t = np.array([time_map(x) for x in s])
    dt = np.array([dtime_map(x) for x in s])
    states = np.column_stack([np.cos(t), t])
    derivs = np.column_stack([-np.sin(t) * dt, dt])
    return Trajectory(s=s, states=states, labels=("q1", "t"), derivs=derivs)


def test_euler_lagrange_residual_reparameterization_invariance():
    sys = harmonic()
    for time_map, dtime_map in (
            (lambda s: s, lambda s: 1.0),
            (lambda s: s ** 3 / 9.0 + 0.1 * s, lambda s: s ** 2 / 3.0 + 0.1),
            (lambda s: math.sinh(s) / 3.0, lambda s: math.cosh(s) / 3.0)):
        tr = exact_trajectory(time_map, dtime_map)
        ext_max, conv_max = euler_lagrange_residual(sys, tr)
        assert ext_max < 1e-6
        assert conv_max < 1e-6


def test_euler_lagrange_flags_non_solution():
    sys = harmonic()
    s = np.linspace(0.0, 3.0, 2001)
    states = np.column_stack([s.copy(), s.copy()])  # q = s is not an orbit
    derivs = np.column_stack([np.ones_like(s), np.ones_like(s)])
    tr = Trajectory(s=s, states=states, labels=("q1", "t"), derivs=derivs)
    ext_max, _ = euler_lagrange_residual(sys, tr)
    assert ext_max > 0.1
