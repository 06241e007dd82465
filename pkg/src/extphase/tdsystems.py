"""Mapping time-dependent systems to autonomous ones.

Two workhorses: the damped time-dependent harmonic oscillator, whose
canonical image is an undamped constant-frequency oscillator (giving the
Leach invariant and the antisymmetric I tensor), and the general
time-dependent potential, whose auxiliary third-order system has a
unit-Wronskian transfer matrix mapping the triple (e, -q.p/2, q^2/4) back
to its initial values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import numkit
from .errors import (CoefficientSingularityError, DomainEvaluationError,
                     UnphysicalMapError)
from .numkit import IntegratorOptions, Trajectory, exp, sqrt, value_of
from .phase import ExtendedPoint, HamiltonianSystem

_Q2_FLOOR = 1e-12


def time_derivative(fn, order=1):
    """Return d^order fn / dt^order as a callable, by repeated dual seeding."""
    if order == 0:
        return fn
    g = time_derivative(fn, order - 1)

    def h(t):
        _, grad = numkit.grad_raw(lambda v: g(v[0]), [t])
        return grad[0]

    return h


@dataclass(frozen=True)
class OscillatorSpec:
    """H = e^{-F(t)} p^2/2 + e^{F(t)} omega^2(t) q^2/2 in n dimensions.

    F is the damping integral; f = dF/dt and its derivatives are produced
    by dual differentiation, so F is the single source of truth.
    """

    n: int
    omega2: object  # callable t -> omega^2(t)
    F: object       # callable t -> F(t)

    def coefficients(self, t):
        """(omega2, d(omega2)/dt, F, f, fdot, fddot) at time t."""
        w2 = self.omega2(t)
        dw2 = time_derivative(self.omega2)(t)
        Fv = self.F(t)
        f = time_derivative(self.F)(t)
        fd = time_derivative(self.F, 2)(t)
        fdd = time_derivative(self.F, 3)(t)
        return w2, dw2, Fv, f, fd, fdd

    def system(self):
        def H(q, p, t):
            Fv = self.F(t)
            w2 = self.omega2(t)
            return 0.5 * exp(-Fv) * sum(pi * pi for pi in p) \
                + 0.5 * exp(Fv) * w2 * sum(qi * qi for qi in q)
        return HamiltonianSystem(n=self.n, H=H,
                                 description="TD damped oscillator")

    def omega0_squared(self, xs, t=0.0):
        """The constant omega_0^2 determined by a xi solution:
        xi xidd / 2 - xid^2 / 4 + xi^2 (omega^2 - fdot/2 - f^2/4)."""
        w2, _, _, f, fd, _ = self.coefficients(t)
        return 0.5 * xs.xi * xs.xiddot - 0.25 * xs.xidot ** 2 \
            + xs.xi ** 2 * (w2 - 0.5 * fd - 0.25 * f ** 2)


@dataclass(frozen=True)
class PotentialSpec:
    """H = p^2/2 + V(q, t); gradV and dVdt must be consistent with V."""

    n: int
    V: object      # callable (q, t) -> scalar
    gradV: object  # callable (q, t) -> n components
    dVdt: object   # callable (q, t) -> scalar

    @staticmethod
    def from_potential(n, V):
        """Derive gradV and dVdt from V by dual seeding."""

        def gradV(q, t):
            _, g = numkit.grad_raw(lambda v: V(v[:n], v[n]), list(q) + [t])
            return tuple(g[:n])

        def dVdt(q, t):
            _, g = numkit.grad_raw(lambda v: V(v[:n], v[n]), list(q) + [t])
            return g[n]

        return PotentialSpec(n=n, V=V, gradV=gradV, dVdt=dVdt)

    def consistency_residual(self, q, t):
        """Max disagreement of (gradV, dVdt) with dual derivatives of V."""
        n = self.n
        _, g = numkit.grad_raw(lambda v: self.V(v[:n], v[n]), list(q) + [t])
        res = max(abs(value_of(a - b))
                  for a, b in zip(self.gradV(q, t), g[:n]))
        return max(res, abs(value_of(self.dVdt(q, t) - g[n])))

    def system(self):
        def H(q, p, t):
            return 0.5 * sum(pi * pi for pi in p) + self.V(q, t)
        return HamiltonianSystem(n=self.n, H=H,
                                 description="general TD potential")


@dataclass(frozen=True)
class XiState:
    """One point of the auxiliary system: (xi, xidot, xiddot)."""

    xi: float
    xidot: float
    xiddot: float


@dataclass(frozen=True)
class TransferMatrix:
    """Fundamental-solution matrix at time t; columns are the three
    solutions seeded by the identity, rows their 0th/1st/2nd derivatives."""

    Xi: np.ndarray
    t: float

    @property
    def det(self):
        return float(np.linalg.det(self.Xi))


def _h_rhs(sys, t, y):
    n = sys.n

    def f(x):
        return sys.H(x[:n], x[n:2 * n], x[2 * n])

    _, g = numkit.grad_raw(f, list(y[:2 * n]) + [t])
    dq = [g[n + i] for i in range(n)]
    dp = [-g[i] for i in range(n)]
    return dq, dp, g[2 * n]


def oscillator_propagate(spec: OscillatorSpec, q0, p0, t_span, opts=None):
    """Canonical propagation of the oscillator with e tracked via de/dt = dH/dt."""
    if opts is None:
        opts = IntegratorOptions()
    n = spec.n
    if len(q0) != n or len(p0) != n:
        raise ValueError("initial state dimension mismatch")
    sys = spec.system()
    e0 = sys.H(tuple(q0), tuple(p0), t_span[0])

    def rhs(t, y):
        dq, dp, dHdt = _h_rhs(sys, t, y)
        return dq + dp + [dHdt]

    labels = tuple(f"q{i+1}" for i in range(n)) \
        + tuple(f"p{i+1}" for i in range(n)) + ("e",)
    return numkit.integrate(rhs, list(q0) + list(p0) + [e0],
                            t_span[0], t_span[1], opts, labels=labels)


def xi_oscillator_rhs(spec: OscillatorSpec, t, xs: XiState) -> XiState:
    """Derivative triple of the linear third-order auxiliary equation:

    xiddd = -xid (4 omega^2 - 2 fdot - f^2) - xi (2 d(omega^2)/dt - fddot - f fdot)
    """
    w2, dw2, _, f, fd, fdd = spec.coefficients(t)
    for v in (w2, dw2, f, fd, fdd):
        if not math.isfinite(value_of(v)):
            raise DomainEvaluationError("oscillator coefficients not finite")
    xddd = -xs.xidot * (4.0 * w2 - 2.0 * fd - f * f) \
        - xs.xi * (2.0 * dw2 - fdd - f * fd)
    return XiState(xi=xs.xidot, xidot=xs.xiddot, xiddot=xddd)


def leach_invariant(spec: OscillatorSpec, state, xs: XiState):
    """e' = e^{-F} xi p^2/2 - (xid - xi f) q.p / 2
    + e^{F} (xidd - xid f - xi fdot + 2 xi omega^2) q^2 / 4.

    Constant along trajectories when xs solves the auxiliary equation;
    reduces to the energy for constant omega, f = 0, xi = 1.
    """
    q, p, t, _ = state
    w2, _, Fv, f, fd, _ = spec.coefficients(t)
    q2 = sum(x * x for x in q)
    p2 = sum(x * x for x in p)
    qp = sum(a * b for a, b in zip(q, p))
    return 0.5 * exp(-Fv) * xs.xi * p2 \
        - 0.5 * (xs.xidot - xs.xi * f) * qp \
        + 0.25 * exp(Fv) * (xs.xiddot - xs.xidot * f - xs.xi * fd
                            + 2.0 * xs.xi * w2) * q2


def xi_positivity_residual(spec: OscillatorSpec, state, xs: XiState):
    """Defect of 2 e' e^{-F} xi = omega0^2 q^2 + [xi e^{-F} p - (xid - xi f) q / 2]^2.

    The right side is nonnegative, which is why xi stays positive."""
    q, p, t, _ = state
    _, _, Fv, f, _, _ = spec.coefficients(t)
    ep = leach_invariant(spec, state, xs)
    w02 = spec.omega0_squared(xs, t)
    q2 = sum(x * x for x in q)
    rhs = w02 * q2 + sum((xs.xi * exp(-Fv) * pi
                          - 0.5 * (xs.xidot - xs.xi * f) * qi) ** 2
                         for qi, pi in zip(q, p))
    return abs(value_of(2.0 * ep * exp(-Fv) * xs.xi - rhs))


def angular_invariants(q, p):
    """The antisymmetric matrix I[i][j] = p_i q_j - p_j q_i (empty for n < 2)."""
    n = len(q)
    if n < 2:
        return np.zeros((0, 0))
    I = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            I[i, j] = value_of(p[i] * q[j] - p[j] * q[i])
    return I


def oscillator_canonical_map(spec: OscillatorSpec, state, xs: XiState,
                             tprime=0.0) -> ExtendedPoint:
    """Image of (q, p, t, e) under the oscillator transformation.

    q' = sqrt(e^F/xi) q; p' = -(xid - xi f) sqrt(e^F/xi) q / 2 + sqrt(xi/e^F) p;
    e' = xi e - (xid - xi f) q.p / 2 + e^F (xidd - xid f - xi fdot) q^2 / 4.
    The transformed time t' = integral_0^t dtau/xi depends on the whole xi
    history, so it is supplied by the caller (from co-integration).
    """
    q, p, t, e = state
    if value_of(xs.xi) <= 0:
        raise UnphysicalMapError(f"xi = {value_of(xs.xi)!r} <= 0")
    _, _, Fv, f, fd, _ = spec.coefficients(t)
    a = sqrt(exp(Fv) / xs.xi)
    qp = sum(x * y for x, y in zip(q, p))
    q2 = sum(x * x for x in q)
    qs = tuple(a * qi for qi in q)
    ps = tuple(-0.5 * (xs.xidot - xs.xi * f) * a * qi + pi / a
               for qi, pi in zip(q, p))
    ep = xs.xi * e - 0.5 * (xs.xidot - xs.xi * f) * qp \
        + 0.25 * exp(Fv) * (xs.xiddot - xs.xidot * f - xs.xi * fd) * q2
    return ExtendedPoint(q=qs, p=ps, t=tprime, e=ep, s=0.0)


def oscillator_map_function(spec: OscillatorSpec, xi_fn):
    """The oscillator map as a smooth ExtendedPoint -> ExtendedPoint function.

    xi_fn must be a closed-form solution of the auxiliary equation; its
    derivatives and the time integral are produced numerically, so the
    returned map can be differentiated for symplecticity checks.
    """
    xid_fn = time_derivative(xi_fn)
    xidd_fn = time_derivative(xi_fn, 2)

    def mapped(pt):
        xs = XiState(xi=xi_fn(pt.t), xidot=xid_fn(pt.t),
                     xiddot=xidd_fn(pt.t))
        tp = numkit.quad_fixed(lambda tau: 1.0 / xi_fn(tau), 0.0, pt.t)
        img = oscillator_canonical_map(spec, (pt.q, pt.p, pt.t, pt.e),
                                       xs, tprime=tp)
        return ExtendedPoint(q=img.q, p=img.p, t=img.t, e=img.e, s=pt.s)

    return mapped


def oscillator_coupled_run(spec: OscillatorSpec, q0, p0, xi0: XiState,
                           t_span, opts=None):
    """Co-integrate the oscillator with one auxiliary xi solution.

    State layout: (q.., p.., e, xi, xid, xidd, tprime) with
    dtprime/dt = 1/xi.  This closes the auxiliary equation jointly with the
    canonical equations, which is the only way its coefficients are defined.
    """
    if opts is None:
        opts = IntegratorOptions()
    n = spec.n
    sys = spec.system()
    e0 = sys.H(tuple(q0), tuple(p0), t_span[0])

    def rhs(t, y):
        dq, dp, dHdt = _h_rhs(sys, t, y)
        xs = XiState(xi=y[2 * n + 1], xidot=y[2 * n + 2], xiddot=y[2 * n + 3])
        dxs = xi_oscillator_rhs(spec, t, xs)
        xi = y[2 * n + 1]
        if xi <= 0:
            return [math.nan] * (2 * n + 5)
        return dq + dp + [dHdt, value_of(dxs.xi), value_of(dxs.xidot),
                          value_of(dxs.xiddot), 1.0 / xi]

    labels = tuple(f"q{i+1}" for i in range(n)) \
        + tuple(f"p{i+1}" for i in range(n)) \
        + ("e", "xi", "xid", "xidd", "tprime")
    y0 = list(q0) + list(p0) + [e0, xi0.xi, xi0.xidot, xi0.xiddot, 0.0]
    return numkit.integrate(rhs, y0, t_span[0], t_span[1], opts, labels=labels)


def xi_general_rhs(spec: PotentialSpec, traj_point) -> np.ndarray:
    """Companion matrix A(t) of the auxiliary system for a general potential.

    g1 = (4/q^2) dV/dt, g2 = (4/q^2) [V + q.gradV/2]; last row
    (-g1, -g2, 0); the trace is zero regardless of V.
    """
    q, t = traj_point
    q2 = sum(value_of(x) ** 2 for x in q)
    if q2 < _Q2_FLOOR:
        raise CoefficientSingularityError(
            f"q^2 = {q2:.3e} below floor {_Q2_FLOOR}; trajectory too close to origin")
    g1 = 4.0 / q2 * value_of(spec.dVdt(q, t))
    g2 = 4.0 / q2 * value_of(spec.V(q, t)
                             + 0.5 * sum(a * b for a, b in
                                         zip(q, spec.gradV(q, t))))
    return np.array([[0.0, 1.0, 0.0],
                     [0.0, 0.0, 1.0],
                     [-g1, -g2, 0.0]])


def invariant_triple(q, p, e):
    """The vector (e, -q.p/2, q^2/4) that the transfer matrix maps linearly."""
    qp = sum(value_of(a) * value_of(b) for a, b in zip(q, p))
    q2 = sum(value_of(a) ** 2 for a in q)
    return np.array([value_of(e), -0.5 * qp, 0.25 * q2])


def transfer_matrix(spec: PotentialSpec, q0, p0, t_span, opts=None):
    """Co-integrate the canonical equations with the three fundamental
    xi solutions seeded by the identity.

    Returns (Trajectory, list of TransferMatrix).  State layout:
    (q.., p.., e, Xi row-major).  At every time,
    Xi^T (e, -q.p/2, q^2/4) equals the initial triple.
    """
    if opts is None:
        opts = IntegratorOptions()
    n = spec.n
    if len(q0) != n or len(p0) != n:
        raise ValueError("initial state dimension mismatch")
    sys = spec.system()
    e0 = sys.H(tuple(q0), tuple(p0), t_span[0])

    def rhs(t, y):
        dq, dp, dHdt = _h_rhs(sys, t, y)
        q = tuple(y[:n])
        A = xi_general_rhs(spec, (tuple(value_of(x) for x in q), value_of(t)))
        Xi = np.array([[value_of(y[2 * n + 1 + 3 * r + c])
                        for c in range(3)] for r in range(3)])
        dXi = A @ Xi
        return dq + dp + [dHdt] + [dXi[r, c] for r in range(3)
                                   for c in range(3)]

    labels = tuple(f"q{i+1}" for i in range(n)) \
        + tuple(f"p{i+1}" for i in range(n)) + ("e",) \
        + tuple(f"xi{r+1}{c+1}" for r in range(3) for c in range(3))
    y0 = list(q0) + list(p0) + [e0] + [1.0, 0.0, 0.0,
                                       0.0, 1.0, 0.0,
                                       0.0, 0.0, 1.0]
    traj = numkit.integrate(rhs, y0, t_span[0], t_span[1], opts,
                            labels=labels)
    mats = [TransferMatrix(
        Xi=np.array([[traj.states[k, 2 * n + 1 + 3 * r + c]
                      for c in range(3)] for r in range(3)]),
        t=float(traj.s[k])) for k in range(traj.states.shape[0])]
    return traj, mats
