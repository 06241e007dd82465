"""Extended phase space T*Q1: lifting, canonical equations, brackets, symplecticity.

Coordinate convention used throughout for Jacobians and the symplectic
matrix: z = (q^1..q^n, t, p_1..p_n, -e).  The energy value e itself is
stored with a plus sign on :class:`ExtendedPoint`; the sign flip happens
only where the conjugate-momentum role matters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import numkit
from .errors import DomainEvaluationError
from .numkit import IntegratorOptions, Trajectory, value_of


@dataclass(frozen=True)
class ExtendedPoint:
    """One point of T*Q1 plus the evolution parameter s.

    t is the canonical coordinate q^{n+1}; e is the energy value, with
    p_{n+1} = -e.  Points may lie off the H1 = 0 shell; that is monitored,
    not enforced.
    """

    q: tuple
    p: tuple
    t: float
    e: float
    s: float = 0.0

    def __post_init__(self):
        if len(self.q) != len(self.p) or len(self.q) < 1:
            raise ValueError("q and p must have equal positive dimension")
        object.__setattr__(self, "q", tuple(self.q))
        object.__setattr__(self, "p", tuple(self.p))

    @property
    def n(self):
        return len(self.q)

    def on_shell(self, sys, tol=1e-10):
        return abs(value_of(sys.H(self.q, self.p, self.t) - self.e)) <= tol


@dataclass(frozen=True)
class HamiltonianSystem:
    """A differentiable scalar field H(q, p, t) of dimension n.

    H must be written with the generic arithmetic of :mod:`extphase.numkit`
    so it can be differentiated by dual seeding.
    """

    n: int
    H: object  # callable (q, p, t) -> scalar
    description: str = ""

    def __call__(self, q, p, t):
        return self.H(q, p, t)


@dataclass(frozen=True)
class Parameterization:
    """The caller-supplied scaling field k = dt/ds; k may vanish or go negative."""

    k: object  # callable (s, ExtendedPoint) -> scalar

    @staticmethod
    def constant(value=1.0):
        return Parameterization(k=lambda s, pt: value)


@dataclass(frozen=True)
class DerivativeRecord:
    dq: tuple
    dp: tuple
    dt: float
    de: float


def lift(q, p, t, sys):
    """Map (q, p, t) to the extended point with e = H(q, p, t) and s = 0."""
    q, p = tuple(q), tuple(p)
    if len(q) != sys.n:
        raise ValueError(f"dimension mismatch: expected n={sys.n}")
    e = sys.H(q, p, t)
    if not math.isfinite(value_of(e)):
        raise DomainEvaluationError(f"H not finite at lift point (q={q}, p={p}, t={t})")
    return ExtendedPoint(q=q, p=p, t=t, e=e, s=0.0)


def extended_value(pt, k, sys):
    """H1 = k (H(q,p,t) - e); zero on-shell for any k."""
    h = sys.H(pt.q, pt.p, pt.t)
    if not math.isfinite(value_of(h)):
        raise DomainEvaluationError("H not finite at evaluation point")
    return k * (h - pt.e)


def _h_gradient(sys, q, p, t):
    n = len(q)

    def f(x):
        return sys.H(x[:n], x[n:2 * n], x[2 * n])

    val, grad = numkit.grad_raw(f, list(q) + list(p) + [t])
    return val, grad[:n], grad[n:2 * n], grad[2 * n]


def extended_rhs(pt, k, sys):
    """Right-hand side of the extended canonical equations at one point."""
    _, dHdq, dHdp, dHdt = _h_gradient(sys, pt.q, pt.p, pt.t)
    for g in dHdq + dHdp + [dHdt]:
        if not math.isfinite(value_of(g)):
            raise DomainEvaluationError("H derivative not finite")
    return DerivativeRecord(
        dq=tuple(k * g for g in dHdp),
        dp=tuple(-k * g for g in dHdq),
        dt=k,
        de=k * dHdt,
    )


def trajectory_labels(n):
    return tuple(f"q{i+1}" for i in range(n)) + tuple(f"p{i+1}" for i in range(n)) \
        + ("t", "e")


def state_to_point(state, n, s=0.0):
    return ExtendedPoint(q=tuple(state[:n]), p=tuple(state[n:2 * n]),
                         t=state[2 * n], e=state[2 * n + 1], s=s)


def point_to_state(pt):
    return list(pt.q) + list(pt.p) + [pt.t, pt.e]


def propagate(pt0, sys, par, s_span, opts=None):
    """Integrate the extended canonical equations over s_span = (s0, s1).

    The trajectory state is (q.., p.., t, e); extended_value is constant
    along it, and on-shell starts stay on-shell to integration tolerance.
    """
    if opts is None:
        opts = IntegratorOptions()
    n = pt0.n
    s0, s1 = s_span

    def rhs(s, y):
        pt = state_to_point(y, n, s=s)
        k = par.k(s, pt)
        rec = extended_rhs(pt, k, sys)
        return list(rec.dq) + list(rec.dp) + [rec.dt, rec.de]

    return numkit.integrate(rhs, point_to_state(pt0), s0, s1, opts,
                            labels=trajectory_labels(n))


def poisson_extended(F, G, pt):
    """Extended Poisson bracket {F, G}_e at one point.

    F, G are scalar fields taking (q, p, t, e) with generic arithmetic.
    """
    n = pt.n

    def flat(H):
        def h(x):
            return H(x[:n], x[n:2 * n], x[2 * n], x[2 * n + 1])
        return h

    x0 = list(pt.q) + list(pt.p) + [pt.t, pt.e]
    _, gF = numkit.grad_raw(flat(F), x0)
    _, gG = numkit.grad_raw(flat(G), x0)
    acc = 0.0
    for i in range(n):
        acc = acc + gF[i] * gG[n + i] - gF[n + i] * gG[i]
    acc = acc - gF[2 * n] * gG[2 * n + 1] + gF[2 * n + 1] * gG[2 * n]
    return acc


def symplectic_matrix(n):
    """The standard (2n+2)x(2n+2) J for the ordering (q.., t, p.., -e)."""
    m = n + 1
    J = np.zeros((2 * m, 2 * m))
    J[:m, m:] = np.eye(m)
    J[m:, :m] = -np.eye(m)
    return J


def map_jacobian(map_fn, pt):
    """Jacobian of a smooth extended-coordinate map in (q.., t, p.., -e) ordering.

    map_fn takes and returns an ExtendedPoint and must be generic over dual
    coordinates, including any implicit solves it performs internally.
    """
    n = pt.n
    z0 = list(pt.q) + [pt.t] + list(pt.p) + [-pt.e]

    def fvec(z):
        src = ExtendedPoint(q=tuple(z[:n]), p=tuple(z[n + 1:2 * n + 1]),
                            t=z[n], e=-z[2 * n + 1], s=pt.s)
        img = map_fn(src)
        return list(img.q) + [img.t] + list(img.p) + [-img.e]

    _, rows = numkit.jacobian_raw(fvec, z0)
    return np.array([[value_of(v) for v in row] for row in rows])


def symplectic_residual(map_fn, pt):
    """Max-norm of M^T J M - J for the map's Jacobian M at pt; zero iff canonical."""
    M = map_jacobian(map_fn, pt)
    J = symplectic_matrix(pt.n)
    return float(np.max(np.abs(M.T @ J @ M - J)))
