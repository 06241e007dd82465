"""Extended canonical transformations via generating functions F1..F4.

A generating function's value callable takes (x, y, a, b, s) with the block
meaning fixed by its kind:

    F1: (q, q', t, t', s)        F2: (q, p', t, e', s)
    F3: (q', p, t', e, s)        F4: (p, p', e, e', s)

All value callables must use the generic arithmetic of
:mod:`extphase.numkit` so the implicit transformation rules can be solved
and differentiated by dual seeding.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import numkit
from .errors import DegeneracyError, DegenerateTimeError
from .numkit import value_of
from .phase import ExtendedPoint, map_jacobian

KINDS = ("F1", "F2", "F3", "F4")


@dataclass(frozen=True)
class GeneratingFunction:
    kind: str
    value: object  # callable (x, y, a, b, s) -> scalar
    n: int

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown generating-function kind {self.kind!r}")

    def __call__(self, x, y, a, b, s=0.0):
        return self.value(x, y, a, b, s)


@dataclass(frozen=True)
class TransformReport:
    """Probe-based certification of a generated map at one point.

    The flags certify the stated partial-derivative conditions at the probe
    point only (tolerance 1e-10), not globally.  liouville_det is the
    absolute determinant of the full extended Jacobian, which is 1 for any
    canonical map.
    """

    hessian_det: float
    preserves_H1: bool
    time_global: bool
    spacetime_split: bool
    subspace_liouville: bool
    liouville_det: float = 1.0

    def to_json(self):
        return json.dumps({
            "hessian_det": self.hessian_det,
            "preserves_H1": self.preserves_H1,
            "time_global": self.time_global,
            "spacetime_split": self.spacetime_split,
            "subspace_liouville": self.subspace_liouville,
        }, sort_keys=True)


def _partials(F, x, y, a, b, s):
    """Value and first partials of F with respect to all five argument blocks."""
    n = F.n
    v0 = list(x) + list(y) + [a, b, s]

    def f(v):
        return F.value(v[:n], v[n:2 * n], v[2 * n], v[2 * n + 1], v[2 * n + 2])

    val, g = numkit.grad_raw(f, v0)
    return val, g[:n], g[n:2 * n], g[2 * n], g[2 * n + 1], g[2 * n + 2]


def _apply(F, pt, seed=None, max_iter=50):
    """Solve the rule set of F's kind at pt.

    Returns (image point, resolved argument blocks (x, y, a, b)).
    """
    n = pt.n
    if n != F.n:
        raise ValueError(f"dimension mismatch: point has n={n}, F has n={F.n}")
    kind = F.kind
    s = pt.s
    q, p, t, e = list(pt.q), list(pt.p), pt.t, pt.e

    if kind in ("F1", "F2"):
        known_x, known_a = q, t
    else:  # F3, F4: the unprimed block enters through (p, e)
        known_x, known_a = None, None

    if kind == "F2":
        # unknowns (p', e'): p_i = dF/dq_i, e = -dF/dt
        def residual(u):
            _, dx, _, da, _, _ = _partials(F, q, u[:n], t, u[n], s)
            return [dx[i] - p[i] for i in range(n)] + [da + e]
        u0 = seed if seed is not None else p + [e]
        u = numkit.newton_solve(residual, u0, max_iter=max_iter)
        _, _, dy, _, db, _ = _partials(F, q, u[:n], t, u[n], s)
        x_args, y_args, a_arg, b_arg = q, u[:n], t, u[n]
        image = ExtendedPoint(q=tuple(dy), p=tuple(u[:n]), t=-db, e=u[n], s=s)
    elif kind == "F1":
        # unknowns (q', t'): p_i = dF/dq_i, e = -dF/dt
        def residual(u):
            _, dx, _, da, _, _ = _partials(F, q, u[:n], t, u[n], s)
            return [dx[i] - p[i] for i in range(n)] + [da + e]
        u0 = seed if seed is not None else q + [t]
        u = numkit.newton_solve(residual, u0, max_iter=max_iter)
        _, _, dy, _, db, _ = _partials(F, q, u[:n], t, u[n], s)
        x_args, y_args, a_arg, b_arg = q, u[:n], t, u[n]
        image = ExtendedPoint(q=tuple(u[:n]), p=tuple(-g for g in dy),
                              t=u[n], e=db, s=s)
    elif kind == "F3":
        # unknowns (q', t'): q_i = -dF/dp_i, t = dF/de
        def residual(u):
            _, _, dy, _, db, _ = _partials(F, u[:n], p, u[n], e, s)
            return [dy[i] + q[i] for i in range(n)] + [db - t]
        u0 = seed if seed is not None else q + [t]
        u = numkit.newton_solve(residual, u0, max_iter=max_iter)
        _, dx, _, da, _, _ = _partials(F, u[:n], p, u[n], e, s)
        x_args, y_args, a_arg, b_arg = u[:n], p, u[n], e
        image = ExtendedPoint(q=tuple(u[:n]), p=tuple(-g for g in dx),
                              t=u[n], e=da, s=s)
    else:  # F4
        # unknowns (p', e'): q_i = -dF/dp_i, t = dF/de
        def residual(u):
            _, dx, _, da, _, _ = _partials(F, p, u[:n], e, u[n], s)
            return [dx[i] + q[i] for i in range(n)] + [da - t]
        u0 = seed if seed is not None else p + [e]
        u = numkit.newton_solve(residual, u0, max_iter=max_iter)
        _, _, dy, _, db, _ = _partials(F, p, u[:n], e, u[n], s)
        x_args, y_args, a_arg, b_arg = p, u[:n], e, u[n]
        image = ExtendedPoint(q=tuple(dy), p=tuple(u[:n]), t=-db, e=u[n], s=s)

    return image, (x_args, y_args, a_arg, b_arg)


def apply_generating(F, pt, seed=None):
    """Apply the canonical map induced by F to pt (s passes through unchanged).

    Implicit rules are solved by damped Newton from `seed` (defaults to the
    point's own (p, e) or (q, t) block); the branch continuous from the seed
    is returned when multiple solutions exist.
    """
    image, args = _apply(F, pt, seed=seed)
    det = _mixed_hessian_det(F, *args, pt.s)
    if abs(det) < 1e-12:
        raise DegeneracyError(
            f"generating function degenerate at solution (|hessian| = {abs(det):.3e})")
    return image


def _mixed_hessian(F, x, y, a, b, s):
    """The (n+1)x(n+1) mixed block d^2 F / d(x,a) d(y,b) by nested duals."""
    n = F.n
    m = n + 1

    def outer(u):
        def inner(v):
            return F.value(v[:n], u[:n], v[n], u[n], s)

        _, g = numkit.grad_raw(inner, list(x) + [a])
        return g

    _, rows = numkit.jacobian_raw(outer, list(y) + [b])
    return np.array([[value_of(r) for r in row] for row in rows])


def _mixed_hessian_det(F, x, y, a, b, s):
    return float(np.linalg.det(_mixed_hessian(F, x, y, a, b, s)))


def hessian_det(F, pt):
    """Mixed second-derivative determinant of F in its kind's extended variables.

    The unresolved argument block is probed at the point's own (p, e) or
    (q, t) values; nonzero certifies local invertibility of the induced map.
    """
    n = pt.n
    q, p, t, e = list(pt.q), list(pt.p), pt.t, pt.e
    if F.kind == "F1":
        args = (q, q, t, t)
    elif F.kind == "F2":
        args = (q, p, t, e)
    elif F.kind == "F3":
        args = (q, p, t, e)
    else:
        args = (p, p, e, e)
    return _mixed_hessian_det(F, *args, pt.s)


# algebraic offset of each kind's value relative to the F1 form
def _extra(kind, config):
    q, p, t, e, qp, pp, tp, ep = config
    spp = sum(a * b for a, b in zip(qp, pp)) - tp * ep
    sup = sum(a * b for a, b in zip(q, p)) - t * e
    if kind == "F1":
        return 0.0
    if kind == "F2":
        return spp
    if kind == "F3":
        return -sup
    return spp - sup


def legendre_convert(F, target_kind, seed=None):
    """Build an equivalent generating function of another kind.

    The converted value resolves the full transformation configuration from
    its own arguments through the source map (damped Newton) and shifts the
    source value by the appropriate exchange terms.  Unsolvable exchanges
    (e.g. the identity map as F1) surface as :class:`DegeneracyError` when
    the converted function is evaluated or applied.
    """
    if target_kind not in KINDS:
        raise ValueError(f"unknown target kind {target_kind!r}")
    if target_kind == F.kind:
        return F
    n = F.n

    def converted(x, y, a, b, s):
        # decode the target argument blocks
        if target_kind == "F1":
            q_kn, t_kn = list(x), a
            primed = (list(y), b)      # (q', t')
            primed_sel = "qt"
            unknown = "pe"
        elif target_kind == "F2":
            q_kn, t_kn = list(x), a
            primed = (list(y), b)      # (p', e')
            primed_sel = "pe"
            unknown = "pe"
        elif target_kind == "F3":
            p_kn, e_kn = list(y), b
            primed = (list(x), a)      # (q', t')
            primed_sel = "qt"
            unknown = "qt"
        else:  # F4
            p_kn, e_kn = list(x), a
            primed = (list(y), b)      # (p', e')
            primed_sel = "pe"
            unknown = "qt"

        def assemble(u):
            if unknown == "pe":
                return q_kn, list(u[:n]), t_kn, u[n]
            return list(u[:n]), p_kn, u[n], e_kn

        def residual(u):
            q_, p_, t_, e_ = assemble(u)
            img, _ = _apply(F, ExtendedPoint(q=tuple(q_), p=tuple(p_),
                                             t=t_, e=e_, s=s))
            if primed_sel == "qt":
                got = list(img.q) + [img.t]
            else:
                got = list(img.p) + [img.e]
            return [gi - wi for gi, wi in zip(got, primed[0] + [primed[1]])]

        u0 = seed if seed is not None else primed[0] + [primed[1]]
        u = numkit.newton_solve(residual, list(u0))
        q_, p_, t_, e_ = assemble(u)
        img, src_args = _apply(F, ExtendedPoint(q=tuple(q_), p=tuple(p_),
                                                t=t_, e=e_, s=s))
        config = (q_, p_, t_, e_, list(img.q), list(img.p), img.t, img.e)
        src_val = F.value(*src_args, s)
        return src_val - _extra(F.kind, config) + _extra(target_kind, config)

    return GeneratingFunction(kind=target_kind, value=converted, n=n)


def embed_conventional(f2, n):
    """Extend a conventional generating function f2(q, p', t) to the full space.

    The returned F2 induces t' = t and preserves H1; on-shell the
    conventional rule H' = H + df2/dt holds.
    """

    def value(q, pp, t, ep, s):
        return f2(q, pp, t) - t * ep

    return GeneratingFunction(kind="F2", value=value, n=n)


def _dtprime_dt(F, pt):
    def g(v):
        img = apply_generating(F, ExtendedPoint(q=pt.q, p=pt.p, t=v[0],
                                                e=pt.e, s=pt.s))
        return img.t

    _, grad = numkit.grad_raw(g, [pt.t])
    return value_of(grad[0])


def transform_hamiltonian(H, F, pt):
    """Value of the transformed conventional Hamiltonian H' at the image of pt.

    Uses H' = (H - e) / (dt'/dt) + e', valid for s-independent generating
    functions.
    """
    image = apply_generating(F, pt)
    dtp = _dtprime_dt(F, pt)
    if abs(dtp) < 1e-12:
        raise DegenerateTimeError("dt'/dt vanishes at probe point")
    h = H.H(pt.q, pt.p, pt.t)
    return value_of((h - pt.e) / dtp + image.e)


def restriction_report(F, pt, tol=1e-10):
    """Probe the restriction conditions of the induced map at pt."""
    n = pt.n
    M = map_jacobian(lambda z: apply_generating(F, z), pt)
    # ordering (q.., t, p.., -e): q rows/cols 0..n-1, t at n, p at n+1..2n, -e at 2n+1
    it, ie = n, 2 * n + 1
    time_global = all(abs(M[it, j]) <= tol for j in range(n)) and \
        all(abs(M[it, n + 1 + j]) <= tol for j in range(n))
    dep = [abs(M[it, ie])] + [abs(M[j, ie]) for j in range(n)] + \
        [abs(M[n + 1 + j, ie]) for j in range(n)]
    spacetime_split = all(d <= tol for d in dep)
    subspace_liouville = abs(M[it, it] * M[ie, ie] - 1.0) <= tol

    image, args = _apply(F, pt)
    hdet = _mixed_hessian_det(F, *args, pt.s)
    _, _, _, _, _, dFds = _partials(F, *args, pt.s)
    preserves = abs(value_of(dFds)) <= tol
    return TransformReport(
        hessian_det=float(hdet),
        preserves_H1=preserves,
        time_global=bool(time_global),
        spacetime_split=bool(spacetime_split),
        subspace_liouville=bool(subspace_liouville),
        liouville_det=float(abs(np.linalg.det(M))),
    )


def extended_identity(n):
    """The extended identity generating function F2 = q.p' - t e'."""

    def value(q, pp, t, ep, s):
        return sum(a * b for a, b in zip(q, pp)) - t * ep

    return GeneratingFunction(kind="F2", value=value, n=n)
