"""Kahler potential of the matrix ball, its d^C differential, and the
pluriharmonic pair attached to an anchor point.

The potential centered at the origin is rho_0(Z) = -log det(I - Z* Z); the
associated form dd^C rho_0 (d^C = i(dbar - d)) is the Kahler form of the
curvature -1 normalization used throughout.  Re-centering at A composes with
the automorphism that moves A to the origin.

For an anchor Q, the difference u = rho_0 - rho_Q is pluriharmonic with
harmonic conjugate v(Z) = -2 arg det(I - Q* Z).  v is defined up to 2 pi
jumps, so it is evaluated by tracking the argument continuously along a path
from the anchor (where det(I - Q* Q) > 0 fixes the principal branch); only
differences of v enter any downstream quantity.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .domain import (
    ConditioningWarning,
    MatrixPoint,
    _adj,
    _mobius_data,
    _require_member,
    as_point,
)

__all__ = [
    "BranchWarning",
    "ConjugatePair",
    "PotentialField",
    "conjugate_pair",
    "dC_rho",
    "kahler_form",
    "metric_inner",
    "rho_at",
    "rho_origin",
]

# Subdivision control for branch tracking: refine until every argument
# increment is below pi/2, doubling up to this many sample points.
BRANCH_MAX_POINTS = 2**20
BRANCH_INITIAL_POINTS = 33
BRANCH_ZERO_TOL = 1e-12


class BranchWarning(UserWarning):
    """det(I - Q* Z) passed close to zero while tracking an argument."""


def _rho_from_singulars(s: np.ndarray) -> float:
    # -sum log(1 - sigma^2), split for accuracy near the boundary
    return float(-np.sum(np.log1p(-s) + np.log1p(s)))


def rho_origin(Z, *, defect_floor: float = 1e-14) -> float:
    """Potential centered at the origin, -log det(I - Z* Z) = -sum log(1 - sigma_i^2).

    Grows like -log(defect) toward the boundary; below `defect_floor` the
    singular values are clamped and a conditioning flag is raised, keeping the
    value finite.
    """
    pt = as_point(Z)
    s = pt.singular_values
    if 1.0 - s[0] < defect_floor:
        warnings.warn(
            f"potential evaluated at defect {1.0 - s[0]:.3e}, clamping",
            ConditioningWarning,
            stacklevel=2,
        )
    s = np.clip(s, 0.0, 1.0 - 1e-16)
    return _rho_from_singulars(s)


def rho_at(A, Z) -> float:
    """Potential centered at A: rho_0 composed with the translation A -> 0."""
    a = _require_member(as_point(A), what="center")
    pt = as_point(Z, a.p, a.q)
    _require_member(pt)
    return rho_origin(MatrixPoint(_mobius_data(a.entries).apply(pt.entries)))


def _rho_origin_raw(Z: np.ndarray) -> float:
    s = np.clip(np.linalg.svd(Z, compute_uv=False), 0.0, 1.0 - 1e-16)
    return _rho_from_singulars(s)


def _dC_origin(Z: np.ndarray, T: np.ndarray) -> np.ndarray:
    """d^C rho_0 at Z paired with tangent T: 2 Im tr[(I - Z*Z)^{-1} Z* T]."""
    q = Z.shape[-1]
    X = np.linalg.solve(np.eye(q) - _adj(Z) @ Z, _adj(Z) @ T)
    return 2.0 * np.imag(np.trace(X, axis1=-2, axis2=-1))


def dC_rho(A, Z, tangent, *, method: str = "analytic", step: float = 1e-5) -> float:
    """d^C of the potential centered at A, at the point Z, paired with a tangent.

    The analytic route pushes the tangent through the derivative of the
    centering automorphism and uses the trace formula at the origin.  The
    finite-difference route exploits d^C u(T) = du(-iT) with a central
    difference of the stated step; it exists as an independent check.
    """
    a = _require_member(as_point(A), what="center")
    pt = as_point(Z, a.p, a.q)
    _require_member(pt)
    T = np.asarray(tangent, dtype=complex)
    if T.shape != pt.entries.shape:
        raise ValueError(f"tangent shape {T.shape} does not match point shape {pt.entries.shape}")
    if method == "analytic":
        if np.allclose(a.entries, 0.0):
            return float(_dC_origin(pt.entries, T))
        data = _mobius_data(a.entries)
        W = data.apply(pt.entries)
        TW = data.differential(pt.entries, T)
        return float(_dC_origin(W, TW))
    if method == "fd":
        data = _mobius_data(a.entries)
        minus = _rho_origin_raw(data.apply(pt.entries - 1j * step * T))
        plus = _rho_origin_raw(data.apply(pt.entries + 1j * step * T))
        return (minus - plus) / (2.0 * step)
    raise ValueError(f"unknown method {method!r}, expected 'analytic' or 'fd'")


def _omega(Z: np.ndarray, S: np.ndarray, T: np.ndarray) -> np.ndarray:
    """Kahler form on tangents S, T: -4 Im tr[(I-Z*Z)^{-1} T* (I-ZZ*)^{-1} S]."""
    p, q = Z.shape[-2:]
    Gp = np.eye(p) - Z @ _adj(Z)
    Gq = np.eye(q) - _adj(Z) @ Z
    X = np.linalg.solve(Gq, _adj(T) @ np.linalg.solve(Gp, S))
    return -4.0 * np.imag(np.trace(X, axis1=-2, axis2=-1))


def kahler_form(Z, S, T) -> float:
    """Value of the invariant Kahler form at Z on the tangent pair (S, T).

    Center-independent: dd^C of the potential at any center gives the same
    2-form.  On the disc this reduces to 4 dx dy / (1 - |z|^2)^2.
    """
    pt = as_point(Z)
    _require_member(pt)
    return float(_omega(pt.entries, np.asarray(S, dtype=complex), np.asarray(T, dtype=complex)))


def metric_inner(Z, S, T) -> float:
    """Riemannian inner product paired with `kahler_form` through the complex
    structure, 4 Re tr[(I-Z*Z)^{-1} T* (I-ZZ*)^{-1} S]."""
    pt = as_point(Z)
    _require_member(pt)
    S = np.asarray(S, dtype=complex)
    T = np.asarray(T, dtype=complex)
    p, q = pt.entries.shape
    Gp = np.eye(p) - pt.entries @ _adj(pt.entries)
    Gq = np.eye(q) - _adj(pt.entries) @ pt.entries
    X = np.linalg.solve(Gq, _adj(T) @ np.linalg.solve(Gp, S))
    return float(4.0 * np.real(np.trace(X)))


@dataclass(frozen=True, eq=False)
class PotentialField:
    """Potential centered at a fixed point, exposing value and d^C pairing."""

    center: MatrixPoint

    @property
    def p(self) -> int:
        return self.center.p

    @property
    def q(self) -> int:
        return self.center.q

    def value(self, Z) -> float:
        return rho_at(self.center, Z)

    def dC(self, Z, tangent, *, method: str = "analytic", step: float = 1e-5) -> float:
        return dC_rho(self.center, Z, tangent, method=method, step=step)


def _permutations(r: int) -> np.ndarray:
    from itertools import permutations

    return np.array(list(permutations(range(r))), dtype=int)


def _matched_increments(lam: np.ndarray, perms: np.ndarray) -> np.ndarray:
    """Argument increments of the factors 1 + lambda_i between consecutive
    samples, with eigenvalues re-paired by proximity at every interval."""
    left = lam[:-1]  # (m-1, r)
    right = lam[1:]
    cand = right[:, perms]  # (m-1, n_perm, r)
    costs = np.sum(np.abs(cand - left[:, None, :]), axis=-1)
    pick = np.argmin(costs, axis=1)
    matched = cand[np.arange(left.shape[0]), pick]
    return np.angle((1.0 + matched) / (1.0 + left))


def _track_eigen_arguments(eig_fn, r: int, *, initial_points: int, max_points: int) -> tuple[float, dict]:
    """Tracked argument of prod_i (1 + lambda_i(t)) over [0, 1].

    The factors are eigenvalues of the anchored geodesic family; tracking
    them separately keeps every factor well scaled even where the product
    itself is far below machine representation.  Intervals whose worst factor
    increment reaches pi/2 are bisected (batched per round) until resolved,
    the point cap is hit, or the interval shrinks to machine width.
    """
    perms = _permutations(r)
    t = np.linspace(0.0, 1.0, max(3, initial_points))
    lam = eig_fn(t)
    capped = False
    while True:
        inc = _matched_increments(lam, perms)
        widths = np.diff(t)
        bad = np.any(np.abs(inc) >= np.pi / 2, axis=-1) & (widths > 1e-15)
        if not np.any(bad):
            break
        n_new = int(np.count_nonzero(bad))
        if t.size + n_new > max_points:
            capped = True
            break
        mids = 0.5 * (t[:-1][bad] + t[1:][bad])
        t = np.concatenate([t, mids])
        lam = np.concatenate([lam, eig_fn(mids)], axis=0)
        order = np.argsort(t)
        t, lam = t[order], lam[order]
    inc = _matched_increments(lam, perms)
    unresolved = bool(np.any(np.abs(inc) >= np.pi / 2))
    factors = np.abs(1.0 + lam)
    diagnostics = {
        "points": int(t.size),
        "min_abs_factor": float(np.min(factors)),
        "min_abs_det": float(np.min(np.prod(factors, axis=-1))),
        "capped": bool(capped or unresolved),
    }
    return float(np.sum(inc)), diagnostics


@dataclass(frozen=True, eq=False)
class ConjugatePair:
    """Pluriharmonic difference u and branch-tracked conjugate v for an anchor.

    u(Z) = rho_0(Z) - rho_anchor(Z) evaluated in closed form through
    log det(I - Q* Q) - 2 log |det(I - Q* Z)|; v accumulates the argument of
    det(I - Q* Z) along a path, principal at the anchor.
    """

    anchor: MatrixPoint
    log_det_anchor: float
    margin: float = 1e-12  # membership slack for evaluation points

    def u(self, Z) -> float:
        pt = as_point(Z, self.anchor.p, self.anchor.q)
        M = np.eye(self.anchor.q) - _adj(self.anchor.entries) @ pt.entries
        _, logabs = np.linalg.slogdet(M)
        return self.log_det_anchor - 2.0 * float(logabs)

    def v(self, Z, *, initial_points: int = BRANCH_INITIAL_POINTS) -> float:
        value, _ = self.v_with_diagnostics(Z, initial_points=initial_points)
        return value

    def v_with_diagnostics(self, Z, *, initial_points: int = BRANCH_INITIAL_POINTS) -> tuple[float, dict]:
        """v at Z tracked along the geodesic from the anchor, plus diagnostics.

        Along that geodesic, det(I - Q* g(t)) factors as det(I - Q* Q)
        divided by det(I + Q* C(t)) with C(t) the radial core of the anchored
        picture, so only the winding of the latter determinant needs
        tracking; its eigen-factors stay representable arbitrarily close to
        the boundary, where the raw determinant would underflow.
        """
        pt = as_point(Z, self.anchor.p, self.anchor.q)
        _require_member(pt, margin=self.margin)
        data = _mobius_data(self.anchor.entries)
        W = data.apply(pt.entries)
        U, s, Vh = np.linalg.svd(W, full_matrices=False)
        a = np.arctanh(np.clip(s, 0.0, 1.0 - 1e-16))
        K = Vh @ _adj(self.anchor.entries) @ U  # r x r, constant along the path
        r = a.shape[0]

        def eigs(t: np.ndarray) -> np.ndarray:
            d = np.tanh(np.asarray(t, dtype=float)[:, None] * a)
            return np.linalg.eigvals(K[None, :, :] * d[:, None, :])

        total, diagnostics = _track_eigen_arguments(
            eigs, r, initial_points=initial_points, max_points=BRANCH_MAX_POINTS
        )
        min_abs = diagnostics["min_abs_factor"]
        if min_abs < BRANCH_ZERO_TOL:
            warnings.warn(
                f"a factor of det(I - Q* Z) within {min_abs:.3e} of zero along tracked path",
                BranchWarning,
                stacklevel=2,
            )
        diagnostics["windings"] = total / (2.0 * np.pi)
        diagnostics["ambiguous"] = bool(min_abs < BRANCH_ZERO_TOL)
        return 2.0 * total, diagnostics

    def v_along(self, points: np.ndarray) -> np.ndarray:
        """Tracked v at each point of an explicit path (stacked entries).

        The first point fixes the branch (principal argument there); callers
        that need the anchor normalization should start the path at the anchor.
        """
        Qs = _adj(self.anchor.entries)
        eye = np.eye(self.anchor.q)
        w = np.linalg.det(eye - Qs @ np.asarray(points, dtype=complex))
        inc = np.angle(w[1:] / w[:-1])
        if np.any(np.abs(inc) > np.pi / 2):
            warnings.warn("path too coarse for reliable branch tracking", BranchWarning, stacklevel=2)
        args = np.angle(w[0]) + np.concatenate([[0.0], np.cumsum(inc)])
        return -2.0 * args


def conjugate_pair(Q, *, margin: float = 1e-12) -> ConjugatePair:
    """Pluriharmonic pair for anchor Q.  For Q = 0 both evaluators vanish.

    Internal callers that produce translated near-ideal anchors may relax the
    membership margin to zero; the branch tracker stays stable there.
    """
    anchor = _require_member(as_point(Q), margin=margin, what="anchor")
    M = np.eye(anchor.q) - _adj(anchor.entries) @ anchor.entries
    _, logabs = np.linalg.slogdet(M)
    return ConjugatePair(anchor=anchor, log_det_anchor=float(logabs), margin=margin)
