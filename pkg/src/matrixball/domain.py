"""Points, automorphisms, geodesics, and distance for the type-I matrix ball.

The ambient space is the open set of complex p-by-q matrices whose largest
singular value is below one.  Setting p = q = 1 recovers the Poincare disc,
q = 1 the complex ball, and the diagonal matrices form a totally geodesic
polydisc whose complex dimension equals the rank r = min(p, q).

Metric convention: every polydisc factor carries the curvature -1 Poincare
metric, line element 2|dz| / (1 - |z|^2).  Radial distances are therefore
2 * artanh(sigma) per singular value, and the triangle areas computed
downstream inherit this normalization (a Gauss-Bonnet consistency test pins
it globally).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = [
    "DEFAULT_MARGIN",
    "ConditioningWarning",
    "GeodesicSegment",
    "MatrixPoint",
    "MembershipError",
    "ShapeError",
    "SingularDecomposition",
    "as_point",
    "contains",
    "distance",
    "geodesic",
    "mobius_translate",
    "random_point",
    "random_unitary",
    "shilov_defect",
    "svd_reduce",
]

# Points are accepted while sigma_max <= 1 - margin; near-boundary experiments
# may relax this through the `margin` keyword of the membership helpers.
DEFAULT_MARGIN = 1e-12

# Eigenvalues of I - A A* are clamped here before matrix square roots.
EIG_FLOOR = 1e-14


class ShapeError(ValueError):
    """Entries do not form a matrix of the declared dimensions."""


class MembershipError(ValueError):
    """Point lies outside the (closed or open) matrix ball as required."""


class ConditioningWarning(UserWarning):
    """A solve or square root ran close to its numerical breakdown."""


def _adj(M: np.ndarray) -> np.ndarray:
    return M.conj().swapaxes(-1, -2)


def _rdiv(B: np.ndarray, M: np.ndarray) -> np.ndarray:
    # Right division B @ inv(M), batched over leading axes.
    return np.linalg.solve(np.swapaxes(M, -1, -2), np.swapaxes(B, -1, -2)).swapaxes(-1, -2)


@dataclass(frozen=True, eq=False)
class MatrixPoint:
    """A p-by-q complex matrix regarded as a point of the matrix ball.

    Membership (sigma_max < 1) is not enforced at construction so that closed
    ball boundary points remain representable for diagnostics; operations
    check membership at their own boundaries.
    """

    entries: np.ndarray

    def __post_init__(self):
        arr = np.array(self.entries, dtype=complex)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ShapeError(f"expected a 2-d complex matrix, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @property
    def p(self) -> int:
        return self.entries.shape[0]

    @property
    def q(self) -> int:
        return self.entries.shape[1]

    @property
    def rank(self) -> int:
        """Rank of the ambient domain, min(p, q)."""
        return min(self.entries.shape)

    @cached_property
    def singular_values(self) -> np.ndarray:
        return np.linalg.svd(self.entries, compute_uv=False)

    @property
    def sigma_max(self) -> float:
        return float(self.singular_values[0])

    def allclose(self, other: "MatrixPoint", atol: float = 1e-12) -> bool:
        return self.entries.shape == other.entries.shape and bool(
            np.allclose(self.entries, other.entries, atol=atol)
        )

    def __repr__(self) -> str:
        return f"MatrixPoint({self.entries.tolist()!r})"


def as_point(Z, p: int | None = None, q: int | None = None) -> MatrixPoint:
    """Coerce array-like (or pass through MatrixPoint) with optional shape check."""
    pt = Z if isinstance(Z, MatrixPoint) else MatrixPoint(np.atleast_2d(np.asarray(Z, dtype=complex)))
    if p is not None and q is not None and pt.entries.shape != (p, q):
        raise ShapeError(f"expected a {p}x{q} matrix, got {pt.entries.shape[0]}x{pt.entries.shape[1]}")
    return pt


def contains(Z, p: int | None = None, q: int | None = None, *, margin: float = DEFAULT_MARGIN) -> bool:
    """Strict membership test: largest singular value at most 1 - margin."""
    pt = as_point(Z, p, q)
    return pt.sigma_max <= 1.0 - margin


def _require_member(pt: MatrixPoint, *, margin: float = DEFAULT_MARGIN, what: str = "point") -> MatrixPoint:
    if pt.sigma_max > 1.0 - margin:
        raise MembershipError(
            f"{what} has sigma_max = {pt.sigma_max:.17g}, outside the open ball at margin {margin:g}"
        )
    return pt


@dataclass(frozen=True, eq=False)
class SingularDecomposition:
    """Unitary factors and singular values of a domain point, U diag(sigma) V*."""

    U: np.ndarray
    sigma: np.ndarray
    V: np.ndarray

    def reconstruct(self) -> np.ndarray:
        r = self.sigma.shape[0]
        return (self.U[:, :r] * self.sigma) @ _adj(self.V)[:r, :]


def svd_reduce(Z) -> SingularDecomposition:
    """Full SVD of a domain point; the unitary pair realizes the move into the
    diagonal polydisc."""
    pt = _require_member(as_point(Z))
    U, s, Vh = np.linalg.svd(pt.entries)
    return SingularDecomposition(U=U, sigma=s, V=_adj(Vh))


def _herm_sqrt_pair(M: np.ndarray, *, floor: float = EIG_FLOOR) -> tuple[np.ndarray, np.ndarray]:
    """(M^{1/2}, M^{-1/2}) for Hermitian PSD M, eigenvalues clamped at `floor`."""
    w, V = np.linalg.eigh(M)
    if np.min(w) < floor:
        warnings.warn(
            f"clamping eigenvalue {np.min(w):.3e} to {floor:.0e} in Hermitian square root",
            ConditioningWarning,
            stacklevel=3,
        )
        w = np.clip(w, floor, None)
    root = np.sqrt(w)
    return (V * root) @ _adj(V), (V / root) @ _adj(V)


@dataclass(frozen=True, eq=False)
class _MobiusData:
    """Precomputed factors of the automorphism sending `base` to the origin."""

    Li: np.ndarray  # (I - A A*)^{-1/2}
    Rh: np.ndarray  # (I - A* A)^{1/2}
    base: np.ndarray

    def apply(self, Z: np.ndarray) -> np.ndarray:
        A = self.base
        M = np.eye(A.shape[1]) - _adj(A) @ Z
        return self.Li @ _rdiv(Z - A, M) @ self.Rh

    def differential(self, W: np.ndarray, T: np.ndarray) -> np.ndarray:
        """Derivative of the map at W applied to tangent T (both batched)."""
        A = self.base
        M = np.eye(A.shape[1]) - _adj(A) @ W
        K = _rdiv(W - A, M)
        return self.Li @ _rdiv(T + K @ (_adj(A) @ T), M) @ self.Rh


def _mobius_data(A: np.ndarray) -> _MobiusData:
    p, q = A.shape
    _, Li = _herm_sqrt_pair(np.eye(p) - A @ _adj(A))
    Rh, _ = _herm_sqrt_pair(np.eye(q) - _adj(A) @ A)
    return _MobiusData(Li=Li, Rh=Rh, base=A)


def mobius_translate(base, Z, *, margin: float = DEFAULT_MARGIN) -> MatrixPoint:
    """Automorphism of the ball carrying `base` to the origin, evaluated at Z.

    The map is (I - A A*)^{-1/2} (Z - A) (I - A* Z)^{-1} (I - A* A)^{1/2}; its
    inverse is translation by -A.  It preserves membership and distance, which
    the test suite checks on random samples.
    """
    A = _require_member(as_point(base), margin=margin, what="base")
    pt = as_point(Z, A.p, A.q)
    _require_member(pt, margin=margin)
    M = np.eye(A.q) - _adj(A.entries) @ pt.entries
    # Conditioning diagnostic: I - A*Z degenerates only near the boundary.
    smallest = np.linalg.svd(M, compute_uv=False)[-1]
    if smallest < 1e-12:
        warnings.warn(
            f"I - base* Z nearly singular (smallest singular value {smallest:.3e})",
            ConditioningWarning,
            stacklevel=2,
        )
    return MatrixPoint(_mobius_data(A.entries).apply(pt.entries))


def _radial(W: np.ndarray, c) -> np.ndarray:
    """Singular value rescaling sigma -> tanh(c * artanh(sigma)), batched.

    This is the time-c point of the constant-speed geodesic from 0 to W.
    """
    U, s, Vh = np.linalg.svd(W, full_matrices=False)
    s = np.clip(s, 0.0, 1.0 - 1e-16)
    c = np.asarray(c, dtype=float)
    s2 = np.tanh(c[..., None] * np.arctanh(s))
    return (U * s2[..., None, :]) @ Vh


@dataclass(frozen=True, eq=False)
class GeodesicSegment:
    """Constant-speed geodesic with evaluate/velocity on the parameter range [0, 1]."""

    start: MatrixPoint
    end: MatrixPoint

    @cached_property
    def _data(self):
        A = self.start.entries
        to0 = _mobius_data(A)
        from0 = _mobius_data(-A)
        W = to0.apply(self.end.entries)
        U, s, Vh = np.linalg.svd(W, full_matrices=False)
        a = np.arctanh(np.clip(s, 0.0, 1.0 - 1e-16))
        return to0, from0, U, a, Vh

    @property
    def length(self) -> float:
        _, _, _, a, _ = self._data
        return float(np.sqrt(np.sum((2.0 * a) ** 2)))

    def evaluate(self, t) -> np.ndarray:
        """Entries of the curve at parameter t; t may be an array."""
        _, from0, U, a, Vh = self._data
        t = np.asarray(t, dtype=float)
        s2 = np.tanh(t[..., None] * a)
        C = (U * s2[..., None, :]) @ Vh
        return from0.apply(C)

    def velocity(self, t: float) -> np.ndarray:
        """Tangent vector of the curve at parameter t (exact, not differenced)."""
        _, from0, U, a, Vh = self._data
        t = float(t)
        C = (U * np.tanh(t * a)) @ Vh
        Cdot = (U * (a / np.cosh(t * a) ** 2)) @ Vh
        return from0.differential(C, Cdot)

    def __call__(self, t: float) -> MatrixPoint:
        return MatrixPoint(self.evaluate(float(t)))


def geodesic(A, B, *, margin: float = DEFAULT_MARGIN) -> GeodesicSegment:
    """The unique geodesic segment from A to B.

    Built by translating A to the origin, rescaling singular values radially,
    and translating back; constant speed and endpoint interpolation are part
    of the tested contract.
    """
    a = _require_member(as_point(A), margin=margin)
    b = _require_member(as_point(B, a.p, a.q), margin=margin)
    return GeodesicSegment(start=a, end=b)


def _distance_from_origin(W: np.ndarray) -> np.ndarray:
    s = np.linalg.svd(W, compute_uv=False)
    s = np.clip(s, 0.0, 1.0 - 1e-16)
    return np.sqrt(np.sum((2.0 * np.arctanh(s)) ** 2, axis=-1))


def distance(A, B, *, margin: float = DEFAULT_MARGIN) -> float:
    """Geodesic distance, sqrt of the sum of (2 artanh sigma_i)^2 after
    translating A to the origin."""
    a = _require_member(as_point(A), margin=margin)
    b = _require_member(as_point(B, a.p, a.q), margin=margin)
    W = _mobius_data(a.entries).apply(b.entries)
    return float(_distance_from_origin(W))


def shilov_defect(Z) -> float:
    """Distance of the singular value profile from the Shilov boundary.

    Defined as max_i (1 - sigma_i) = 1 - sigma_min, so it vanishes exactly
    when every singular value equals one.  Accepts closed ball points.
    """
    pt = as_point(Z)
    s = pt.singular_values
    if s[0] > 1.0 + 1e-12:
        raise MembershipError(f"sigma_max = {s[0]:.17g} exceeds the closed ball")
    return float(np.clip(1.0 - s[-1], 0.0, 1.0))


def random_point(rng: np.random.Generator, p: int, q: int, sigma_cap: float = 0.9) -> MatrixPoint:
    """Random point with sigma_max uniformly below sigma_cap."""
    G = rng.standard_normal((p, q)) + 1j * rng.standard_normal((p, q))
    smax = np.linalg.svd(G, compute_uv=False)[0]
    target = sigma_cap * rng.uniform(0.0, 1.0)
    return MatrixPoint(G * (target / smax))


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar-distributed n-by-n unitary (QR of a complex Gaussian, phases fixed)."""
    G = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    Q, R = np.linalg.qr(G)
    phases = np.diagonal(R) / np.abs(np.diagonal(R))
    return Q * phases
