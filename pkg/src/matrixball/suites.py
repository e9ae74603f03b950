"""Named verification batteries surfaced by the command line.

Each suite returns a list of CheckResult records; a check failing carries the
offending instance in its detail dict so the CLI can serialize it.  The
projection suite deliberately includes the randomized projection-invariance
check even though it fails on generic rank >= 2 input (see the polydisc
module docstring); the suite is the honest record of that behavior alongside
the checks that do hold.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .domain import (
    MatrixPoint,
    distance,
    geodesic,
    mobius_translate,
    random_point,
    random_unitary,
)
from .polydisc import (
    PolydiscPoint,
    area_additivity_check,
    embed,
    project_to_polydisc,
    verify_orthogonality,
    verify_projection_invariance,
    verify_totally_real_vanishing,
)
from .potentials import conjugate_pair, dC_rho, rho_at, rho_origin
from .search import bound_check, random_triangle
from .serialize import matrix_to_json

__all__ = ["CheckResult", "run_suite", "SUITE_NAMES"]

SUITE_NAMES = ("potentials", "projection", "additivity", "bound")


@dataclass
class CheckResult:
    name: str
    passed: bool
    worst: float
    tolerance: float
    detail: dict = field(default_factory=dict)


def _sample_unit_tangent(rng: np.random.Generator, p: int, q: int) -> np.ndarray:
    T = rng.standard_normal((p, q)) + 1j * rng.standard_normal((p, q))
    return T / np.linalg.norm(T)


def potentials_suite(p: int, q: int, trials: int, seed: int) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    results = []

    worst, offender = 0.0, None
    for _ in range(trials):
        A = random_point(rng, p, q, 0.9)
        val = abs(rho_at(A, A))
        if val > worst:
            worst, offender = val, A
    results.append(
        CheckResult("potential-vanishes-at-center", worst <= 1e-12, worst, 1e-12,
                    {"center": matrix_to_json(offender.entries)} if offender is not None else {})
    )

    worst, offender = 0.0, None
    for _ in range(trials):
        Z = random_point(rng, p, q, 0.9)
        U, V = random_unitary(rng, p), random_unitary(rng, q)
        val = abs(rho_origin(MatrixPoint(U @ Z.entries @ V.conj().T)) - rho_origin(Z))
        if val > worst:
            worst, offender = val, Z
    results.append(
        CheckResult("unitary-invariance", worst <= 1e-10, worst, 1e-10,
                    {"point": matrix_to_json(offender.entries)} if offender is not None else {})
    )

    worst, offender = 0.0, None
    n_geo = min(trials, 20)
    for _ in range(n_geo):
        A = random_point(rng, p, q, 0.8)
        B = random_point(rng, p, q, 0.8)
        geo = geodesic(A, B)
        for t in np.linspace(0.05, 0.95, 7):
            val = abs(dC_rho(A, MatrixPoint(geo.evaluate(float(t))), geo.velocity(float(t))))
            if val > worst:
                worst, offender = val, (A, B)
    results.append(
        CheckResult("dC-vanishes-on-radial-geodesics", worst <= 1e-12, worst, 1e-12,
                    {"segment": [matrix_to_json(x.entries) for x in offender]} if offender else {})
    )

    worst, offender = 0.0, None
    for _ in range(trials):
        Q = random_point(rng, p, q, 0.85)
        Z = random_point(rng, p, q, 0.85)
        pair = conjugate_pair(Q)
        val = abs(pair.u(Z) - (rho_origin(Z) - rho_at(Q, Z)))
        if val > worst:
            worst, offender = val, (Q, Z)
    results.append(
        CheckResult("conjugate-u-matches-potential-difference", worst <= 1e-9, worst, 1e-9,
                    {"pair": [matrix_to_json(x.entries) for x in offender]} if offender else {})
    )
    return results


def projection_suite(p: int, q: int, trials: int, seed: int) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    results = []
    kwargs = {"rng": np.random.default_rng(seed + 1)}

    worst, offender = 0.0, None
    for _ in range(min(trials, 10)):
        Z = random_point(rng, p, q, 0.85)
        w = project_to_polydisc(Z, **kwargs)
        w2 = project_to_polydisc(embed(w), **kwargs)
        val = float(np.max(np.abs(w.coords - w2.coords)))
        if val > worst:
            worst, offender = val, Z
    results.append(
        CheckResult("projection-idempotent", worst <= 1e-8, worst, 1e-8,
                    {"point": matrix_to_json(offender.entries)} if offender is not None else {})
    )

    worst, offender = 0.0, None
    for _ in range(min(trials, 10)):
        Z = random_point(rng, p, q, 0.85)
        try:
            val = verify_orthogonality(Z, projection_kwargs=kwargs)
        except ValueError:  # landed on the polydisc itself
            continue
        if val > worst:
            worst, offender = val, Z
    results.append(
        CheckResult("projection-orthogonal-at-foot", worst <= 1e-4, worst, 1e-4,
                    {"point": matrix_to_json(offender.entries)} if offender is not None else {})
    )

    # Classes on which replacing the free vertex by its projection provably
    # preserves the area: real-matrix orbits (face carries no area).
    worst, offender = 0.0, None
    for _ in range(min(trials, 10)):
        O1 = np.linalg.qr(rng.standard_normal((p, p)))[0]
        O2 = np.linalg.qr(rng.standard_normal((q, q)))[0]
        diag = np.zeros((p, q))
        np.fill_diagonal(diag, rng.uniform(0.1, 0.8, size=min(p, q)))
        Z = MatrixPoint(O1 @ diag @ O2.T)
        val = verify_totally_real_vanishing(Z, mode="edge", projection_kwargs=kwargs)
        if val > worst:
            worst, offender = val, Z
    results.append(
        CheckResult("real-orbit-face-vanishes", worst <= 1e-5, worst, 1e-5,
                    {"point": matrix_to_json(offender.entries)} if offender is not None else {})
    )

    # Randomized projection invariance: honest record, fails for rank >= 2.
    worst, offender = 0.0, None
    for _ in range(min(trials, 10)):
        Qc = rng.uniform(0.0, 0.7, size=min(p, q)) * np.exp(2j * np.pi * rng.uniform(size=min(p, q)))
        Qp = PolydiscPoint(coords=Qc, p=p, q=q)
        Z = random_point(rng, p, q, 0.85)
        val = verify_projection_invariance(Qp, Z, projection_kwargs=kwargs)
        if val > worst:
            worst, offender = val, Z
    results.append(
        CheckResult("projection-invariance-random-pairs", worst <= 1e-5, worst, 1e-5,
                    {"point": matrix_to_json(offender.entries)} if offender is not None else {})
    )
    return results


def additivity_suite(p: int, q: int, trials: int, seed: int) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    r = min(p, q)
    worst, offender = 0.0, None
    for _ in range(trials):
        tris = []
        for _ in range(r):
            zs = rng.uniform(0.0, 0.85, size=3) * np.exp(2j * np.pi * rng.uniform(size=3))
            tris.append(tuple(zs))
        val = area_additivity_check(tris)
        if val > worst:
            worst, offender = val, tris
    detail = {}
    if offender is not None:
        detail["factors"] = [[[z.real, z.imag] for z in tri] for tri in offender]
    return [CheckResult("product-area-additivity", worst <= 1e-7, worst, 1e-7, detail)]


def bound_suite(p: int, q: int, trials: int, seed: int) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    triangles = (random_triangle(rng, p, q, sigma_cap=0.98) for _ in range(trials))
    worst = bound_check(triangles)
    return [CheckResult("area-bound-rank-pi", worst > 0.0, worst, 0.0, {})]


def run_suite(name: str, p: int, q: int, trials: int, seed: int) -> list[CheckResult]:
    if name == "potentials":
        return potentials_suite(p, q, trials, seed)
    if name == "projection":
        return projection_suite(p, q, trials, seed)
    if name == "additivity":
        return additivity_suite(p, q, trials, seed)
    if name == "bound":
        return bound_suite(p, q, trials, seed)
    raise ValueError(f"unknown suite {name!r}; expected one of {SUITE_NAMES}")
