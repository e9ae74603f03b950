"""Extremal search: push geodesic triangle areas toward the rank * pi bound.

The search anneals a boundary margin downward; within each stage a
derivative-free simplex descent moves the three vertices (projected back
into the margin-shrunk ball whenever the constraint is violated), followed
by a radial inflation line search that scales all singular values toward
the boundary along the geodesic flow.  Areas inside the search come from
the endpoint-difference method, which stays cheap and stable near the
boundary; quadrature is reserved for validating final candidates.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .domain import MatrixPoint, as_point, random_point, shilov_defect
from .potentials import BranchWarning
from .triangle import area_vformula


def _quiet_abs_area(P, Q, R) -> float:
    # Near-ideal batches legitimately flag tiny determinants; the ambiguity
    # marker stays in the AreaResult diagnostics, the warning is batch noise.
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BranchWarning)
        return abs(area_vformula(P, Q, R).value)

__all__ = [
    "BoundViolationError",
    "SearchConfig",
    "SearchTrace",
    "StageRecord",
    "bound_check",
    "boundary_sweep",
    "equality_diagnostics",
    "maximize_area",
    "random_triangle",
]

BOUND_TOLERANCE = 1e-9


class BoundViolationError(AssertionError):
    """A computed area exceeded rank * pi beyond tolerance."""

    def __init__(self, message: str, triangle=None):
        super().__init__(message)
        self.triangle = triangle


@dataclass(frozen=True)
class SearchConfig:
    """Dimensions, margin schedule, and budgets for one maximization run."""

    p: int
    q: int
    margins: tuple[float, ...] = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5)
    iterations: int = 3000  # function-evaluation budget per stage
    restarts: int = 2
    method: str = "vformula"
    seed: int = 0

    def __post_init__(self):
        m = np.asarray(self.margins, dtype=float)
        if m.size == 0 or np.any(m <= 0.0) or np.any(np.diff(m) >= 0.0):
            raise ValueError("margins must be strictly decreasing positive reals")
        if self.p < 1 or self.q < 1:
            raise ValueError("dimensions must be positive")
        if self.iterations < 0 or self.restarts < 1:
            raise ValueError("iterations must be >= 0 and restarts >= 1")

    @property
    def rank(self) -> int:
        return min(self.p, self.q)

    @property
    def target(self) -> float:
        return self.rank * np.pi


@dataclass(frozen=True)
class StageRecord:
    margin: float
    best_abs: float
    vertices: tuple[MatrixPoint, MatrixPoint, MatrixPoint]
    defects: tuple[float, float, float]
    evaluations: int


@dataclass
class SearchTrace:
    config: SearchConfig
    stages: list[StageRecord] = field(default_factory=list)
    best_curve: list[float] = field(default_factory=list)
    stagnated: bool = False

    @property
    def best_abs(self) -> float:
        return self.best_curve[-1] if self.best_curve else 0.0

    @property
    def best_vertices(self):
        return self.stages[-1].vertices if self.stages else None

    @property
    def achieved_fraction(self) -> float:
        return self.best_abs / self.config.target

    def record(self, stage: StageRecord):
        if stage.best_abs > self.config.target + BOUND_TOLERANCE:
            raise BoundViolationError(
                f"|area| = {stage.best_abs:.12f} exceeds rank*pi = {self.config.target:.12f}",
                triangle=stage.vertices,
            )
        self.stages.append(stage)
        prev = self.best_curve[-1] if self.best_curve else 0.0
        self.best_curve.append(max(prev, stage.best_abs))


def random_triangle(rng: np.random.Generator, p: int, q: int, sigma_cap: float = 0.9):
    return (
        random_point(rng, p, q, sigma_cap),
        random_point(rng, p, q, sigma_cap),
        random_point(rng, p, q, sigma_cap),
    )


def _project_cap(Z: np.ndarray, cap: float) -> np.ndarray:
    smax = np.linalg.svd(Z, compute_uv=False)[0]
    if smax > cap:
        return Z * (cap / smax)
    return Z


def _abs_area(verts: list[np.ndarray]) -> float:
    try:
        return _quiet_abs_area(verts[0], verts[1], verts[2])
    except Exception:
        return 0.0


def _radial_inflate(Z: np.ndarray, tau: float, component: int | None = None) -> np.ndarray:
    U, s, Vh = np.linalg.svd(Z, full_matrices=False)
    s = np.clip(s, 0.0, 1.0 - 1e-16)
    s2 = np.tanh(tau * np.arctanh(s))
    if component is not None:
        keep = s.copy()
        keep[component] = s2[component]
        s2 = keep
    return (U * s2) @ Vh


def _stage_optimize(
    verts: list[np.ndarray], margin: float, budget: int, p: int, q: int
) -> tuple[list[np.ndarray], float, int]:
    """One margin stage: simplex descent plus a common radial inflation."""
    cap = 1.0 - margin
    verts = [_project_cap(V, cap) for V in verts]
    evaluations = 0

    def pack(vs: list[np.ndarray]) -> np.ndarray:
        flat = np.concatenate([V.ravel() for V in vs])
        return np.concatenate([flat.real, flat.imag])

    def unpack(x: np.ndarray) -> list[np.ndarray]:
        n = 3 * p * q
        cplx = x[:n] + 1j * x[n:]
        return [_project_cap(cplx[k * p * q : (k + 1) * p * q].reshape(p, q), cap) for k in range(3)]

    if budget > 0:
        def objective(x: np.ndarray) -> float:
            return -_abs_area(unpack(x))

        res = optimize.minimize(
            objective,
            pack(verts),
            method="Nelder-Mead",
            options={"maxfev": budget, "maxiter": budget, "xatol": 1e-9, "fatol": 1e-12},
        )
        evaluations += res.nfev
        cand = unpack(res.x)
        if _abs_area(cand) > _abs_area(verts):
            verts = cand

    # Radial inflation: scale singular values along the geodesic flow, first
    # all vertices together, then one vertex at a time (this is what lifts a
    # vertex whose smallest singular value lags behind the others).
    def try_inflation(indices: tuple[int, ...]) -> None:
        nonlocal verts, evaluations
        smax = max(np.linalg.svd(verts[i], compute_uv=False)[0] for i in indices)
        if not (0.0 < smax < cap):
            return
        tau_max = float(np.arctanh(cap) / np.arctanh(smax))
        if tau_max <= 1.0 + 1e-12:
            return

        def line(tau: float) -> float:
            cand = [
                _radial_inflate(V, tau) if i in indices else V for i, V in enumerate(verts)
            ]
            return -_abs_area(cand)

        res = optimize.minimize_scalar(line, bounds=(1.0, tau_max), method="bounded",
                                       options={"xatol": 1e-6})
        evaluations += getattr(res, "nfev", 0)
        if -res.fun > _abs_area(verts):
            verts = [
                _radial_inflate(V, float(res.x)) if i in indices else V for i, V in enumerate(verts)
            ]

    def try_component_inflation(idx: int, comp: int) -> None:
        nonlocal verts, evaluations
        s = np.clip(np.linalg.svd(verts[idx], compute_uv=False), 0.0, 1.0 - 1e-16)
        if not (0.0 < s[comp] < cap):
            return
        tau_max = float(np.arctanh(cap) / np.arctanh(s[comp]))
        if tau_max <= 1.0 + 1e-12:
            return

        def line(tau: float) -> float:
            cand = list(verts)
            cand[idx] = _radial_inflate(verts[idx], tau, component=comp)
            return -_abs_area(cand)

        res = optimize.minimize_scalar(line, bounds=(1.0, tau_max), method="bounded",
                                       options={"xatol": 1e-6})
        evaluations += getattr(res, "nfev", 0)
        if -res.fun > _abs_area(verts):
            cand = list(verts)
            cand[idx] = _radial_inflate(verts[idx], float(res.x), component=comp)
            verts = cand

    if budget > 0:
        try_inflation((0, 1, 2))
        for i in range(3):
            try_inflation((i,))
        for i in range(3):
            for comp in range(min(p, q)):
                try_component_inflation(i, comp)
    return verts, _abs_area(verts), evaluations


def maximize_area(cfg: SearchConfig) -> SearchTrace:
    """Anneal the margin schedule, tracking the best triangle per stage.

    Restarts run independently and merge by best value.  A stage improving
    the incumbent by less than 1e-12 marks the trace as stagnated; the trace
    is still returned in full.
    """
    rng = np.random.default_rng(cfg.seed)
    trace = SearchTrace(config=cfg)
    best_overall: tuple[float, list[np.ndarray]] | None = None

    per_restart: list[list[np.ndarray]] = []
    for _ in range(cfg.restarts):
        tri = random_triangle(rng, cfg.p, cfg.q, sigma_cap=1.0 - cfg.margins[0])
        per_restart.append([t.entries.copy() for t in tri])

    for margin in cfg.margins:
        stage_best: tuple[float, list[np.ndarray]] | None = None
        stage_evals = 0
        for k in range(cfg.restarts):
            verts, value, used = _stage_optimize(per_restart[k], margin, cfg.iterations, cfg.p, cfg.q)
            per_restart[k] = verts
            stage_evals += used
            if stage_best is None or value > stage_best[0]:
                stage_best = (value, verts)
        assert stage_best is not None
        value, verts = stage_best
        prev_best = best_overall[0] if best_overall else 0.0
        if best_overall is None or value > best_overall[0]:
            best_overall = (value, verts)
        if cfg.iterations > 0 and value - prev_best < 1e-12:
            trace.stagnated = True
        pts = tuple(MatrixPoint(V) for V in best_overall[1])
        trace.record(
            StageRecord(
                margin=float(margin),
                best_abs=float(best_overall[0]),
                vertices=pts,  # type: ignore[arg-type]
                defects=tuple(shilov_defect(pt) for pt in pts),  # type: ignore[arg-type]
                evaluations=stage_evals,
            )
        )
    return trace


def boundary_sweep(p: int, q: int, eps_list) -> list[tuple[float, float]]:
    """Areas of the symmetric near-ideal family at each boundary offset.

    Vertices are (1 - eps) times the three cube roots of unity placed on the
    full diagonal; the areas increase toward rank * pi as eps decreases.
    Rows are returned sorted by descending eps.
    """
    eps_arr = sorted({float(e) for e in eps_list}, reverse=True)
    if not eps_arr or any(not (0.0 < e < 0.5) for e in eps_arr):
        raise ValueError("eps values must lie in (0, 0.5)")
    r = min(p, q)
    ident = np.zeros((p, q), dtype=complex)
    np.fill_diagonal(ident, 1.0)
    rows = []
    for eps in eps_arr:
        verts = [(1.0 - eps) * np.exp(2j * np.pi * k / 3.0) * ident for k in range(3)]
        rows.append((eps, float(_quiet_abs_area(*verts))))
    return rows


def bound_check(triangles, *, rank: int | None = None) -> float:
    """Worst margin rank*pi - |area| over a batch of triangles.

    Raises BoundViolationError (with the offending triangle attached) if any
    area exceeds the bound beyond tolerance; degenerate triangles contribute
    the full margin.
    """
    worst = np.inf
    count = 0
    for tri in triangles:
        P, Q, R = (as_point(v) for v in tri)
        r = rank if rank is not None else P.rank
        target = r * np.pi
        margin = target - _quiet_abs_area(P, Q, R)
        if margin < -BOUND_TOLERANCE:
            raise BoundViolationError(
                f"triangle exceeds the bound by {-margin:.3e}",
                triangle=(P.entries.tolist(), Q.entries.tolist(), R.entries.tolist()),
            )
        worst = min(worst, margin)
        count += 1
    if count == 0:
        raise ValueError("empty batch")
    return float(worst)


@dataclass(frozen=True)
class EqualityReport:
    """Per-stage margin, best area, and worst vertex defect, plus trend flags."""

    rows: tuple[tuple[float, float, float], ...]  # (margin, best_abs, max_defect)
    final_gap: float
    defects_shrink: bool
    areas_grow: bool

    def to_dict(self) -> dict:
        return {
            "rows": [
                {"margin": m, "best_abs": b, "max_defect": d} for (m, b, d) in self.rows
            ],
            "final_gap": self.final_gap,
            "defects_shrink": self.defects_shrink,
            "areas_grow": self.areas_grow,
        }


def equality_diagnostics(trace: SearchTrace) -> EqualityReport:
    """Correlate best areas with vertex Shilov defects across stages.

    Approaching the bound forces the best triangle's vertices toward the
    Shilov boundary; the report records the per-stage maxima and whether the
    overall trend matches (first to last stage).
    """
    if not trace.stages:
        raise ValueError("empty trace")
    rows = tuple(
        (st.margin, st.best_abs, max(st.defects)) for st in trace.stages
    )
    final_gap = trace.config.target - trace.best_abs
    defects_shrink = rows[-1][2] <= rows[0][2] + 1e-12
    areas_grow = rows[-1][1] >= rows[0][1] - 1e-12
    return EqualityReport(
        rows=rows,
        final_gap=float(final_gap),
        defects_shrink=bool(defects_shrink),
        areas_grow=bool(areas_grow),
    )
