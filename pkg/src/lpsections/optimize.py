"""Derivative-free maximization of the section volume over directions.

The search runs in unconstrained coordinates y (one per entry); a point
maps to the direction with squared weights w_j = y_j^2 / sum y^2, so the
unit constraint is built in and the objective is even in every
coordinate.  Canonicalization quotients out permutations.  Nelder-Mead
with multi-start: the two-coordinate direction, the main diagonal, and
seeded random points; the best accepted value is tracked monotonically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .direction import Direction, validate_exponent
from .hankel import QuadSpec, VolumeResult, section_volume_quadrature
from .montecarlo import McSpec, estimate_section_volume
from .randkit import RngStream

_REFLECT, _EXPAND, _CONTRACT, _SHRINK = 1.0, 2.0, 0.5, 0.5

# Squared weights below this are snapped to exact zero before the engine
# sees the direction.  Near-boundary points otherwise carry a coordinate
# whose certified outer tail forces an enormous cutoff at large p, for a
# volume difference far below the optimizer's resolution.
W_SNAP = 1e-3


@dataclass(frozen=True)
class OptReport:
    best: Direction
    best_value: VolumeResult
    iterations: int
    trace: tuple
    converged: bool
    meta: dict


def _weights(y: np.ndarray) -> np.ndarray:
    q = y * y
    return q / q.sum()


def _as_direction(y: np.ndarray) -> Direction:
    w = _weights(y)
    w[w < W_SNAP] = 0.0
    return Direction(np.sqrt(w / w.sum()))


class _Objective:
    """Engine-backed objective with evaluation counting and memoization
    on the canonical direction (plateaus from canonicalization would
    otherwise re-pay the engine)."""

    def __init__(self, p, engine, quad, mc):
        self.p = p
        self.engine = engine
        self.quad = quad
        self.mc = mc
        self.cache: dict = {}
        self.evals = 0

    def __call__(self, d: Direction) -> VolumeResult:
        hit = self.cache.get(d)
        if hit is not None:
            return hit
        if self.engine == "quadrature":
            res = section_volume_quadrature(self.p, d, self.quad)
        else:
            res = estimate_section_volume(self.p, d, self.mc)
        self.evals += 1
        self.cache[d] = res
        return res

    def error_unit(self, res: VolumeResult) -> float:
        return 3.0 * res.err_bound if res.engine == "montecarlo" else res.err_bound


def _w_diameter(ys: list[np.ndarray]) -> float:
    ws = [_weights(y) for y in ys]
    return max(
        float(np.linalg.norm(ws[i] - ws[j]))
        for i in range(len(ws)) for j in range(i + 1, len(ws))
    )


def _nelder_mead(obj, y0, budget, tol):
    n = y0.size
    ys = [y0.copy()]
    for j in range(n):
        y = y0.copy()
        y[j] += 0.25
        ys.append(y)
    vals = [obj(_as_direction(y)).value for y in ys]
    used = len(ys)
    converged = False
    while used < budget:
        order = sorted(range(len(ys)), key=lambda i: -vals[i])
        ys = [ys[i] for i in order]
        vals = [vals[i] for i in order]
        if _w_diameter(ys) < tol:
            converged = True
            break
        centroid = np.mean(ys[:-1], axis=0)
        worst = ys[-1]
        refl = centroid + _REFLECT * (centroid - worst)
        f_refl = obj(_as_direction(refl)).value
        used += 1
        if f_refl > vals[0]:
            if used < budget:
                expd = centroid + _EXPAND * (centroid - worst)
                f_expd = obj(_as_direction(expd)).value
                used += 1
                if f_expd > f_refl:
                    ys[-1], vals[-1] = expd, f_expd
                    continue
            ys[-1], vals[-1] = refl, f_refl
            continue
        if f_refl > vals[-2]:
            ys[-1], vals[-1] = refl, f_refl
            continue
        cont = centroid + _CONTRACT * (worst - centroid)
        f_cont = obj(_as_direction(cont)).value
        used += 1
        if f_cont > vals[-1]:
            ys[-1], vals[-1] = cont, f_cont
            continue
        for i in range(1, len(ys)):
            if used >= budget:
                break
            ys[i] = ys[0] + _SHRINK * (ys[i] - ys[0])
            vals[i] = obj(_as_direction(ys[i])).value
            used += 1
    best = int(np.argmax(vals))
    return ys[best], vals[best], used, converged


def maximize_direction(
    p: float,
    n: int,
    engine: str = "quadrature",
    budget: int = 240,
    tol: float = 1e-2,
    seed: int = 0,
    quad: Optional[QuadSpec] = None,
    mc: Optional[McSpec] = None,
    random_starts: int = 2,
) -> OptReport:
    """Maximize the section volume over unit directions of length n.

    Multi-start Nelder-Mead in the squared-weight parameterization;
    starts are the two-coordinate direction, the main diagonal, and
    seeded random points.  Convergence means the final simplex diameter
    in w dropped below tol.  The engine error at the reported best must
    stay below tol/4 (3 standard errors for the Monte Carlo engine) or
    the run is flagged unconverged.
    """
    p = validate_exponent(p)
    if n < 2:
        raise ValueError("need n >= 2")
    if engine not in ("quadrature", "montecarlo"):
        raise ValueError("engine must be quadrature or montecarlo")
    if engine == "quadrature" and quad is None:
        quad = QuadSpec(tol_abs=tol / 4.0, panel_order=12)
    if engine == "montecarlo" and mc is None:
        mc = McSpec(samples=200_000, seed=seed)
    obj = _Objective(p, engine, quad, mc)

    starts = [Direction.two_equal(n).as_array(), Direction.diagonal(n).as_array()]
    rng = RngStream(seed, 0).generator
    for _ in range(random_starts):
        starts.append(np.abs(rng.standard_normal(n)) + 1e-3)
    share = max(n + 2, budget // len(starts))

    trace = []
    best_y = None
    best_val = -math.inf
    any_converged = False
    best_from_converged = False
    total_iters = 0
    for y0 in starts:
        y0 = np.asarray(y0, dtype=float) / np.linalg.norm(y0)
        y, val, used, conv = _nelder_mead(obj, y0, share, tol)
        total_iters += used
        any_converged = any_converged or conv
        if val > best_val:
            best_val = val
            best_y = y
            best_from_converged = conv
            trace.append((total_iters, val))
    best_dir = _as_direction(best_y)
    best_res = obj(best_dir)
    err_ok = obj.error_unit(best_res) <= tol / 4.0
    meta = {
        "engine": engine,
        "starts": len(starts),
        "engine_evals": obj.evals,
        "seed": seed,
        "error_within_quarter_tol": err_ok,
    }
    return OptReport(
        best=best_dir,
        best_value=best_res,
        iterations=total_iters,
        trace=tuple(trace),
        converged=best_from_converged and err_ok,
        meta=meta,
    )


def grid_search_simplex(
    p: float,
    n: int,
    resolution: float,
    engine: str = "quadrature",
    quad: Optional[QuadSpec] = None,
    mc: Optional[McSpec] = None,
) -> list[tuple[Direction, float]]:
    """Exhaustive evaluation over the squared-weight simplex grid for
    n in {2, 3}; the brute-force oracle for maximize_direction.

    Canonically equivalent grid points are evaluated once.
    """
    p = validate_exponent(p)
    if n not in (2, 3):
        raise ValueError("grid search supports n in {2, 3} only")
    if not 0.0 < resolution <= 0.5:
        raise ValueError("resolution must lie in (0, 0.5]")
    obj = _Objective(p, engine, quad or QuadSpec(tol_abs=1e-6), mc or McSpec(samples=100_000))
    k = int(round(1.0 / resolution))
    out = []
    seen = set()
    if n == 2:
        combos = [(i, k - i) for i in range(k + 1)]
    else:
        combos = [(i, j, k - i - j) for i in range(k + 1) for j in range(k + 1 - i)]
    for combo in combos:
        d = Direction(np.sqrt(np.array(combo, dtype=float) / k))
        if d in seen:
            continue
        seen.add(d)
        out.append((d, obj(d).value))
    return out
