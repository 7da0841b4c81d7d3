"""Derivative-free Nelder-Mead simplex minimization.

Standard reflect / expand / contract / shrink moves. The best vertex value
never increases, so the per-iteration trace is monotonically non-increasing.
"""

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class SimplexResult:
    x: np.ndarray
    fun: float
    iterations: int
    trace: np.ndarray          # best vertex value after each iteration
    converged: bool            # False when stopped by the iteration cap


def nelder_mead(f, x0, step: float = 0.05,
                x_tolerance: float = 1e-9, f_tolerance: float = 1e-12,
                max_iterations: int | None = None,
                reflection: float = 1.0, expansion: float = 2.0,
                contraction: float = 0.5, shrink: float = 0.5) -> SimplexResult:
    """Minimize f from x0 with an axis-aligned initial simplex of the given step.

    Terminates when the simplex diameter falls below x_tolerance, the spread
    of vertex values falls below f_tolerance, or max_iterations (default
    200 per dimension) is reached. Non-finite values of f during the search
    are treated as +inf so the offending step is rejected; a non-finite value
    at x0 itself is an error.
    """
    x0 = np.asarray(x0, dtype=np.float64)
    dim = x0.size
    if max_iterations is None:
        max_iterations = 200 * max(dim, 1)

    def safe_f(x):
        v = float(f(x))
        return v if math.isfinite(v) else math.inf

    f0 = float(f(x0))
    if not math.isfinite(f0):
        raise ValueError(f"objective is not finite at the start point: {f0}")

    verts = np.tile(x0, (dim + 1, 1))
    for i in range(dim):
        verts[i + 1, i] += step
    fvals = np.array([f0] + [safe_f(verts[i + 1]) for i in range(dim)])

    trace = []
    iterations = 0
    converged = False
    while iterations < max_iterations:
        order = np.argsort(fvals, kind="stable")
        verts = verts[order]
        fvals = fvals[order]

        diameter = float(np.max(np.abs(verts[1:] - verts[0]))) if dim else 0.0
        spread = fvals[-1] - fvals[0]
        if diameter < x_tolerance or spread < f_tolerance:
            converged = True
            break

        iterations += 1
        centroid = verts[:-1].mean(axis=0)
        xr = centroid + reflection * (centroid - verts[-1])
        fr = safe_f(xr)

        if fvals[0] <= fr < fvals[-2]:
            verts[-1], fvals[-1] = xr, fr
        elif fr < fvals[0]:
            xe = centroid + expansion * (xr - centroid)
            fe = safe_f(xe)
            if fe < fr:
                verts[-1], fvals[-1] = xe, fe
            else:
                verts[-1], fvals[-1] = xr, fr
        else:
            if fr < fvals[-1]:
                xc = centroid + contraction * (xr - centroid)   # outside
                fc = safe_f(xc)
                accept = fc <= fr
            else:
                xc = centroid + contraction * (verts[-1] - centroid)  # inside
                fc = safe_f(xc)
                accept = fc < fvals[-1]
            if accept:
                verts[-1], fvals[-1] = xc, fc
            else:
                for i in range(1, dim + 1):
                    verts[i] = verts[0] + shrink * (verts[i] - verts[0])
                    fvals[i] = safe_f(verts[i])
        trace.append(float(fvals.min()))

    order = np.argsort(fvals, kind="stable")
    best = order[0]
    return SimplexResult(x=verts[best].copy(), fun=float(fvals[best]),
                         iterations=iterations, trace=np.array(trace),
                         converged=converged)
