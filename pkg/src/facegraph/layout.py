"""2-D node placement: transform connectivity into target distances, warm-start
with a spring embedder, then minimize the Frobenius stress with Nelder-Mead.
"""

import logging
from dataclasses import dataclass

import numpy as np

from .simplex import nelder_mead

log = logging.getLogger(__name__)

# beyond this many nodes the 2n-dimensional simplex search degrades; warn, don't refuse
DESIGN_MAX_SUBJECTS = 60


@dataclass(frozen=True, eq=False)
class NoConnectivity:
    w: np.ndarray  # target pairwise distances in [0.1, 1], zero diagonal
    q: np.ndarray  # rescaled connectivity, 99 * T / max(T)


@dataclass(frozen=True)
class SolverConfig:
    max_iterations: int | None = None   # default 200 per coordinate (2 per node)
    x_tolerance: float = 1e-9
    f_tolerance: float = 1e-12
    reflection: float = 1.0
    expansion: float = 2.0
    contraction: float = 0.5
    shrink: float = 0.5
    init_step: float = 0.05
    fd_iterations: int = 500
    seed: int = 42

    def __post_init__(self):
        for name in ("x_tolerance", "f_tolerance", "reflection", "expansion",
                     "contraction", "shrink", "init_step"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True, eq=False)
class Layout:
    positions: np.ndarray  # (n_e, 2), centroid at the origin
    stress: float
    mae: float
    iterations: int
    seed: int


def no_connectivity(t: np.ndarray) -> NoConnectivity:
    """Map connectivity T to target distances W = 1/sqrt(99*T/max(T) + 1).

    Maximal connectivity maps to 0.1, zero connectivity to 1.0. A collection
    with no connectivity at all (max(T) = 0) degenerates to all-ones targets.
    """
    t = np.asarray(t, dtype=np.float64)
    t_max = float(t.max(initial=0.0))
    if t_max <= 0.0:
        log.warning("no connectivity anywhere (max(T) = 0); using uniform targets")
        q = np.zeros_like(t)
        w = np.ones_like(t)
    else:
        q = 99.0 * t / t_max
        w = 1.0 / np.sqrt(q + 1.0)
    np.fill_diagonal(w, 0.0)
    return NoConnectivity(w=w, q=q)


def pair_distances(positions: np.ndarray) -> np.ndarray:
    diff = positions[:, None, :] - positions[None, :, :]
    return np.sqrt((diff ** 2).sum(axis=2))


def stress(positions: np.ndarray, w: np.ndarray) -> float:
    """Squared Frobenius norm of (pairwise distances - W).

    Full-matrix form: every unordered pair contributes twice; the zero
    diagonal contributes nothing.
    """
    delta = pair_distances(np.asarray(positions, dtype=np.float64))
    return float(((delta - w) ** 2).sum())


def mae(positions: np.ndarray, w: np.ndarray) -> float:
    """Mean absolute |distance - W| over the unordered off-diagonal pairs."""
    n = w.shape[0]
    if n < 2:
        log.warning("MAE undefined for %d node(s); reporting 0", n)
        return 0.0
    delta = pair_distances(np.asarray(positions, dtype=np.float64))
    iu = np.triu_indices(n, k=1)
    return float(np.abs(delta[iu] - w[iu]).mean())


def force_directed_init(w: np.ndarray, seed: int = 42,
                        iterations: int = 500) -> np.ndarray:
    """Spring-embedder warm start on the complete graph with ideal edge
    lengths proportional to W.

    Fruchterman-Reingold style forces with per-pair ideal length k = W_ij:
    attraction d^2/k, repulsion k^2/d, so each pair settles near d = W_ij.
    Displacements are capped by a linearly cooling temperature. Deterministic
    for a given seed; the result is centered at the origin.
    """
    w = np.asarray(w, dtype=np.float64)
    n = w.shape[0]
    if n <= 1:
        return np.zeros((n, 2))
    rng = np.random.default_rng(seed)
    pos = rng.uniform(-0.5, 0.5, size=(n, 2))

    ideal = np.maximum(w, 1e-3)
    np.fill_diagonal(ideal, 1.0)  # masked out below, avoids divide-by-zero
    off_diag = ~np.eye(n, dtype=bool)
    t0 = 0.1 * float(ideal[off_diag].max())

    for it in range(iterations):
        temp = t0 * (1.0 - it / iterations)
        diff = pos[:, None, :] - pos[None, :, :]
        dist = np.sqrt((diff ** 2).sum(axis=2))
        np.clip(dist, 1e-9, None, out=dist)
        # net scalar force per pair: positive pushes apart, negative pulls together
        magnitude = np.where(off_diag, ideal ** 2 / dist - dist ** 2 / ideal, 0.0)
        disp = (diff / dist[:, :, None] * magnitude[:, :, None]).sum(axis=1)
        disp_len = np.sqrt((disp ** 2).sum(axis=1, keepdims=True))
        np.clip(disp_len, 1e-12, None, out=disp_len)
        pos += disp / disp_len * np.minimum(disp_len, temp)
    return pos - pos.mean(axis=0)


def solve_layout(w: np.ndarray, cfg: SolverConfig | None = None) -> Layout:
    """Place nodes so pairwise distances approximate W.

    Runs Nelder-Mead on the stress objective from the force-directed start.
    The translation/rotation gauge freedom is left loose during the search and
    removed afterwards by re-centering on the origin.
    """
    cfg = cfg or SolverConfig()
    w = np.asarray(w, dtype=np.float64)
    n = w.shape[0]
    if n > DESIGN_MAX_SUBJECTS:
        log.warning("%d subjects exceeds the design envelope (%d); "
                    "the simplex search may converge poorly", n, DESIGN_MAX_SUBJECTS)
    if n <= 1:
        return Layout(positions=np.zeros((n, 2)), stress=0.0,
                      mae=mae(np.zeros((n, 2)), w), iterations=0, seed=cfg.seed)

    init = force_directed_init(w, seed=cfg.seed, iterations=cfg.fd_iterations)
    result = nelder_mead(
        lambda flat: stress(flat.reshape(n, 2), w),
        init.ravel(),
        step=cfg.init_step,
        x_tolerance=cfg.x_tolerance,
        f_tolerance=cfg.f_tolerance,
        max_iterations=cfg.max_iterations,
        reflection=cfg.reflection,
        expansion=cfg.expansion,
        contraction=cfg.contraction,
        shrink=cfg.shrink,
    )
    positions = result.x.reshape(n, 2)
    positions = positions - positions.mean(axis=0)
    return Layout(positions=positions, stress=result.fun, mae=mae(positions, w),
                  iterations=result.iterations, seed=cfg.seed)
