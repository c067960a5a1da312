"""Dense solvers for sampled systems and kernel Gramians."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve
from scipy.optimize import linprog

from .basis import Kernel, RepresenterBasis, require_smoothness
from .errors import IllConditionedGram, InvalidArgument, LPFailure, RankZeroFailure
from .geometry import as_coords
from .operators import DataMap

LP_MAX_SIZE = 10**5
LP_OPTIONS = {"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10}


@dataclass(frozen=True)
class LsqOptions:
    svd_tol: float = 1e-12
    max_iter: int = 200
    tol: float = 1e-10

    def __post_init__(self):
        if not 0 < self.svd_tol < 1:
            raise InvalidArgument("svd_tol must lie in (0, 1)")
        if self.max_iter < 1:
            raise InvalidArgument("max_iter must be >= 1")


def _arrays(system):
    A, b = np.asarray(system.A, dtype=float), np.asarray(system.b, dtype=float)
    if A.shape[0] < A.shape[1]:
        raise InvalidArgument(f"underdetermined system {A.shape}")
    return A, b


def _tsvd(A, b, tol):
    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        raise RankZeroFailure("zero matrix")
    keep = s > tol * s[0]
    c = Vt[keep].T @ ((U[:, keep].T @ b) / s[keep])
    return c, int(keep.sum()), s


def least_squares(system, opts: LsqOptions | None = None, full_output=False):
    """Minimum-norm discrete L2 fit via SVD truncated at ``svd_tol * sigma_max``."""
    opts = opts or LsqOptions()
    A, b = _arrays(system)
    c, rank, s = _tsvd(A, b, opts.svd_tol)
    if not full_output:
        return c
    return c, {
        "rank": rank,
        "truncated": A.shape[1] - rank,
        "sigma_max": float(s[0]),
        "sup_residual": float(np.max(np.abs(A @ c - b))),
    }


def minimax_lawson(system, opts: LsqOptions | None = None, full_output=False):
    """Discrete Chebyshev fit by Lawson's reweighted least squares.

    Starts from the plain least-squares fit and returns the iterate with the
    smallest sup residual seen, so it never does worse than least squares.
    """
    opts = opts or LsqOptions()
    A, b = _arrays(system)
    N = A.shape[0]
    w = np.full(N, 1.0 / N)
    best_c, best_sup = None, np.inf
    prev = None
    converged = False
    truncated = 0
    it = 0
    for it in range(1, opts.max_iter + 1):
        sw = np.sqrt(w)
        c, rank, _ = _tsvd(sw[:, None] * A, sw * b, opts.svd_tol)
        truncated = max(truncated, A.shape[1] - rank)
        r = np.abs(A @ c - b)
        sup = r.max()
        if sup < best_sup:
            best_c, best_sup = c, sup
        level = np.sqrt(np.sum(w * r**2))
        if sup == 0 or (prev is not None and abs(level - prev) <= opts.tol * max(level, 1e-300)):
            converged = True
            break
        prev = level
        w = w * r
        total = w.sum()
        if not np.isfinite(total) or total <= 0:
            # every weighted residual vanished: the fit is exact on its support
            converged = True
            break
        w /= total
    if not full_output:
        return best_c
    return best_c, {
        "converged": converged,
        "iterations": it,
        "truncated": truncated,
        "sup_residual": float(best_sup),
        "flags": [] if converged else ["unconverged"],
    }


def _linprog(c, A_ub, b_ub, nvar, seed=0):
    rng = np.random.default_rng(seed)
    b = b_ub
    for attempt in range(4):
        res = linprog(c, A_ub=A_ub, b_ub=b, bounds=[(None, None)] * nvar,
                      method="highs", options=LP_OPTIONS)
        if res.status == 0:
            return res
        # restart from a slightly perturbed right-hand side
        b = b_ub + 1e-12 * max(1.0, np.abs(b_ub).max()) * rng.standard_normal(b_ub.shape)
    raise LPFailure(f"linear program failed after 3 restarts: {res.message}")


def lp_minimax(system):
    """Exact discrete Chebyshev fit: minimize t subject to |A c - b| <= t."""
    A, b = _arrays(system)
    N, M = A.shape
    if N * M > LP_MAX_SIZE:
        raise InvalidArgument(f"LP oracle limited to N*M <= {LP_MAX_SIZE}")
    one = np.ones((N, 1))
    A_ub = np.block([[A, -one], [-A, -one]])
    b_ub = np.concatenate([b, -b])
    obj = np.zeros(M + 1)
    obj[-1] = 1.0
    res = _linprog(obj, A_ub, b_ub, M + 1)
    c = res.x[:M]
    return c, float(np.max(np.abs(A @ c - b)))


# --------------------------------------------------------------------------
# Symmetric collocation


@dataclass(frozen=True, eq=False)
class GramSystem:
    G: np.ndarray
    data: np.ndarray
    jitter: float


@dataclass(frozen=True, eq=False)
class GramSolution:
    coefficients: np.ndarray
    jitter: float
    gram: GramSystem
    space: RepresenterBasis


def _dist(p, q):
    d = p[:, None, :] - q[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", d, d))


def gram_matrix(kernel: Kernel, alpha: float, beta: float, interior, boundary) -> np.ndarray:
    """Gramian of the functionals (L at interior points, trace at boundary points)."""
    k = kernel
    rii, rib, rbb = _dist(interior, interior), _dist(interior, boundary), _dist(boundary, boundary)
    Gii = alpha**2 * k.phi(rii) + 2 * alpha * beta * k.lap(rii) + beta**2 * k.lap2(rii)
    Gib = alpha * k.phi(rib) + beta * k.lap(rib)
    Gbb = k.phi(rbb)
    G = np.block([[Gii, Gib], [Gib.T, Gbb]])
    return 0.5 * (G + G.T)


def gram_solve(kernel: Kernel, dmap: DataMap, interior_pts, boundary_pts, data) -> GramSolution:
    """Minimum native-norm function reproducing the given functional data.

    ``data`` is either a case object (interior and boundary data are sampled
    from it) or a vector ordered interior first, then boundary.
    """
    interior = np.array(as_coords(interior_pts)).reshape(-1, 2) if interior_pts is not None else np.zeros((0, 2))
    boundary = np.array(as_coords(boundary_pts)).reshape(-1, 2) if boundary_pts is not None else np.zeros((0, 2))
    require_smoothness(kernel, 4, "symmetric collocation")
    if len(interior) and not dmap.has_interior:
        raise InvalidArgument("interior functionals need an interior operator")
    alpha, beta = dmap.interior.coefficients if dmap.has_interior else (1.0, 0.0)
    if hasattr(data, "boundary_data"):
        parts = []
        if len(interior):
            parts.append(data.interior_data(dmap.interior, interior))
        if len(boundary):
            parts.append(data.boundary_data(boundary))
        data = np.concatenate(parts)
    data = np.asarray(data, dtype=float)
    n = len(interior) + len(boundary)
    if data.shape != (n,):
        raise InvalidArgument(f"expected {n} data values, got {data.shape}")
    G = gram_matrix(kernel, alpha, beta, interior, boundary)
    scale = np.trace(G) / n
    for jitter in (0.0, 1e-12 * scale, 1e-10 * scale):
        try:
            factor = cho_factor(G + jitter * np.eye(n), lower=True)
        except LinAlgError:
            continue
        c = cho_solve(factor, data)
        space = RepresenterBasis(kernel, alpha, beta, interior, boundary)
        return GramSolution(c, jitter, GramSystem(G, data, jitter), space)
    raise IllConditionedGram(f"Cholesky failed for the {n}x{n} Gramian at maximal jitter")


def native_inner(G, c, d) -> float:
    """Native-space inner product of two representer combinations."""
    return float(np.asarray(c) @ G @ np.asarray(d))
