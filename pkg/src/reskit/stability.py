"""Sampling stability constants and norming-set construction.

The sup-norm constant of a trial space ``U`` on samples ``X`` against a fine
grid ``Y`` is::

    C = max_{y in Y} max { p(y) : p in U, |p(x)| <= 1 for x in X }

Each inner problem is a linear program.  Its dual, ``min |lam|_1`` subject to
``B^T lam = a(y)``, is a norm of the evaluation vector ``a(y)``, so any
feasible ``lam`` bounds it from above and any feasible ``p`` bounds it from
below.  Optimal active sets from solved programs give exact bounds on whole
neighbourhoods of ``y``, which lets :func:`stability_sup` solve roughly one
LP per arch of the extremal function instead of one per fine point.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import qr

from .basis import TrialSpace, poly_basis_1d
from .errors import DegenerateTrialSpace, InvalidArgument, LPFailure
from .geometry import PointSet, Tag, as_coords, chebyshev_nodes, equidistant_nodes
from .solve import _linprog


@dataclass
class StabilityReport:
    M: int
    N: int
    family: str
    C: float
    method: str
    fine_grid_size: int
    oversampling: str = ""
    argmax: np.ndarray | None = field(default=None, repr=False)
    extremal: np.ndarray | None = field(default=None, repr=False)
    lp_solves: int = 0

    def row(self) -> dict:
        return {
            "family": self.family, "M": self.M, "N": self.N,
            "oversampling": self.oversampling, "C": repr(float(self.C)),
            "method": self.method, "fine_grid_size": self.fine_grid_size,
        }


def _with_samples(sample, fine):
    """Fine grid with the sample points prepended (duplicates dropped)."""
    s, f = as_coords(sample), as_coords(fine)
    ps = PointSet(s, Tag.INTERIOR)
    return ps.union(PointSet(f, Tag.INTERIOR)).points


def _active_vertex(B, c):
    """Polish an LP solution into an exactly feasible vertex and its active rows."""
    M = B.shape[1]
    Bc = B @ c
    act = np.flatnonzero(np.abs(Bc) >= 1 - 1e-7)
    S = None
    if len(act) >= M:
        _, _, piv = qr(B[act].T, pivoting=True, mode="economic")
        cand = act[piv[:M]]
        if np.linalg.cond(B[cand]) < 1e12:
            S = cand
            c = np.linalg.solve(B[S], np.sign(Bc[S]))
    c = c / max(1.0, np.abs(B @ c).max())
    return S, c


def sup_constant(B: np.ndarray, F: np.ndarray):
    """Exact ``max_i max{ F[i] c : |B c| <= 1 }``; returns (C, argmax, c, n_lp)."""
    N, M = B.shape
    if N < M or np.linalg.matrix_rank(B) < M:
        raise DegenerateTrialSpace("sample matrix does not determine the trial space")
    if N == M:
        # the dual LP has a single feasible point
        lam = np.linalg.solve(B.T, F.T).T
        val = np.abs(lam).sum(axis=1)
        i = int(np.argmax(val))
        c = np.linalg.solve(B, np.sign(lam[i]))
        return float(val[i]), i, c, 0
    A_ub = np.vstack([B, -B])
    b_ub = np.ones(2 * N)
    upper = np.abs(F @ np.linalg.pinv(B)).sum(axis=1)
    lower = np.zeros(len(F))
    best_c = np.zeros(M)
    done = np.zeros(len(F), dtype=bool)
    n_lp = 0
    while True:
        best = lower.max()
        cand = np.where(done, -np.inf, upper)
        i = int(np.argmax(cand))
        if cand[i] <= best * (1 + 1e-10):
            break
        res = _linprog(-F[i], A_ub, b_ub, M)
        n_lp += 1
        done[i] = True
        S, c = _active_vertex(B, res.x)
        vals = np.abs(F @ c)
        if vals.max() > best:
            best_c = c
        lower = np.maximum(lower, vals)
        if S is not None:
            lam = np.linalg.solve(B[S].T, F.T).T
            upper = np.minimum(upper, np.abs(lam).sum(axis=1))
        upper[i] = min(upper[i], -res.fun)
    vals = F @ best_c
    i = int(np.argmax(np.abs(vals)))
    return float(abs(vals[i])), i, best_c * np.sign(vals[i]), n_lp


def stability_sup(space: TrialSpace, sample_pts, fine_pts, family: str = "") -> StabilityReport:
    """Sup-norm stability constant of sampling ``space`` at ``sample_pts``.

    ``fine_pts`` stands in for the continuum; the samples are merged into it
    so the constant is always at least 1.
    """
    fine = _with_samples(sample_pts, fine_pts)
    B = space.value(sample_pts)
    F = space.value(fine)
    N, M = B.shape
    if N < M:
        raise InvalidArgument(f"need N >= M samples, got N={N}, M={M}")
    try:
        C, i, c, n_lp = sup_constant(B, F)
        method = "lp_exact"
    except LPFailure:
        rep = stability_l2(space, sample_pts, None, fine, None)
        rep.method = "l2_surrogate"
        return rep
    return StabilityReport(M, N, family, C, method, len(fine),
                           argmax=fine[i], extremal=c, lp_solves=n_lp)


def lebesgue_constant(nodes, fine_pts) -> float:
    """``max_x sum_i |l_i(x)|`` over the fine grid, barycentric evaluation."""
    x = np.asarray(as_coords(nodes)[:, 0], dtype=float)
    t = np.asarray(as_coords(fine_pts)[:, 0], dtype=float)
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    if np.any(np.abs(diff) < 1e-14):
        raise InvalidArgument("coincident interpolation nodes")
    # scale by the capacity 1/4 of [-1, 1] to keep the weights in range
    w = 1.0 / np.prod(4.0 * diff, axis=1)
    d = t[:, None] - x[None, :]
    hit = np.abs(d) == 0
    d[hit] = 1.0
    q = w / d
    ell = np.abs(q) / np.abs(q.sum(axis=1, keepdims=True))
    rows = hit.any(axis=1)
    ell[rows] = hit[rows].astype(float)
    return float(ell.sum(axis=1).max())


def stability_l2(space: TrialSpace, sample_pts, sample_weights, fine_pts, fine_weights) -> StabilityReport:
    """Discrete L2 analogue: ``1 / sigma_min`` of the weighted sample matrix of
    the basis orthonormalized on the weighted fine grid."""
    S, F = space.value(sample_pts), space.value(fine_pts)
    N, M = S.shape
    if N < M:
        raise InvalidArgument(f"need N >= M samples, got N={N}, M={M}")
    ws = np.full(N, 1.0 / N) if sample_weights is None else np.asarray(sample_weights, float)
    wf = np.full(len(F), 1.0 / len(F)) if fine_weights is None else np.asarray(fine_weights, float)
    if np.any(ws <= 0) or np.any(wf <= 0):
        raise InvalidArgument("quadrature weights must be positive")
    _, R = np.linalg.qr(np.sqrt(wf)[:, None] * F)
    if np.min(np.abs(np.diag(R))) < 1e-13 * np.max(np.abs(np.diag(R))):
        raise DegenerateTrialSpace("trial space is rank deficient on the fine grid")
    Q = np.linalg.solve(R.T, (np.sqrt(ws)[:, None] * S).T).T
    smin = np.linalg.svd(Q, compute_uv=False)[-1]
    C = math.inf if smin == 0 else 1.0 / smin
    return StabilityReport(M, N, "", float(C), "l2_surrogate", len(F))


@dataclass
class NormingResult:
    points: PointSet
    report: StabilityReport
    indices: list
    flags: list


def greedy_norming_set(space: TrialSpace, candidate_pts, target_C: float = 2.0,
                       budget: int | None = None) -> NormingResult:
    """Grow a sample set from dense candidates until ``C <= target_C``.

    Until the samples determine the space, the next point is the candidate whose
    evaluation row is farthest from the span of those already chosen (pivoted
    QR order).  Afterwards the point where the current extremal function peaks
    is added.
    """
    cand = as_coords(candidate_pts)
    V = space.value(cand)
    M = V.shape[1]
    budget = 8 * M if budget is None else int(budget)
    if not target_C >= 1:
        raise InvalidArgument("target_C below 1 is unreachable by definition")
    if len(cand) < 16 * M:
        raise InvalidArgument(f"need at least {16 * M} candidates for dimension {M}")
    chosen = [int(np.argmax(np.abs(V[:, 0])))]
    # rows of V projected off the span of the chosen rows
    Rres = V.copy()
    while len(chosen) < M and len(chosen) < budget:
        q = Rres[chosen[-1]]
        nq = np.linalg.norm(q)
        if nq > 0:
            q = q / nq
            Rres = Rres - np.outer(Rres @ q, q)
        norms = np.linalg.norm(Rres, axis=1)
        norms[chosen] = -1.0
        chosen.append(int(np.argmax(norms)))
    report = None
    while True:
        B = V[chosen]
        C, i, c, n_lp = sup_constant(B, V)
        report = StabilityReport(M, len(chosen), "greedy", C, "lp_exact", len(cand),
                                 argmax=cand[i], extremal=c, lp_solves=n_lp)
        if C <= target_C or len(chosen) >= budget or i in chosen:
            break
        chosen.append(i)
    flags = [] if report.C <= target_C else ["target-missed"]
    pts = PointSet(cand[chosen], getattr(candidate_pts, "tag", Tag.BOUNDARY),
                   family="greedy", domain=getattr(candidate_pts, "domain", None))
    return NormingResult(pts, report, chosen, flags)


OVERSAMPLING = {
    "none": lambda M: M,
    "pi": lambda M: math.ceil(math.pi * M),
    "msquared": lambda M: M * M,
}


def stability_lab(family: str, orders, oversampling: str = "none",
                  fine_factor: int = 16) -> list[StabilityReport]:
    """Sup-norm constants of 1D polynomials of order M on N nodes of ``family``."""
    orders = list(orders)
    if not orders:
        raise InvalidArgument("no orders given")
    if any(b <= a for a, b in zip(orders, orders[1:])):
        raise InvalidArgument("orders must be strictly ascending")
    if oversampling not in OVERSAMPLING:
        raise InvalidArgument(f"unknown oversampling rule {oversampling!r}")
    nodes = {"chebyshev": chebyshev_nodes, "equidistant": equidistant_nodes}.get(family)
    if nodes is None:
        raise InvalidArgument(f"unknown node family {family!r}")
    out = []
    for M in orders:
        N = OVERSAMPLING[oversampling](M)
        x = nodes(N)
        fine = np.linspace(-1, 1, fine_factor * N)
        rep = stability_sup(poly_basis_1d(M), x, fine, family=family)
        rep.oversampling = oversampling
        out.append(rep)
    return out


LAB_COLUMNS = ["family", "M", "N", "oversampling", "C", "method", "fine_grid_size"]


def lab_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=LAB_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in reports:
        w.writerow(r.row())
    return buf.getvalue()
