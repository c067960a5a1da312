"""Solver pipelines (Trefftz, MFS, MPS, DRM, symmetric collocation) and certificates.

Every pipeline returns a :class:`Certificate`: the coefficients it produced,
residuals of ``f - D(u)`` on the sampled rows and on fine validation grids,
and, when the data map has an explicit well-posedness constant, an
a-posteriori bound on the sup-norm error of the solution.
"""
from __future__ import annotations

import csv
import io
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .basis import (
    Kernel, SumSpace, TrialSpace, harmonic_basis, kernel_basis, mfs_basis,
    poly_basis_2d, require_smoothness,
)
from .discretize import (
    ResidualSummary, SampledSystem, assemble, fine_grids, residual_summary,
)
from .errors import InvalidArgument, InvalidConfiguration, OversamplingViolation, ReskitError
from .geometry import (
    Domain, as_coords, boundary_points, fictitious_boundary, interior_points,
)
from .operators import DataFunctions, DataMap, Interior, image_space, wp_constant
from .solve import LsqOptions, gram_solve, least_squares, minimax_lawson
from .stability import stability_sup

MIN_OVERSAMPLING = 2.0


@dataclass
class Certificate:
    method: str
    M: int
    n_interior: int
    n_boundary: int
    oversampling_ratio: float
    coefficients: np.ndarray
    residual: ResidualSummary
    bound: float
    bound_kind: str
    space: TrialSpace = field(repr=False)
    stability: dict | None = None
    truth: dict | None = None
    flags: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def __call__(self, pts) -> np.ndarray:
        return self.space.value(pts) @ self.coefficients

    def to_json(self, timestamp: bool = True) -> dict:
        out = {
            "method": self.method,
            "M": int(self.M),
            "n_interior": int(self.n_interior),
            "n_boundary": int(self.n_boundary),
            "oversampling_ratio": float(self.oversampling_ratio),
            "residual": self.residual.to_dict(),
            "bound": {"value": float(self.bound), "kind": self.bound_kind},
            "flags": list(self.flags),
            "coefficients": [float(c) for c in self.coefficients],
            "details": self.details,
        }
        if self.stability is not None:
            out["stability"] = self.stability
        if self.truth is not None:
            out["truth"] = self.truth
        if timestamp:
            out["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
        return out


def _fit(system: SampledSystem, solver: str, opts: LsqOptions | None):
    if solver == "lsq":
        c, info = least_squares(system, opts, full_output=True)
        flags = []
    elif solver == "lawson":
        c, info = minimax_lawson(system, opts, full_output=True)
        flags = list(info["flags"])
    else:
        raise InvalidConfiguration(f"unknown solver {solver!r}")
    if info["truncated"]:
        flags.append("svd-truncated")
    return c, flags


def _truth(case, approx, fine_interior, fine_boundary):
    if not hasattr(case, "solution"):
        return None
    errs = [
        float(np.max(np.abs(case.solution(p) - approx(p))))
        for p in (fine_interior, fine_boundary) if p is not None
    ]
    return {"sup_error": max(errs)}


def _stability(space, sample, fine):
    rep = stability_sup(space, sample, fine)
    return {"C": rep.C, "method": rep.method}


def _check_ratio(rows, cols, floor, what):
    if rows < floor * cols:
        raise OversamplingViolation(
            f"{what}: {rows} rows for {cols} trial functions, below the oversampling floor {floor:g}x"
        )


def _boundary_fit(method, domain, case, space, n_boundary, solver, opts,
                  family, report_stability, extra_flags=()):
    dmap = DataMap(Interior.NONE, domain)
    bpts = boundary_points(domain, n_boundary, family)
    system = assemble(space, dmap, None, bpts, case)
    coeffs, flags = _fit(system, solver, opts)
    fi, fb = fine_grids(domain, n_boundary, n_boundary)
    res = residual_summary(space, dmap, coeffs, case, None, fb, system)
    cert = Certificate(
        method, space.dim, 0, len(bpts), system.oversampling_ratio, coeffs, res,
        bound=res.combined, bound_kind="max-principle", space=space,
        flags=flags + list(extra_flags), details={"space": space.describe()},
    )
    cert.truth = _truth(case, cert, fi, fb)
    if report_stability:
        cert.stability = _stability(space, bpts, fb)
    return cert


def _require_harmonic(case):
    if not getattr(case, "harmonic", False):
        raise InvalidConfiguration(
            f"case {getattr(case, 'name', case)!r} is not harmonic; boundary-only methods need f_L = 0"
        )


def solve_trefftz(domain: Domain, case, K: int, n_boundary: int, solver: str = "lsq",
                  opts: LsqOptions | None = None, family: str = "equidistant",
                  oversampling: float = MIN_OVERSAMPLING, report_stability: bool = False
                  ) -> Certificate:
    """Harmonic polynomials of degree <= K fitted to Dirichlet data on the boundary."""
    _require_harmonic(case)
    space = harmonic_basis(K)
    _check_ratio(n_boundary, space.dim, max(oversampling, MIN_OVERSAMPLING), "trefftz")
    return _boundary_fit("trefftz", domain, case, space, n_boundary, solver, opts,
                         family, report_stability)


def solve_mfs(domain: Domain, case, n_charges: int, factor: float, n_boundary: int,
              solver: str = "lsq", opts: LsqOptions | None = None,
              family: str = "equidistant", oversampling: float = MIN_OVERSAMPLING,
              report_stability: bool = False) -> Certificate:
    """Fundamental solutions on a dilated circle, fitted on the boundary."""
    _require_harmonic(case)
    charges = fictitious_boundary(domain, factor, n_charges)
    space = mfs_basis(charges, domain)
    _check_ratio(n_boundary, space.dim, max(oversampling, MIN_OVERSAMPLING), "mfs")
    cert = _boundary_fit("mfs", domain, case, space, n_boundary, solver, opts,
                         family, report_stability)
    cert.details["factor"] = factor
    return cert


def mps_centers(domain: Domain, h: float) -> np.ndarray:
    """Square grid of spacing ``h`` covering the domain plus a margin of one spacing."""
    if not h > 0:
        raise InvalidArgument("center spacing must be positive")
    ax, ay, bx, by = domain.bbox
    nx, ny = math.ceil((bx - ax) / h) + 3, math.ceil((by - ay) / h) + 3
    X, Y = np.meshgrid(ax - h + h * np.arange(nx), ay - h + h * np.arange(ny))
    p = np.column_stack([X.ravel(), Y.ravel()])
    near = domain.contains(p) | (domain.boundary_distance(p) <= h * (1 + 1e-9))
    return p[near]


def solve_mps(domain: Domain, case, centers_h: float, kernel: Kernel,
              operator: str = "id_minus_laplace", solver: str = "lsq",
              opts: LsqOptions | None = None, oversampling: float = MIN_OVERSAMPLING,
              report_stability: bool = False) -> Certificate:
    """Particular solutions: fit ``L u = f_L`` in the interior only."""
    dmap = DataMap(Interior(operator), domain)
    if not dmap.has_interior:
        raise InvalidConfiguration("MPS needs an interior operator")
    require_smoothness(kernel, 2, "particular solutions of a second-order operator")
    space = kernel_basis(mps_centers(domain, centers_h), kernel)
    ratio = max(oversampling, MIN_OVERSAMPLING)
    ipts = interior_points(domain, math.ceil(ratio * space.dim))
    system = assemble(space, dmap, ipts, None, case, min_ratio=ratio)
    coeffs, flags = _fit(system, solver, opts)
    fi, fb = fine_grids(domain, len(ipts), 0)
    res = residual_summary(space, dmap, coeffs, case, fi, None, system)
    cert = Certificate(
        "mps", space.dim, len(ipts), 0, system.oversampling_ratio, coeffs, res,
        bound=res.combined, bound_kind="residual-only", space=space, flags=flags,
        details={"space": space.describe(), "h": centers_h, "operator": dmap.interior.value},
    )
    if hasattr(case, "solution"):
        _, fb_truth = fine_grids(domain, 0, 64)
        cert.truth = _truth(case, cert, fi, fb_truth)
    if report_stability:
        cert.stability = _stability(image_space(space, dmap), ipts, fi)
    return cert


def _zero_mps(domain, mps_params):
    """Zero coefficients over the MPS trial space (used when f_L vanishes)."""
    kernel = mps_params["kernel"]
    space = kernel_basis(mps_centers(domain, mps_params["h"]), kernel)
    return space, np.zeros(space.dim)


def solve_drm(domain: Domain, case, mps_params: dict, boundary_params: dict,
              operator: str = "neg_laplace", report_stability: bool = False) -> Certificate:
    """Dual reciprocity: MPS for ``L u = f_L``, then a homogeneous boundary correction.

    ``mps_params``: ``h``, ``kernel`` and optional ``solver``.
    ``boundary_params``: ``method`` ("trefftz" with ``K`` or "mfs" with
    ``n_charges`` and ``factor``), ``n_boundary`` and optional ``solver``.
    """
    dmap = DataMap(Interior(operator), domain)
    if dmap.interior is not Interior.NEG_LAPLACE:
        raise InvalidConfiguration("DRM corrections use harmonic trial spaces; operator must be neg_laplace")
    C = wp_constant(dmap)
    flags = []

    # step 1: particular solution
    mps_kw = {k: v for k, v in mps_params.items() if k in ("solver", "opts", "oversampling")}
    probe = interior_points(domain, 64)
    f_probe = case.interior_data(dmap.interior, probe)
    if np.all(f_probe == 0) and getattr(case, "harmonic", False):
        mps_space, c1 = _zero_mps(domain, mps_params)
        eps_mps, n_int, fi = 0.0, 0, None
    else:
        try:
            step1 = solve_mps(domain, case, mps_params["h"], mps_params["kernel"],
                              operator=operator, **mps_kw)
        except ReskitError as exc:
            raise type(exc)(f"DRM step 1 (MPS): {exc}") from exc
        mps_space, c1 = step1.space, step1.coefficients
        eps_mps, n_int = step1.residual.fine_sup_interior, step1.n_interior
        fi, _ = fine_grids(domain, n_int, 0)
        flags += [f"mps:{f}" for f in step1.flags]

    # step 2: homogeneous problem with corrected boundary data
    def corrected(p):
        return case.boundary_data(p) - mps_space.value(p) @ c1

    data2 = DataFunctions(None, corrected)
    data2.harmonic = True
    bp = dict(boundary_params)
    method = bp.pop("method", "trefftz")
    try:
        if method == "trefftz":
            step2 = solve_trefftz(domain, data2, **bp)
        elif method == "mfs":
            step2 = solve_mfs(domain, data2, **bp)
        else:
            raise InvalidConfiguration(f"unknown DRM boundary method {method!r}")
    except ReskitError as exc:
        raise type(exc)(f"DRM step 2 ({method}): {exc}") from exc
    eps_t = step2.residual.fine_sup_boundary
    flags += [f"{method}:{f}" for f in step2.flags]

    space = SumSpace([mps_space, step2.space])
    coeffs = np.concatenate([c1, step2.coefficients])
    _, fb = fine_grids(domain, 0, step2.n_boundary)
    if fi is None:
        fi, _ = fine_grids(domain, step2.n_boundary, 0)
    res = residual_summary(space, dmap, coeffs, case, fi, fb)
    disc = step2.residual.discrete_sup
    if n_int:
        disc = disc + C * step1.residual.discrete_sup
    res = ResidualSummary(disc, None, res.fine_sup_interior, res.fine_sup_boundary, res.combined)
    bound = eps_t + C * eps_mps
    cert = Certificate(
        f"drm-{method}", space.dim, n_int, step2.n_boundary,
        (n_int + step2.n_boundary) / space.dim, coeffs, res, bound=bound,
        bound_kind="max-principle", space=space, flags=flags,
        details={"eps_T": eps_t, "eps_MPS": eps_mps, "wp_constant": C,
                 "step_bounds": [eps_t, C * eps_mps]},
    )
    cert.truth = _truth(case, cert, fi, fb)
    return cert


def solve_collocation(domain: Domain, case, kernel: Kernel, interior_pts, boundary_pts,
                      operator: str = "neg_laplace") -> Certificate:
    """Symmetric collocation: minimum-norm interpolant of the sampled data functionals."""
    dmap = DataMap(Interior(operator), domain)
    sol = gram_solve(kernel, dmap, interior_pts, boundary_pts, case)
    space = sol.space
    system = assemble(space, dmap, interior_pts, boundary_pts, case)
    ni, nb = len(as_coords(interior_pts)), len(as_coords(boundary_pts))
    fi, fb = fine_grids(domain, ni, nb)
    res = residual_summary(space, dmap, sol.coefficients, case, fi, fb, system)
    try:
        wp_constant(dmap)
        kind = "max-principle"
    except ReskitError:
        kind = "residual-only"
    flags = ["jitter"] if sol.jitter else []
    cert = Certificate(
        "collocation", space.dim, ni, nb, system.oversampling_ratio, sol.coefficients, res,
        bound=res.combined, bound_kind=kind, space=space, flags=flags,
        details={"jitter": sol.jitter, "kernel": kernel.family.value, "shape": kernel.shape},
    )
    cert.truth = _truth(case, cert, fi, fb)
    return cert


def polynomial_baseline(domain: Domain, case, degree: int, operator: str = "neg_laplace",
                        opts: LsqOptions | None = None) -> Certificate:
    """Least-squares fit from plain polynomials of total degree ``degree``.

    Harmonic cases use harmonic polynomials on the boundary (a Trefftz fit);
    otherwise full 2D polynomials fit interior and boundary rows together.
    """
    if getattr(case, "harmonic", False):
        K = max(int(degree), 1)
        cert = solve_trefftz(domain, case, K, 4 * (2 * K + 1), opts=opts)
    else:
        dmap = DataMap(Interior(operator), domain)
        space = poly_basis_2d(degree, domain)
        M = space.dim
        ipts = interior_points(domain, 2 * M)
        bpts = boundary_points(domain, max(2 * M, 16))
        system = assemble(space, dmap, ipts, bpts, case, min_ratio=MIN_OVERSAMPLING)
        coeffs = least_squares(system, opts)
        fi, fb = fine_grids(domain, len(ipts), len(bpts))
        res = residual_summary(space, dmap, coeffs, case, fi, fb, system)
        try:
            wp_constant(dmap)
            kind = "max-principle"
        except ReskitError:
            kind = "residual-only"
        cert = Certificate("poly-baseline", M, len(ipts), len(bpts), system.oversampling_ratio,
                           coeffs, res, bound=res.combined, bound_kind=kind, space=space)
        cert.truth = _truth(case, cert, fi, fb)
    cert.details["baseline_degree"] = int(degree)
    return cert


# --------------------------------------------------------------------------
# Convergence studies


def _threads() -> int:
    n = int(os.environ.get("RESKIT_THREADS", "0") or 0)
    return n if n > 0 else (os.cpu_count() or 1)


def run_method(method: str, domain: Domain, case, size, options: dict) -> Certificate:
    """Run ``method`` at one ladder ``size`` (K, charge count, 1/h or point count)."""
    o = dict(options)
    solver = o.get("solver", "lsq")
    opts = o.get("opts")
    if method == "trefftz":
        K = int(size)
        nb = o.get("n_boundary") or math.ceil(o.get("boundary_ratio", 4) * (2 * K + 1))
        return solve_trefftz(domain, case, K, nb, solver, opts)
    if method == "mfs":
        n = int(size)
        nb = o.get("n_boundary") or math.ceil(o.get("boundary_ratio", 2) * n)
        return solve_mfs(domain, case, n, o.get("factor", 2.0), nb, solver, opts)
    if method == "mps":
        return solve_mps(domain, case, 1.0 / size, _kernel(o, "matern52"),
                         o.get("operator", "id_minus_laplace"), solver, opts)
    if method == "drm":
        mps = {"h": 1.0 / size, "kernel": _kernel(o, "matern52"), "solver": solver, "opts": opts}
        bnd = o.get("boundary", {"method": "trefftz", "K": 12, "n_boundary": 100})
        return solve_drm(domain, case, mps, bnd, o.get("operator", "neg_laplace"))
    if method == "collocation":
        n = int(size)
        ipts = interior_points(domain, max(1, n * n // 4))
        bpts = boundary_points(domain, 2 * n)
        return solve_collocation(domain, case, _kernel(o, "matern72"), ipts, bpts,
                                 o.get("operator", "neg_laplace"))
    raise InvalidConfiguration(f"unknown method {method!r}")


def _kernel(o, default):
    k = o.get("kernel", default)
    if isinstance(k, Kernel):
        return k
    return Kernel(k.removeprefix("kernel:"), float(o.get("shape", 1.0)))


STUDY_COLUMNS = [
    "size", "method", "status", "M", "n_interior", "n_boundary", "discrete_sup",
    "combined", "bound", "bound_kind", "true_error", "decay_ratio",
    "baseline_degree", "baseline_combined", "baseline_error",
]


@dataclass
class Study:
    method: str
    rows: list
    certificates: list

    def csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=STUDY_COLUMNS, lineterminator="\n")
        w.writeheader()
        for r in self.rows:
            w.writerow({k: ("" if r.get(k) is None else (repr(r[k]) if isinstance(r[k], float) else r[k]))
                        for k in STUDY_COLUMNS})
        return buf.getvalue()

    @property
    def n_failed(self) -> int:
        return sum(r["status"] != "ok" for r in self.rows)


def _baseline_degree(case, M, cap_harmonic=30, cap_poly=12):
    if getattr(case, "harmonic", False):
        return min(max(1, (M - 1) // 2), cap_harmonic)
    d = 0
    while (d + 2) * (d + 3) // 2 <= M and d < cap_poly:
        d += 1
    return d


def convergence_study(method: str, size_ladder, case, options: dict | None = None,
                      domain: Domain | None = None, baseline: bool = True) -> Study:
    """One certificate per ladder size, plus a polynomial baseline column."""
    from .geometry import UnitDisk

    options = dict(options or {})
    domain = domain or UnitDisk()
    ladder = list(size_ladder)
    if any(b <= a for a, b in zip(ladder, ladder[1:])):
        raise InvalidArgument("size ladder must be ascending")
    if method not in ("trefftz", "mfs", "mps", "drm", "collocation"):
        raise InvalidConfiguration(f"unknown method {method!r}")

    def job(size):
        try:
            return run_method(method, domain, case, size, options), None
        except (ReskitError, np.linalg.LinAlgError) as exc:
            return None, f"{type(exc).__name__}: {exc}"

    with ThreadPoolExecutor(max_workers=min(_threads(), max(len(ladder), 1))) as ex:
        results = list(ex.map(job, ladder))

    rows, certs, prev = [], [], None
    for size, (cert, err) in zip(ladder, results):
        row = {"size": size, "method": method}
        if cert is None:
            row["status"] = f"failed: {err}"
            rows.append(row)
            certs.append(None)
            continue
        row.update(
            status="ok", M=cert.M, n_interior=cert.n_interior, n_boundary=cert.n_boundary,
            discrete_sup=cert.residual.discrete_sup, combined=cert.residual.combined,
            bound=cert.bound, bound_kind=cert.bound_kind,
            true_error=None if cert.truth is None else cert.truth["sup_error"],
        )
        if prev is not None and prev > 0:
            row["decay_ratio"] = cert.residual.combined / prev
        prev = cert.residual.combined
        if baseline and hasattr(case, "solution"):
            deg = _baseline_degree(case, cert.M)
            try:
                base = polynomial_baseline(domain, case, deg, options.get("operator", "neg_laplace"))
                row.update(baseline_degree=deg, baseline_combined=base.residual.combined,
                           baseline_error=base.truth["sup_error"])
            except ReskitError as exc:
                row["baseline_degree"] = f"failed: {exc}"
        rows.append(row)
        certs.append(cert)
    return Study(method, rows, certs)
