"""Sampled systems and residual evaluation on fine validation grids."""
from __future__ import annotations

from dataclasses import dataclass, asdict

import numpy as np

from .basis import TrialSpace
from .errors import InvalidArgument, OversamplingViolation, UnsupportedCertificate
from .geometry import Domain, as_coords, boundary_points, interior_points
from .operators import DataMap, apply_datamap, wp_constant

FINE_FACTOR = 8
FINE_CAP = 4096
FINE_MIN_FACTOR = 4


def interior_weight(dmap: DataMap) -> float:
    """Factor on the interior sup residual in the data-space norm.

    Falls back to 1 when no explicit well-posedness constant exists; such
    residuals are reported but never claimed as error bounds.
    """
    try:
        c = wp_constant(dmap)
    except UnsupportedCertificate:
        return 1.0
    return c if dmap.has_interior else 0.0


@dataclass(frozen=True, eq=False)
class SampledSystem:
    A: np.ndarray
    b: np.ndarray
    kind: np.ndarray
    locations: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        if self.A.ndim != 2 or self.A.shape[0] != len(self.b):
            raise InvalidArgument(f"inconsistent system shapes {self.A.shape}, {self.b.shape}")

    @classmethod
    def from_arrays(cls, A, b) -> "SampledSystem":
        A = np.atleast_2d(np.asarray(A, dtype=float))
        b = np.asarray(b, dtype=float).ravel()
        n = len(b)
        return cls(A, b, np.array(["boundary"] * n), np.zeros((n, 2)), np.ones(n))

    @property
    def N(self) -> int:
        return self.A.shape[0]

    @property
    def M(self) -> int:
        return self.A.shape[1]

    @property
    def oversampling_ratio(self) -> float:
        return self.N / self.M

    @property
    def n_interior(self) -> int:
        return int(np.sum(self.kind == "interior"))

    @property
    def n_boundary(self) -> int:
        return int(np.sum(self.kind == "boundary"))

    def block_sups(self, r) -> tuple[float, float]:
        r = np.abs(np.asarray(r))
        si = r[self.kind == "interior"]
        sb = r[self.kind == "boundary"]
        return (float(si.max()) if si.size else 0.0, float(sb.max()) if sb.size else 0.0)


def assemble(space: TrialSpace, dmap: DataMap, interior_pts, boundary_pts, case,
             min_ratio: float = 1.0) -> SampledSystem:
    """Sample the data map on the trial basis and the problem data.

    ``case`` is anything exposing ``interior_data(op, pts)`` and
    ``boundary_data(pts)`` (a manufactured case or :class:`DataFunctions`).
    """
    block = apply_datamap(space, dmap, interior_pts, boundary_pts)
    N, M = block.matrix.shape
    if N < min_ratio * M:
        raise OversamplingViolation(
            f"{N} sampled rows for {M} trial functions: ratio {N / M:.3g} is below "
            f"the oversampling floor {min_ratio:g}"
        )
    b = np.empty(N)
    mi = block.kind == "interior"
    if mi.any():
        b[mi] = case.interior_data(dmap.interior, block.locations[mi])
    if (~mi).any():
        b[~mi] = case.boundary_data(block.locations[~mi])
    w = np.where(mi, interior_weight(dmap), 1.0)
    return SampledSystem(block.matrix, b, block.kind, block.locations, w)


@dataclass(frozen=True)
class ResidualSummary:
    discrete_sup: float | None
    discrete_l2: float | None
    fine_sup_interior: float
    fine_sup_boundary: float
    combined: float

    def to_dict(self) -> dict:
        return asdict(self)


def combine(sup_interior: float, sup_boundary: float, dmap: DataMap,
            has_interior: bool, has_boundary: bool) -> float:
    """Data-space norm ``|g|_boundary + C |f_L|_interior`` of a residual."""
    if has_interior and has_boundary:
        return sup_boundary + interior_weight(dmap) * sup_interior
    return sup_interior if has_interior else sup_boundary


def fine_grids(domain: Domain, n_interior: int, n_boundary: int,
               factor: int = FINE_FACTOR, cap: int = FINE_CAP):
    """Validation grids ``factor`` times denser than the sampling, capped per block.

    The boundary grid is equidistant with a multiple of ``n_boundary`` points,
    so equidistant sampling points are contained in it.
    """
    fi = fb = None
    if n_interior:
        fi = interior_points(domain, min(factor * n_interior, cap))
    if n_boundary:
        nb = min(factor * n_boundary, max(cap - cap % n_boundary, n_boundary))
        fb = boundary_points(domain, nb)
    return fi, fb


def residual_summary(space: TrialSpace, dmap: DataMap, coeffs, case,
                     fine_interior, fine_boundary, system: SampledSystem | None = None
                     ) -> ResidualSummary:
    """Residual ``f - D(u_r)`` on the sampled rows and on fine grids."""
    coeffs = np.asarray(coeffs, dtype=float)
    ni = 0 if fine_interior is None else len(as_coords(fine_interior))
    nb = 0 if fine_boundary is None else len(as_coords(fine_boundary))
    if system is not None:
        for n_fine, n_disc, what in ((ni, system.n_interior, "interior"),
                                     (nb, system.n_boundary, "boundary")):
            if n_disc and n_fine < FINE_MIN_FACTOR * n_disc:
                raise InvalidArgument(
                    f"fine {what} grid ({n_fine}) must have >= {FINE_MIN_FACTOR}x "
                    f"the sampled points ({n_disc})"
                )
    sup_i = sup_b = 0.0
    if ni:
        r = case.interior_data(dmap.interior, fine_interior) - dmap.apply_interior(space, fine_interior) @ coeffs
        sup_i = float(np.max(np.abs(r)))
    if nb:
        r = case.boundary_data(fine_boundary) - space.value(fine_boundary) @ coeffs
        sup_b = float(np.max(np.abs(r)))
    combined = combine(sup_i, sup_b, dmap, bool(ni), bool(nb))

    d_sup = d_l2 = None
    if system is not None:
        r = system.b - system.A @ coeffs
        di, db = system.block_sups(r)
        d_sup = combine(di, db, dmap, system.n_interior > 0, system.n_boundary > 0)
        d_l2 = float(np.sqrt(np.mean(r**2)))
    return ResidualSummary(d_sup, d_l2, sup_i, sup_b, combined)
