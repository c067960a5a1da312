"""Data maps ``D(u) = (L u | interior, u | boundary)`` and manufactured solutions."""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .basis import TrialSpace
from .errors import InvalidConfiguration, NotFound, UnsupportedCertificate
from .geometry import Domain, UnitDisk, as_coords


class Interior(str, enum.Enum):
    NEG_LAPLACE = "neg_laplace"
    ID_MINUS_LAPLACE = "id_minus_laplace"
    NONE = "none"

    @property
    def coefficients(self) -> tuple[float, float]:
        """(alpha, beta) with L = alpha Id + beta Laplacian."""
        return {"neg_laplace": (0.0, -1.0), "id_minus_laplace": (1.0, -1.0)}[self.value]


@dataclass(frozen=True)
class DataMap:
    """Interior operator plus Dirichlet trace on ``domain``.

    ``interior = NONE`` is the Trefftz setting: only boundary values are data.
    """

    interior: Interior
    domain: Domain = field(default_factory=UnitDisk)
    boundary: str = "dirichlet"

    def __post_init__(self):
        object.__setattr__(self, "interior", Interior(self.interior))
        if self.boundary != "dirichlet":
            raise InvalidConfiguration("only Dirichlet traces are supported")

    @property
    def has_interior(self) -> bool:
        return self.interior is not Interior.NONE

    def apply_interior(self, space: TrialSpace, pts) -> np.ndarray:
        if not self.has_interior:
            raise InvalidConfiguration("data map has no interior operator")
        alpha, beta = self.interior.coefficients
        out = beta * space.laplacian(pts)
        if alpha:
            out = out + alpha * space.value(pts)
        return out


@dataclass(frozen=True)
class DataBlock:
    """Sampled functionals applied to a trial basis, with per-row metadata."""

    matrix: np.ndarray
    kind: np.ndarray
    locations: np.ndarray

    @property
    def n_interior(self) -> int:
        return int(np.sum(self.kind == "interior"))

    @property
    def n_boundary(self) -> int:
        return int(np.sum(self.kind == "boundary"))


def _npts(pts):
    return 0 if pts is None else len(as_coords(pts))


def apply_datamap(space: TrialSpace, dmap: DataMap, interior_pts, boundary_pts) -> DataBlock:
    """Stack ``[L u_j(x_i)]`` over ``[u_j(y_i)]``."""
    blocks, kinds, locs = [], [], []
    if _npts(interior_pts):
        if not dmap.has_interior:
            raise InvalidConfiguration("interior rows requested for a boundary-only data map")
        x = as_coords(interior_pts)
        blocks.append(dmap.apply_interior(space, x))
        kinds += ["interior"] * len(x)
        locs.append(x)
    if _npts(boundary_pts):
        y = as_coords(boundary_pts)
        blocks.append(space.value(y))
        kinds += ["boundary"] * len(y)
        locs.append(y)
    if not blocks:
        raise InvalidConfiguration("no sampling points supplied")
    return DataBlock(np.vstack(blocks), np.array(kinds), np.vstack(locs))


class ImageSpace(TrialSpace):
    """The trial image ``L(U_r)`` viewed as a space of functions on the interior."""

    def __init__(self, space: TrialSpace, dmap: DataMap):
        self.space, self.dmap = space, dmap
        self.name = f"{dmap.interior.value}({space.name})"

    @property
    def dim(self):
        return self.space.dim

    def value(self, pts):
        if not self.dmap.has_interior:
            return self.space.value(pts)
        return self.dmap.apply_interior(self.space, pts)


def image_space(space: TrialSpace, dmap: DataMap) -> ImageSpace:
    return ImageSpace(space, dmap)


def wp_constant(dmap: DataMap) -> float:
    """Coefficient C in ``|u|_inf <= |u|_inf,boundary + C |L u|_inf``.

    Uses the barrier ``(R^2 - |x - c|^2) / 4`` with ``-Laplacian = 1`` and
    ``R`` the circumradius about the centroid.  Boundary-only maps of
    harmonic trial spaces return 0 (maximum principle).
    """
    if dmap.interior is Interior.NONE:
        return 0.0
    if dmap.interior is Interior.NEG_LAPLACE:
        return dmap.domain.circumradius**2 / 4.0
    raise UnsupportedCertificate(
        f"no explicit well-posedness constant for {dmap.interior.value}"
    )


# --------------------------------------------------------------------------
# Manufactured solutions


class DataFunctions:
    """Problem data supplied as plain callables of an ``(n, 2)`` array."""

    name = "custom"
    harmonic = False

    def __init__(self, interior: Callable | None, boundary: Callable):
        self._interior, self._boundary = interior, boundary

    def interior_data(self, interior: Interior, pts) -> np.ndarray:
        if self._interior is None:
            return np.zeros(len(as_coords(pts)))
        return np.asarray(self._interior(as_coords(pts)), dtype=float)

    def boundary_data(self, pts) -> np.ndarray:
        return np.asarray(self._boundary(as_coords(pts)), dtype=float)

    def scaled(self, factor: float) -> "DataFunctions":
        fi, fb = self._interior, self._boundary
        return DataFunctions(
            None if fi is None else (lambda p: factor * fi(p)),
            lambda p: factor * fb(p),
        )


@dataclass(frozen=True)
class ManufacturedCase:
    """Closed-form solution ``u*`` with its Laplacian and gradient."""

    name: str
    u: Callable
    lap: Callable
    grad: Callable
    harmonic: bool
    note: str = ""
    params: dict = field(default_factory=dict)

    def solution(self, pts) -> np.ndarray:
        p = as_coords(pts)
        return self.u(p[:, 0], p[:, 1])

    def laplacian(self, pts) -> np.ndarray:
        p = as_coords(pts)
        return np.broadcast_to(self.lap(p[:, 0], p[:, 1]), (len(p),)).astype(float)

    def gradient(self, pts) -> np.ndarray:
        p = as_coords(pts)
        gx, gy = self.grad(p[:, 0], p[:, 1])
        return np.column_stack([np.broadcast_to(gx, (len(p),)), np.broadcast_to(gy, (len(p),))])

    def interior_data(self, interior: Interior, pts) -> np.ndarray:
        interior = Interior(interior)
        if interior is Interior.NONE:
            return np.zeros(len(as_coords(pts)))
        alpha, beta = interior.coefficients
        return alpha * self.solution(pts) + beta * self.laplacian(pts)

    def boundary_data(self, pts) -> np.ndarray:
        return self.solution(pts)

    def describe(self) -> dict:
        return {"name": self.name, **self.params}


def _harmonic_cubic():
    return ManufacturedCase(
        "harmonic_cubic",
        u=lambda x, y: x**3 - 3 * x * y**2,
        lap=lambda x, y: 0.0 * x,
        grad=lambda x, y: (3 * x**2 - 3 * y**2, -6 * x * y),
        harmonic=True,
        note="polynomial, lies in harmonic_basis(K) for K >= 3",
    )


def _exp_harmonic():
    return ManufacturedCase(
        "exp_harmonic",
        u=lambda x, y: np.exp(x) * np.cos(y),
        lap=lambda x, y: 0.0 * x,
        grad=lambda x, y: (np.exp(x) * np.cos(y), -np.exp(x) * np.sin(y)),
        harmonic=True,
        note="entire harmonic function Re exp(z)",
    )


def _gaussian_bump():
    def u(x, y):
        return np.exp(-(x**2) - y**2)

    return ManufacturedCase(
        "gaussian_bump",
        u=u,
        lap=lambda x, y: (4 * (x**2 + y**2) - 4) * u(x, y),
        grad=lambda x, y: (-2 * x * u(x, y), -2 * y * u(x, y)),
        harmonic=False,
        note="analytic, not harmonic",
    )


def _exp_linear(a=1.0, b=1.0):
    a, b = float(a), float(b)

    def u(x, y):
        return np.exp(a * x + b * y)

    return ManufacturedCase(
        "exp_linear",
        u=u,
        lap=lambda x, y: (a**2 + b**2) * u(x, y),
        grad=lambda x, y: (a * u(x, y), b * u(x, y)),
        harmonic=(a == 0 and b == 0),
        note="entire; low-degree polynomials approximate it to machine precision",
        params={"a": a, "b": b},
    )


REGISTRY = {
    "harmonic_cubic": _harmonic_cubic,
    "exp_harmonic": _exp_harmonic,
    "gaussian_bump": _gaussian_bump,
    "exp_linear": _exp_linear,
}

_CHECK_POINTS = np.array([[0.1, -0.2], [0.35, 0.4], [-0.5, 0.25], [0.0, 0.0], [-0.3, -0.6]])


def _fd_consistent(case: ManufacturedCase, h=1e-3, tol=1e-5) -> bool:
    p = _CHECK_POINTS
    ex, ey = np.array([h, 0.0]), np.array([0.0, h])
    f = case.solution
    lap_fd = (f(p + ex) + f(p - ex) + f(p + ey) + f(p - ey) - 4 * f(p)) / h**2
    gx = (f(p + ex) - f(p - ex)) / (2 * h)
    gy = (f(p + ey) - f(p - ey)) / (2 * h)
    g = case.gradient(p)
    return bool(
        np.all(np.abs(lap_fd - case.laplacian(p)) < tol)
        and np.all(np.abs(gx - g[:, 0]) < tol)
        and np.all(np.abs(gy - g[:, 1]) < tol)
    )


def manufactured(name: str, **params) -> ManufacturedCase:
    """Look up a manufactured case; ``"exp_linear(2,1)"`` style arguments accepted."""
    m = re.fullmatch(r"\s*(\w+)\s*(?:\((.*)\))?\s*", name)
    if m is None or m.group(1) not in REGISTRY:
        raise NotFound(f"unknown manufactured case {name!r}")
    key, args = m.groups()
    if args:
        vals = [float(v) for v in args.split(",")]
        params = {**dict(zip(("a", "b"), vals)), **params}
    case = REGISTRY[key](**params)
    if not _fd_consistent(case):
        raise RuntimeError(f"manufactured case {name!r} failed its consistency check")
    return case
