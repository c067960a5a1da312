"""Trial spaces with analytic values, gradients and Laplacians.

Every trial space maps an ``(n, 2)`` point array to an ``(n, M)`` matrix
(values, Laplacians) or an ``(n, M, 2)`` array (gradients), one column per
basis function.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import chebyshev as cheb

from . import _radial
from .errors import InvalidArgument, InvalidConfiguration, SingularEvaluation
from .geometry import Domain, PointSet, Tag, as_coords

SINGULAR_TOL = 1e-14


class TrialSpace:
    """Finite family of basis functions ``u_1 .. u_M``."""

    name = "trial"

    @property
    def dim(self) -> int:
        raise NotImplementedError

    def value(self, pts) -> np.ndarray:
        raise NotImplementedError

    def gradient(self, pts) -> np.ndarray:
        raise NotImplementedError

    def laplacian(self, pts) -> np.ndarray:
        raise NotImplementedError

    def describe(self) -> dict:
        return {"family": self.name, "M": self.dim}

    def __call__(self, coeffs, pts) -> np.ndarray:
        """Evaluate the linear combination ``sum_j coeffs[j] u_j`` at ``pts``."""
        return self.value(pts) @ np.asarray(coeffs, dtype=float)


# --------------------------------------------------------------------------
# Polynomials


class ChebyshevBasis1D(TrialSpace):
    """T_0 .. T_{M-1} on [-1, 1], embedded on the x axis."""

    name = "poly1d"

    def __init__(self, order: int):
        if order < 1:
            raise InvalidArgument("polynomial order must be >= 1")
        self.order = int(order)
        eye = np.eye(self.order)
        # coefficient maps T_j -> T_j', T_j''; a single zero row once exhausted
        self._d1 = cheb.chebder(eye, 1, axis=0)
        self._d2 = cheb.chebder(eye, 2, axis=0)

    @property
    def dim(self):
        return self.order

    @staticmethod
    def _deriv(x, d):
        return cheb.chebvander(x, d.shape[0] - 1) @ d

    def value(self, pts):
        x = as_coords(pts)[:, 0]
        return cheb.chebvander(x, self.order - 1)

    def gradient(self, pts):
        x = as_coords(pts)[:, 0]
        g = np.zeros((len(x), self.order, 2))
        g[:, :, 0] = self._deriv(x, self._d1)
        return g

    def laplacian(self, pts):
        x = as_coords(pts)[:, 0]
        return self._deriv(x, self._d2)

    def describe(self):
        return {"family": self.name, "M": self.dim, "order": self.order}


def poly_basis_1d(order: int) -> ChebyshevBasis1D:
    return ChebyshevBasis1D(order)


class ChebyshevBasis2D(TrialSpace):
    """Total-degree products T_i(xi) T_j(eta), i + j <= degree, on the bounding box."""

    name = "poly2d"

    def __init__(self, degree: int, domain: Domain):
        if degree < 0:
            raise InvalidArgument("degree must be >= 0")
        self.degree = int(degree)
        self.domain = domain
        ax, ay, bx, by = domain.bbox
        self._center = np.array([(ax + bx) / 2, (ay + by) / 2])
        self._scale = np.array([2 / (bx - ax), 2 / (by - ay)])
        self._pairs = [(i, k - i) for k in range(degree + 1) for i in range(k + 1)]
        self._1d = ChebyshevBasis1D(degree + 1)

    @property
    def dim(self):
        return len(self._pairs)

    def _factors(self, pts):
        p = (as_coords(pts) - self._center) * self._scale
        b = self._1d
        out = []
        for coord in (p[:, 0], p[:, 1]):
            v = b.value(coord)
            d1 = b.gradient(coord)[:, :, 0]
            d2 = b.laplacian(coord)
            out.append((v, d1, d2))
        return out

    def value(self, pts):
        (vx, _, _), (vy, _, _) = self._factors(pts)
        i, j = np.array(self._pairs).T
        return vx[:, i] * vy[:, j]

    def gradient(self, pts):
        (vx, dx, _), (vy, dy, _) = self._factors(pts)
        i, j = np.array(self._pairs).T
        return np.stack(
            [dx[:, i] * vy[:, j] * self._scale[0], vx[:, i] * dy[:, j] * self._scale[1]],
            axis=-1,
        )

    def laplacian(self, pts):
        (vx, _, ddx), (vy, _, ddy) = self._factors(pts)
        i, j = np.array(self._pairs).T
        sx2, sy2 = self._scale**2
        return ddx[:, i] * vy[:, j] * sx2 + vx[:, i] * ddy[:, j] * sy2

    def describe(self):
        return {"family": self.name, "M": self.dim, "degree": self.degree}


def poly_basis_2d(degree: int, domain: Domain) -> ChebyshevBasis2D:
    return ChebyshevBasis2D(degree, domain)


class HarmonicBasis(TrialSpace):
    """1, Re z^k, Im z^k for k = 1..K."""

    name = "harmonic"

    def __init__(self, K: int):
        if K < 0:
            raise InvalidArgument("harmonic order must be >= 0")
        self.K = int(K)

    @property
    def dim(self):
        return 2 * self.K + 1

    def _powers(self, pts):
        p = as_coords(pts)
        z = p[:, 0] + 1j * p[:, 1]
        zk = np.ones((len(z), self.K + 1), dtype=complex)
        for k in range(1, self.K + 1):
            zk[:, k] = zk[:, k - 1] * z
        return zk

    def value(self, pts):
        zk = self._powers(pts)
        out = np.empty((len(zk), self.dim))
        out[:, 0] = 1.0
        out[:, 1::2] = zk[:, 1:].real
        out[:, 2::2] = zk[:, 1:].imag
        return out

    def gradient(self, pts):
        zk = self._powers(pts)
        k = np.arange(1, self.K + 1)
        dz = k * zk[:, :-1]  # d/dz z^k
        g = np.zeros((len(zk), self.dim, 2))
        g[:, 1::2, 0], g[:, 1::2, 1] = dz.real, -dz.imag
        g[:, 2::2, 0], g[:, 2::2, 1] = dz.imag, dz.real
        return g

    def laplacian(self, pts):
        return np.zeros((len(as_coords(pts)), self.dim))

    def describe(self):
        return {"family": self.name, "M": self.dim, "K": self.K}


def harmonic_basis(K: int) -> HarmonicBasis:
    return HarmonicBasis(K)


# --------------------------------------------------------------------------
# Fundamental solutions


class FundamentalSolutions(TrialSpace):
    """Charges -log|p - y_j| / (2 pi) placed outside the domain."""

    name = "mfs"

    def __init__(self, charges):
        self.charges = np.array(as_coords(charges))
        self.charges.setflags(write=False)

    @property
    def dim(self):
        return len(self.charges)

    def _diff(self, pts):
        d = as_coords(pts)[:, None, :] - self.charges[None, :, :]
        r2 = np.einsum("ijk,ijk->ij", d, d)
        if np.any(r2 < SINGULAR_TOL**2):
            raise SingularEvaluation("evaluation at an MFS charge location")
        return d, r2

    def value(self, pts):
        _, r2 = self._diff(pts)
        return -np.log(r2) / (4 * np.pi)

    def gradient(self, pts):
        d, r2 = self._diff(pts)
        return -d / (2 * np.pi * r2[:, :, None])

    def laplacian(self, pts):
        self._diff(pts)
        return np.zeros((len(as_coords(pts)), self.dim))


def mfs_basis(charges: PointSet, domain: Domain | None = None) -> FundamentalSolutions:
    domain = domain if domain is not None else getattr(charges, "domain", None)
    if isinstance(charges, PointSet) and charges.tag is not Tag.FICTITIOUS:
        raise InvalidArgument("MFS charges must carry the fictitious tag")
    if domain is not None and not np.all(domain.outside_closure(charges)):
        raise InvalidArgument("MFS charges must lie strictly outside the closed domain")
    return FundamentalSolutions(charges)


# --------------------------------------------------------------------------
# Radial kernels


class KernelFamily(str, enum.Enum):
    MATERN52 = "matern52"
    MATERN72 = "matern72"
    GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class Kernel:
    """Radial positive definite kernel ``phi(shape * r)`` with ``phi(0) = 1``."""

    family: KernelFamily
    shape: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "family", KernelFamily(self.family))
        if not (self.shape > 0 and math.isfinite(self.shape)):
            raise InvalidArgument("kernel shape must be positive")

    @property
    def smoothness(self) -> float:
        return _radial.FAMILIES[self.family.value]["smoothness"]

    def _p(self, name, r):
        return _radial.profile(self.family.value, name)(self.shape * np.asarray(r))

    def phi(self, r):
        return self._p("phi", r)

    def dphi_over_r(self, r):
        """phi'(r) / r, regular at the center."""
        return self.shape**2 * self._p("dphi_s", r)

    def lap(self, r):
        """2D Laplacian of the radial function."""
        return self.shape**2 * self._p("lap", r)

    def dlap_over_r(self, r):
        return self.shape**4 * self._p("dlap_s", r)

    def lap2(self, r):
        """2D bi-Laplacian of the radial function."""
        return self.shape**4 * self._p("lap2", r)


def _diffs(pts, centers):
    d = as_coords(pts)[:, None, :] - centers[None, :, :]
    return d, np.sqrt(np.einsum("ijk,ijk->ij", d, d))


class KernelBasis(TrialSpace):
    """Translates ``phi(shape |p - c_j|)`` of a radial kernel."""

    def __init__(self, centers, kernel: Kernel):
        self.centers = np.array(as_coords(centers))
        if len(self.centers) == 0:
            raise InvalidArgument("kernel basis needs at least one center")
        self.centers.setflags(write=False)
        self.kernel = kernel

    @property
    def name(self):
        return f"kernel:{self.kernel.family.value}"

    @property
    def dim(self):
        return len(self.centers)

    def value(self, pts):
        return self.kernel.phi(_diffs(pts, self.centers)[1])

    def gradient(self, pts):
        d, r = _diffs(pts, self.centers)
        return self.kernel.dphi_over_r(r)[:, :, None] * d

    def laplacian(self, pts):
        return self.kernel.lap(_diffs(pts, self.centers)[1])

    def describe(self):
        return {"family": self.name, "M": self.dim, "shape": self.kernel.shape}


def kernel_basis(centers, kernel: Kernel) -> KernelBasis:
    return KernelBasis(centers, kernel)


class RepresenterBasis(TrialSpace):
    """Riesz representers ``lambda_j^y K(., y)`` of point functionals.

    Boundary functionals are plain point evaluations at ``boundary_pts``; interior
    functionals apply ``L = alpha Id + beta Laplacian`` at ``interior_pts``.
    Columns are ordered interior first, then boundary.
    """

    def __init__(self, kernel: Kernel, alpha: float, beta: float, interior_pts, boundary_pts):
        self.kernel = kernel
        self.alpha, self.beta = float(alpha), float(beta)
        self.interior = np.array(as_coords(interior_pts)).reshape(-1, 2)
        self.boundary = np.array(as_coords(boundary_pts)).reshape(-1, 2)

    @property
    def name(self):
        return f"representers:{self.kernel.family.value}"

    @property
    def n_interior(self):
        return len(self.interior)

    @property
    def dim(self):
        return len(self.interior) + len(self.boundary)

    def value(self, pts):
        k, a, b = self.kernel, self.alpha, self.beta
        _, ri = _diffs(pts, self.interior)
        _, rb = _diffs(pts, self.boundary)
        return np.hstack([a * k.phi(ri) + b * k.lap(ri), k.phi(rb)])

    def gradient(self, pts):
        k, a, b = self.kernel, self.alpha, self.beta
        di, ri = _diffs(pts, self.interior)
        db, rb = _diffs(pts, self.boundary)
        gi = (a * k.dphi_over_r(ri) + b * k.dlap_over_r(ri))[:, :, None] * di
        gb = k.dphi_over_r(rb)[:, :, None] * db
        return np.concatenate([gi, gb], axis=1)

    def laplacian(self, pts):
        k, a, b = self.kernel, self.alpha, self.beta
        _, ri = _diffs(pts, self.interior)
        _, rb = _diffs(pts, self.boundary)
        return np.hstack([a * k.lap(ri) + b * k.lap2(ri), k.lap(rb)])


# --------------------------------------------------------------------------


def eval_basis(space: TrialSpace, points, what: str = "value") -> np.ndarray:
    """Matrix with entry (i, j) = requested evaluator of u_j at points[i]."""
    if what == "value":
        return space.value(points)
    if what == "laplacian":
        return space.laplacian(points)
    if what == "gradient":
        return space.gradient(points)
    raise InvalidArgument(f"unknown evaluator {what!r}")


def require_smoothness(kernel: Kernel, needed: int, purpose: str):
    """Reject kernels without more than ``needed`` continuous derivatives."""
    if not kernel.smoothness > needed:
        raise InvalidConfiguration(
            f"kernel {kernel.family.value} (C^{kernel.smoothness}) too rough for {purpose}"
        )


class SumSpace(TrialSpace):
    """Direct sum of trial spaces; coefficients are concatenated in order."""

    def __init__(self, spaces):
        self.spaces = list(spaces)
        self.name = "+".join(s.name for s in self.spaces)

    @property
    def dim(self):
        return sum(s.dim for s in self.spaces)

    def _cat(self, method, pts, axis=1):
        return np.concatenate([getattr(s, method)(pts) for s in self.spaces], axis=axis)

    def value(self, pts):
        return self._cat("value", pts)

    def gradient(self, pts):
        return self._cat("gradient", pts)

    def laplacian(self, pts):
        return self._cat("laplacian", pts)
