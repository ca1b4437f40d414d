"""
Brouwer degree of sphere maps by the Kronecker integral, and Poincare
indices of isolated field singularities.
"""
import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import constants
from .base import ConfigurationError, DomainError, NumericFailure
from .fields import evaluate
from .spherekit import (GridSpec, geodesic_distance, integrate, quad_sphere,
                        sphere_point, sphere_volume, tangent_basis)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SphereMap:
    """
    A map S^m -> S^m given by a batched evaluator (k, m+1) -> (k, m+1).

    Derivatives are central differences along great circles,
    (F(normalize(y + h b)) - F(normalize(y - h b))) / 2h.
    """
    m: int
    func: Callable
    h: float = constants.fd_step
    name: str = 'map'

    def __call__(self, y):
        out = np.asarray(self.func(y), dtype=float)
        return out / np.linalg.norm(out, axis=-1, keepdims=True)


def identity_map(m):
    return SphereMap(m, lambda y: y, name='identity')


def antipodal_map(m):
    return SphereMap(m, lambda y: -y, name='antipodal')


def suspension_map(m, d):
    """Suspension of z -> z^d: (z, w) -> normalize(z^d, w) with z the first two coordinates."""
    if d < 1:
        raise DomainError(f"suspension exponent must be >= 1, got {d}")

    def func(y):
        z = (y[..., 0] + 1j * y[..., 1]) ** d
        out = np.array(y, copy=True)
        out[..., 0] = z.real
        out[..., 1] = z.imag
        return out

    return SphereMap(m, func, name=f'suspension-{d}')


def _step(y, b, h):
    y = y + h * b
    return y / np.linalg.norm(y, axis=-1, keepdims=True)


def degree_density(F, y):
    """det[F(y), dF(b_1), ..., dF(b_m)] for the oriented tangent basis b at y."""
    B = tangent_basis(y)
    cols = [F(y)]
    for i in range(F.m):
        b = B[..., :, i]
        cols.append((F(_step(y, b, F.h)) - F(_step(y, -b, F.h))) / (2.0 * F.h))
    return np.linalg.det(np.stack(cols, axis=-1))


def degree_grid(m):
    """Default product grid for degree integrals on S^m."""
    if m not in constants.degree_grid:
        raise ConfigurationError(f"no default degree grid for S^{m}")
    return quad_sphere(m, GridSpec('product', resolution=constants.degree_grid[m]))


def kronecker_degree(F, grid=None):
    """
    Degree of F as (1 / vol S^m) * integral of det[F, dF b_1, ..., dF b_m].

    Parameters
    ----------
    F : SphereMap
    grid : QuadratureGrid, optional
        Grid on S^m; defaults to degree_grid(F.m).

    Returns
    -------
    float
        Close to an integer for a smooth map.

    Raises
    ------
    NumericFailure
        If the integrand is not finite somewhere on the grid.
    """
    grid = grid if grid is not None else degree_grid(F.m)
    if grid.manifold_dim != F.m or grid.ambient_dim != F.m + 1:
        raise ConfigurationError(f"degree of a map of S^{F.m} needs a grid on S^{F.m}")

    def density(y):
        val = degree_density(F, y)
        if not np.all(np.isfinite(val)):
            raise NumericFailure(f"degree integrand of {F.name} is not finite")
        return val

    raw = integrate(grid, density).value / sphere_volume(F.m)
    log.debug("degree of %s on S^%d: %.8f", F.name, F.m, raw)
    return raw


# ═══════════════════════════════════════════════════════════════════
#  Poincare index
# ═══════════════════════════════════════════════════════════════════

@dataclass
class IndexReport:
    point: np.ndarray
    radius: float
    raw_degree: float
    index: int
    residual: float

    def check(self, tol=1e-2):
        """Raise NumericFailure if the degree is not within tol of an integer."""
        if self.residual > tol:
            raise NumericFailure(f"index residual {self.residual:.3g} exceeds {tol}")
        return self

    def to_dict(self):
        return {'point': [float(c) for c in self.point], 'radius': self.radius,
                'raw_degree': self.raw_degree, 'index': self.index, 'residual': self.residual}


def chart_basis(p):
    """
    Orthonormal basis of T_p from Gram-Schmidt of the projected coordinate
    vectors, skipping the one most aligned with p; det[p, E] > 0.
    """
    p = sphere_point(p, normalize=True)
    d = p.shape[-1]
    keep = [i for i in range(d) if i != int(np.argmax(np.abs(p)))]
    W = np.eye(d)[:, keep] - np.outer(p, p[keep])
    Q, R = np.linalg.qr(W)
    E = Q * np.sign(np.diag(R))
    if np.linalg.det(np.column_stack([p, E])) < 0:
        E[:, 0] = -E[:, 0]
    return E


def chart_map(f, p, radius, basis=None):
    """
    The map y -> direction of v in the exponential chart at p, on the unit
    sphere of T_p = R^{2n+1}, evaluated at distance radius from p.
    """
    E = chart_basis(p) if basis is None else np.asarray(basis, dtype=float)
    p = sphere_point(p, normalize=True)
    c, s = np.cos(radius), np.sin(radius)

    def func(y):
        x = c * p + s * (y @ E.T)
        v = evaluate(f, x / np.linalg.norm(x, axis=-1, keepdims=True))
        d_rho = -s * p + c * (y @ E.T)
        radial = np.sum(v * d_rho, axis=-1)
        perp = v - radial[..., None] * d_rho
        return radial[..., None] * y + (radius / s) * (perp @ E)

    return SphereMap(2 * f.n, func, name=f'{f.kind}-chart')


def field_index(f, p, radius=0.1, grid=None, basis=None):
    """
    Poincare index of f at an isolated singular point p.

    Parameters
    ----------
    f : VectorFieldSpec
    p : array_like
    radius : float, optional
        Radius of the geodesic sphere around p; at most half the distance to
        any other singular point.
    grid : QuadratureGrid, optional
        Grid on S^{2n}; defaults to degree_grid(2n).
    basis : array_like, optional
        Orthonormal basis of T_p for the chart; defaults to chart_basis(p).

    Returns
    -------
    IndexReport

    Raises
    ------
    ConfigurationError
        If another singular point lies within twice the radius.
    """
    p = sphere_point(p, normalize=True)
    if not 0 < radius < np.pi / 2:
        raise DomainError(f"radius must lie in (0, pi/2), got {radius}")
    for q in f.singular_points():
        dist = float(geodesic_distance(p, q))
        if dist > constants.singular_distance and radius > dist / 2:
            raise ConfigurationError(f"radius {radius} exceeds half the distance {dist:.4g} to another singular point")
    raw = kronecker_degree(chart_map(f, p, radius, basis), grid)
    index = int(np.rint(raw))
    report = IndexReport(point=p, radius=float(radius), raw_degree=float(raw),
                         index=index, residual=float(abs(raw - index)))
    log.info("index of %s at %s: %d (residual %.2g)", f.kind, np.round(p, 6), index, report.residual)
    return report
