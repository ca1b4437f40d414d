"""
The volume functional and the Euler-form flux through parallels.

volume() integrates sqrt(det(Id + (grad v)^T (grad v))) over S^{2n+1};
parallel_flux() integrates the pulled-back Euler form of the distribution
orthogonal to v over a parallel S^{2n}_theta. The Euler form is closed, so
the flux is the same on every parallel that does not sweep across a
singularity; its limits at the poles measure the singularities.
"""
import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from . import constants
from .base import ConfigurationError, DomainError
from .fields import ambient_jacobian, evaluate, field_frame, shape_matrix
from .matrixkit import elem_sym, graph_volume, lemma_sums, lemma_weights
from .spherekit import (GridSpec, QuadratureGrid, adapted_frame, build_grid, default_grid,
                        geodesic_distance, integrate, quad_parallel, quad_sliced, quad_sphere,
                        sphere_volume)

log = logging.getLogger(__name__)


# ═══════════════════════════════════════════════════════════════════
#  Result records
# ═══════════════════════════════════════════════════════════════════

@dataclass
class VolumeEstimate:
    """
    Integral of a density over S^{2n+1} with its error estimate.

    error is |value - value on the half-resolution grid| for deterministic
    grids and the standard error for Monte Carlo grids.
    """
    value: float
    error: float
    normalized: float
    grid: dict
    field: dict
    nodes: int
    seed: Optional[int] = None

    def to_dict(self):
        return {'value': self.value, 'error': self.error, 'normalized': self.normalized,
                'grid': self.grid, 'field': self.field, 'nodes': self.nodes, 'seed': self.seed}


@dataclass
class PoleLimit:
    """
    Extrapolated flux through small parallels around one end of the axis.

    limit is in the orientation of the parallels as boundaries of balls
    around the scan's pole; local_limit is in the orientation as boundaries
    of small balls around the point itself (equal to limit at the north end,
    its negative at the south end). index_estimate = local_limit / 2.
    """
    point: np.ndarray
    colatitudes: Tuple[float, ...]
    samples: Tuple[float, ...]
    limit: float
    local_limit: float
    spread: float

    @property
    def index_estimate(self):
        return self.local_limit / 2.0

    def to_dict(self):
        return {'point': [float(c) for c in self.point], 'colatitudes': list(self.colatitudes),
                'samples': list(self.samples), 'limit': self.limit,
                'local_limit': self.local_limit, 'index_estimate': self.index_estimate,
                'spread': self.spread}


@dataclass
class FluxScan:
    """Fluxes through parallels at increasing latitudes, with both pole limits."""
    pole: np.ndarray
    thetas: Tuple[float, ...]
    fluxes: Tuple[float, ...]
    north: Optional[PoleLimit] = None
    south: Optional[PoleLimit] = None
    grid: dict = field(default_factory=dict)

    @property
    def deviation(self):
        return float(max(self.fluxes) - min(self.fluxes))

    def to_dict(self):
        out = {'pole': [float(c) for c in self.pole], 'thetas': list(self.thetas),
               'fluxes': list(self.fluxes), 'deviation': self.deviation, 'grid': self.grid}
        if self.north is not None:
            out['north'] = self.north.to_dict()
        if self.south is not None:
            out['south'] = self.south.to_dict()
        return out

    def rows(self):
        """(theta, flux) pairs for tabular output."""
        return list(zip(self.thetas, self.fluxes))


@dataclass
class SingularFlux:
    """Flux through the geodesic sphere of a given radius around one point, local orientation."""
    point: np.ndarray
    radius: float
    flux: float

    @property
    def index_estimate(self):
        return self.flux / 2.0

    def to_dict(self):
        return {'point': [float(c) for c in self.point], 'radius': self.radius,
                'flux': self.flux, 'index_estimate': self.index_estimate}


# ═══════════════════════════════════════════════════════════════════
#  Densities
# ═══════════════════════════════════════════════════════════════════

def volume_integrand(f, x, frame=None, method='cauchy-binet'):
    """
    sqrt(det(Id + (grad v)^T (grad v))) at points x.

    Parameters
    ----------
    f : VectorFieldSpec
    x : array_like, shape (..., 2n+2)
    frame : array_like, optional
        Orthonormal tangent frame at x, shape (..., 2n+2, 2n+1). When given,
        the graph volume of the shape array in that frame is returned.
        Without a frame, grad v is taken as P Dv P with P the tangent
        projector, which is frame free.
    method : str, optional
        'cauchy-binet' or 'minors', passed to graph_volume when a frame is given.

    Returns
    -------
    np.ndarray
    """
    if frame is not None:
        return graph_volume(shape_matrix(f, x, frame).a, method=method)
    x = np.asarray(x, dtype=float)
    Dv = ambient_jacobian(f, x)
    P = np.eye(f.dim) - x[..., :, None] * x[..., None, :]
    K = P @ Dv @ P
    gram = np.einsum('...ki,...kj->...ij', K, K)
    return np.sqrt(np.linalg.det(np.eye(f.dim) + gram))


def bcn_density(f, x):
    """
    sum_k C(n,k) C(2n,2k)^-1 |sigma_2k(a_ij)|, the pointwise lower bound for
    the volume integrand. Principal minors are invariant under rotations of
    v^perp, so any orthonormal frame ending with v gives the same value.
    """
    A = shape_matrix(f, x, field_frame(f, x))
    total = 0.0
    for k, w in enumerate(lemma_weights(f.n)):
        total = total + w * np.abs(elem_sym(A.block, 2 * k))
    return total


def flux_density(f, x, pole):
    """
    Density of the Euler form of v^perp pulled back to the parallel through x,
    with respect to the boundary-of-ball orientation around the pole:

        orientation * (2 / vol S^2n) * sum_k w_k (sin(alpha) sigma_2k + cos(alpha) sigma_perp_2k(2n))

    with w_k = C(n,k) C(2n,2k)^-1 and alpha the angle of v against the parallel.

    Raises
    ------
    DegeneratePointError
        At x = +-pole.
    """
    x = np.asarray(x, dtype=float)
    v = evaluate(f, x)
    frame = adapted_frame(x, pole, v)
    s1, s2 = lemma_sums(shape_matrix(f, x, frame))
    scale = 2.0 / sphere_volume(2 * f.n)
    return frame.orientation * scale * (np.sin(frame.alpha) * s1 + np.cos(frame.alpha) * s2)


# ═══════════════════════════════════════════════════════════════════
#  Volume integrals
# ═══════════════════════════════════════════════════════════════════

def _check_grid(f, grid):
    if grid.ambient_dim != f.dim or grid.manifold_dim != 2 * f.n + 1:
        raise ConfigurationError(f"grid on S^{grid.manifold_dim} (ambient {grid.ambient_dim}) "
                                 f"does not match a field on S^{2 * f.n + 1}")
    if grid.kind == 'monte-carlo' and not f.bounded:
        raise ConfigurationError(f"Monte Carlo refused for the unbounded {f.kind} integrand "
                                 "(infinite second moment); use a sliced grid")
    if f.bounded:
        return
    if grid.kind == 'product':
        warnings.warn(f"product grid on the singular {f.kind} field; a sliced grid around "
                      "its pole keeps the integrand bounded.", UserWarning, stacklevel=3)
    elif grid.kind == 'sliced' and abs(abs(float(grid.pole @ f.pole)) - 1.0) > 1e-12:
        warnings.warn("sliced grid is not aligned with the field's singular axis.",
                      UserWarning, stacklevel=3)


def regrid(grid, spec):
    """A grid of the same kind, on the same sphere and axis, with another spec."""
    if spec.kind != grid.kind:
        raise ConfigurationError(f"cannot rebuild a {grid.kind} grid from a {spec.kind} spec")
    if grid.kind == 'product':
        return quad_sphere(grid.manifold_dim, spec)
    if grid.kind == 'sliced':
        return quad_sliced(grid.pole, spec)
    return build_grid(spec, grid.manifold_dim)


def _estimate(f, grid, density, refine):
    _check_grid(f, grid)
    result = integrate(grid, density)
    if grid.kind == 'monte-carlo':
        error = result.stderr
    elif refine:
        coarse = integrate(regrid(grid, grid.spec.halved()), density)
        error = abs(result.value - coarse.value)
    else:
        error = float('nan')
    value = result.value
    log.info("%s on %s grid (%d nodes): %.10g +- %.2g", f.kind, grid.kind, grid.size, value, error)
    return VolumeEstimate(value=value, error=float(error),
                          normalized=value / sphere_volume(2 * f.n + 1),
                          grid=grid.describe(), field=f.describe(), nodes=grid.size, seed=grid.seed)


def volume_grid(f, kind=None):
    """
    Default grid for the volume of f: product for bounded fields, sliced
    around the field's pole otherwise.
    """
    kind = kind or ('product' if f.bounded else 'sliced')
    spec = default_grid(f.n, kind)
    return build_grid(spec, 2 * f.n + 1, pole=f.pole)


def volume(f, grid=None, refine=True):
    """
    Volume of the unit field f, the integral of volume_integrand over S^{2n+1}.

    Parameters
    ----------
    f : VectorFieldSpec
    grid : QuadratureGrid, optional
        Defaults to volume_grid(f).
    refine : bool, optional
        Estimate the error from the half-resolution grid (deterministic grids only).

    Returns
    -------
    VolumeEstimate

    Raises
    ------
    ConfigurationError
        On a grid for another sphere, or Monte Carlo for an unbounded integrand.
    """
    grid = grid if grid is not None else volume_grid(f)
    return _estimate(f, grid, lambda x: volume_integrand(f, x), refine)


def bcn_integral(f, grid=None, refine=True):
    """Integral of bcn_density on the same grids as volume()."""
    grid = grid if grid is not None else volume_grid(f)
    return _estimate(f, grid, lambda x: bcn_density(f, x), refine)


def convergence(f, kind=None, levels=4):
    """
    Volume on a monotone sequence of refinements of the default grid.

    Level i uses the default resolution scaled by 2^(i - levels + 1), so the
    last level is the default grid itself.

    Returns
    -------
    list of dict
        level, grid descriptor, nodes, value, normalized and the change
        from the previous level.
    """
    if levels < 1:
        raise DomainError(f"levels must be >= 1, got {levels}")
    kind = kind or ('product' if f.bounded else 'sliced')
    base = default_grid(f.n, kind) if kind != 'monte-carlo' else GridSpec('monte-carlo', count=2 ** 16, seed=0)
    rows, previous = [], None
    for level in range(levels):
        spec = base.scaled(2.0 ** (level - levels + 1))
        est = volume(f, build_grid(spec, 2 * f.n + 1, pole=f.pole), refine=False)
        rows.append({'level': level, 'grid': est.grid, 'nodes': est.nodes, 'value': est.value,
                     'normalized': est.normalized,
                     'delta': None if previous is None else abs(est.value - previous)})
        previous = est.value
    return rows


# ═══════════════════════════════════════════════════════════════════
#  Fluxes
# ═══════════════════════════════════════════════════════════════════

def _parallel_spec(f, grid):
    if grid is None:
        return default_grid(f.n, 'parallel')
    if isinstance(grid, QuadratureGrid):
        return grid.spec
    if grid.kind != 'parallel':
        raise ConfigurationError(f"fluxes need a parallel grid spec, got '{grid.kind}'")
    return grid


def parallel_flux(f, pole, theta, grid=None):
    """
    Flux of the Euler form through the parallel at latitude theta.

    Parameters
    ----------
    f : VectorFieldSpec
    pole : array_like
    theta : float
        Latitude in (-pi/2, pi/2); the colatitude is pi/2 - theta.
    grid : GridSpec or QuadratureGrid, optional
        Parallel grid resolution; defaults per sphere parameter.

    Returns
    -------
    float
    """
    spec = _parallel_spec(f, grid)
    qgrid = quad_parallel(pole, theta, spec)
    return integrate(qgrid, lambda x: flux_density(f, x, qgrid.pole)).value


def _line_intercept(r, values):
    coeffs = np.polyfit(np.asarray(r) ** 2, np.asarray(values), 1)
    return float(coeffs[-1])


def pole_limit(f, pole, end='north', grid=None, colatitudes=constants.pole_colatitudes):
    """
    Flux limit at one end of the axis through the pole, from small parallels
    at the given colatitudes (measured from that end) and a line fit in r^2.

    Parameters
    ----------
    end : str
        'north' (the pole itself) or 'south' (its antipode).
    """
    if end not in ('north', 'south'):
        raise DomainError(f"end must be 'north' or 'south', got '{end}'")
    pole = np.asarray(pole, dtype=float)
    sign = 1.0 if end == 'north' else -1.0
    samples = tuple(parallel_flux(f, pole, sign * (math.pi / 2 - r), grid) for r in colatitudes)
    limit = _line_intercept(colatitudes, samples)
    spread = float(max(samples) - min(samples))
    if spread > 1e-2:
        warnings.warn(f"{end} pole samples spread by {spread:.3g}; the limit may be unreliable.",
                      UserWarning, stacklevel=2)
    return PoleLimit(point=sign * pole, colatitudes=tuple(colatitudes), samples=samples,
                     limit=limit, local_limit=sign * limit, spread=spread)


def stokes_scan(f, pole, thetas, grid=None, limits=True):
    """
    Fluxes through the parallels at the given latitudes, plus pole limits.

    Parameters
    ----------
    f : VectorFieldSpec
    pole : array_like
    thetas : sequence of float
        At least two latitudes in (-pi/2, pi/2); sorted before use.
    grid : GridSpec, optional
    limits : bool, optional
        Also extrapolate the flux at both ends of the axis.

    Returns
    -------
    FluxScan
    """
    thetas = sorted(float(t) for t in thetas)
    if len(thetas) < 2:
        raise DomainError("a Stokes scan needs at least two latitudes")
    if any(b <= a for a, b in zip(thetas, thetas[1:])):
        raise DomainError("scan latitudes must be distinct")
    pole = np.asarray(pole, dtype=float)
    fluxes = tuple(parallel_flux(f, pole, t, grid) for t in thetas)
    scan = FluxScan(pole=pole, thetas=tuple(thetas), fluxes=fluxes,
                    grid=_parallel_spec(f, grid).to_dict())
    if limits:
        scan.north = pole_limit(f, pole, 'north', grid)
        scan.south = pole_limit(f, pole, 'south', grid)
    log.info("stokes scan of %s: deviation %.3g", f.kind, scan.deviation)
    return scan


def singularity_fluxes(f, points, radius=None, grid=None):
    """
    Flux through the geodesic sphere of the given radius around each point,
    each oriented as the boundary of its own small ball.

    radius defaults to half the minimal pairwise distance, capped at 0.2.

    Raises
    ------
    ConfigurationError
        If radius exceeds half the minimal pairwise distance.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if len(points) > 1:
        dist = geodesic_distance(points[:, None, :], points[None, :, :])
        half = float(np.min(dist[~np.eye(len(points), dtype=bool)])) / 2.0
    else:
        half = math.pi / 2
    if radius is None:
        radius = min(0.2, half)
    elif radius > half:
        raise ConfigurationError(f"radius {radius} exceeds half the distance between singular points ({half:.4g})")
    out = []
    for q in points:
        out.append(SingularFlux(point=q, radius=float(radius),
                                flux=parallel_flux(f, q, math.pi / 2 - radius, grid)))
    return out
