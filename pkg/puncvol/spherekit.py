"""
Round-sphere geometry and quadrature.

Points are ambient numpy vectors of unit length; every geometric helper
accepts stacks of points with the ambient coordinate last. Grids are
generated lazily in chunks so that high-dimensional product grids never
have to be held in memory at once.
"""
import logging
import math
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np
from scipy import special

from . import constants
from .base import ConfigurationError, DegeneratePointError, DomainError, worker_count

log = logging.getLogger(__name__)


def _validate_kind(kind):
    if kind not in constants.grid_kinds:
        raise ConfigurationError(f"grid kind must be one of {constants.grid_kinds}, got '{kind}'")


# ═══════════════════════════════════════════════════════════════════
#  Points, volumes, tangent spaces
# ═══════════════════════════════════════════════════════════════════

def sphere_point(x, normalize=False):
    """
    Validate (or normalize) an ambient vector as a point of the unit sphere.

    Parameters
    ----------
    x : array_like, shape (..., d)
    normalize : bool, optional
        If True, rescale to unit length instead of checking it.

    Returns
    -------
    np.ndarray

    Raises
    ------
    DomainError
        If the norm differs from 1 by more than 1e-12 (or is zero when normalizing).
    """
    x = np.asarray(x, dtype=float)
    if x.ndim < 1 or x.shape[-1] < 2:
        raise DomainError(f"a sphere point needs at least two ambient coordinates, got shape {x.shape}")
    norm = np.linalg.norm(x, axis=-1, keepdims=True)
    if normalize:
        if np.any(norm == 0) or not np.all(np.isfinite(norm)):
            raise DomainError("cannot normalize a zero or non-finite vector onto the sphere")
        return x / norm
    if np.any(np.abs(norm - 1.0) > 1e-12):
        raise DomainError("point is not on the unit sphere (| |x| - 1 | > 1e-12)")
    return x


def sphere_volume(m):
    """
    Volume of the unit sphere S^m, 2 pi^((m+1)/2) / Gamma((m+1)/2).

    Raises
    ------
    DomainError
        If m < 1.
    """
    if int(m) != m or m < 1:
        raise DomainError(f"sphere dimension must be an integer >= 1, got {m}")
    return 2.0 * math.pi ** ((m + 1) / 2) / special.gamma((m + 1) / 2)


def tangent_project(x, w):
    """w - <w, x> x, the component of w tangent to the sphere at x."""
    x = np.asarray(x, dtype=float)
    w = np.asarray(w, dtype=float)
    return w - np.sum(w * x, axis=-1, keepdims=True) * x


def geodesic_distance(x, y):
    """Great-circle distance, stable near 0 and pi."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    chord = np.linalg.norm(x - y, axis=-1)
    return 2.0 * np.arcsin(np.clip(chord / 2.0, 0.0, 1.0))


def tangent_basis(x):
    """
    Orthonormal basis of T_x S^m with det[x, b_1, ..., b_m] = +1.

    Built from the Householder reflection taking x to a multiple of the
    first coordinate vector, so it is smooth away from a hyperplane and
    well conditioned everywhere.

    Parameters
    ----------
    x : array_like, shape (..., m+1)

    Returns
    -------
    np.ndarray, shape (..., m+1, m)
        Basis vectors are the columns.
    """
    x = np.asarray(x, dtype=float)
    d = x.shape[-1]
    s = np.where(x[..., 0] >= 0, -1.0, 1.0)
    w = np.array(x, copy=True)
    w[..., 0] -= s
    H = np.eye(d) - 2.0 * w[..., :, None] * w[..., None, :] / np.sum(w * w, axis=-1)[..., None, None]
    basis = H[..., :, 1:].copy()
    basis[..., :, 0] *= -s[..., None]
    return basis


def _unit(w, tol):
    norm = np.linalg.norm(w, axis=-1, keepdims=True)
    if np.any(norm < tol):
        return None, norm[..., 0]
    return w / norm, norm[..., 0]


def _flip_first_if(E, negative):
    E = np.array(E, copy=True)
    E[..., :, 0] = np.where(negative[..., None], -E[..., :, 0], E[..., :, 0])
    return E


def _complement(x, w):
    """Orthonormal columns spanning {x, w}^perp (x, w orthonormal)."""
    Q, _ = np.linalg.qr(np.stack([x, w], axis=-1), mode='complete')
    return Q[..., :, 2:]


def parallel_frame(x, pole):
    """
    Pole-ward normal and oriented tangent basis of the parallel through x.

    Parameters
    ----------
    x, pole : array_like, shape (..., 2n+2)

    Returns
    -------
    N : np.ndarray, shape (..., 2n+2)
        Unit tangent at x pointing toward the pole along the meridian.
    basis : np.ndarray, shape (..., 2n+2, 2n)
        Columns e_1, ..., e_{2n-1} span the tangent space of the parallel
        and the last column is N. det[x, basis] = +1, which makes
        (-N, e_1, ..., e_{2n-1}) positively oriented: the parallel is
        oriented as the boundary of the geodesic ball around the pole.

    Raises
    ------
    DegeneratePointError
        If x = +-pole.
    """
    x = np.asarray(x, dtype=float)
    pole = np.broadcast_to(np.asarray(pole, dtype=float), x.shape)
    N, norm = _unit(tangent_project(x, pole), constants.singular_distance)
    if N is None:
        raise DegeneratePointError("parallel frame requested at the pole or its antipode")
    C = _complement(x, N)
    basis = np.concatenate([C, N[..., :, None]], axis=-1)
    det = np.linalg.det(np.concatenate([x[..., :, None], basis], axis=-1))
    return N, _flip_first_if(basis, det < 0)


@dataclass(frozen=True, eq=False)
class ParallelSpec:
    """
    The parallel at latitude theta around a pole, i.e. the geodesic sphere
    of radius r = pi/2 - theta about the pole.
    """
    pole: np.ndarray
    theta: float

    def __post_init__(self):
        object.__setattr__(self, 'pole', sphere_point(self.pole, normalize=True))
        if not abs(self.theta) < math.pi / 2:
            raise DomainError(f"latitude must lie strictly inside (-pi/2, pi/2), got {self.theta}")

    @property
    def colatitude(self):
        return math.pi / 2 - self.theta

    @property
    def n(self):
        return (self.pole.shape[-1] - 2) // 2


# ═══════════════════════════════════════════════════════════════════
#  Adapted frames
# ═══════════════════════════════════════════════════════════════════

@dataclass(frozen=True, eq=False)
class AdaptedFrame:
    """
    Frame {e_1, ..., e_2n, e_2n+1 = v} at points x of a parallel.

    Attributes
    ----------
    e : np.ndarray, shape (..., 2n+2, 2n+1)
        Frame vectors as columns; the last one is v.
    alpha : np.ndarray
        Angle with sin(alpha) = <v, N>, N the pole-ward normal.
    u : np.ndarray, shape (..., 2n+2)
        sin(alpha) e_2n + cos(alpha) v, the last tangent vector of the parallel.
    orientation : np.ndarray
        Sign of (e_1, ..., e_{2n-1}, u) against the boundary orientation of
        the parallel. With the ambient frame positively oriented this is -1.
    degenerate : np.ndarray of bool
        True where |<v, N>| = 1 and e_2n is an arbitrary admissible completion.
    """
    e: np.ndarray
    alpha: np.ndarray
    u: np.ndarray
    orientation: np.ndarray
    degenerate: np.ndarray

    @property
    def v(self):
        return self.e[..., :, -1]


def adapted_frame(x, pole, v):
    """
    Build the adapted frame of a unit tangent field at points of parallels.

    e_1..e_{2n-1} span T(parallel) intersected with v^perp, e_2n completes
    them together with v, and det[x, e_1, ..., e_2n, v] = +1.

    Parameters
    ----------
    x, pole, v : array_like, shape (..., 2n+2)

    Returns
    -------
    AdaptedFrame

    Raises
    ------
    DomainError
        If v is not a unit vector tangent at x.
    DegeneratePointError
        If x = +-pole.
    """
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    if np.any(np.abs(np.linalg.norm(v, axis=-1) - 1.0) > 1e-9):
        raise DomainError("v must be a unit vector")
    if np.any(np.abs(np.sum(v * x, axis=-1)) > 1e-9):
        raise DomainError("v must be tangent to the sphere at x")
    pole = np.broadcast_to(np.asarray(pole, dtype=float), x.shape)
    N, _ = _unit(tangent_project(x, pole), constants.singular_distance)
    if N is None:
        raise DegeneratePointError("adapted frame requested at the pole or its antipode")

    sin_a = np.clip(np.sum(v * N, axis=-1), -1.0, 1.0)
    cos_a = np.sqrt(1.0 - sin_a ** 2)
    C = _complement(x, v)
    NC = np.einsum('...ij,...i->...j', C, N)
    m = NC.shape[-1]

    # Reflection of R^2n whose last column is -NC/|NC|, identity when NC vanishes.
    norm = np.linalg.norm(NC, axis=-1)
    degenerate = norm < 1e-12
    c_hat = -NC / np.where(degenerate, 1.0, norm)[..., None]
    c_hat[degenerate] = 0.0
    c_hat[..., -1] = np.where(degenerate, 1.0, c_hat[..., -1])
    sgn = np.where(c_hat[..., -1] >= 0, -1.0, 1.0)
    w = -sgn[..., None] * c_hat
    w[..., -1] += 1.0
    H = np.eye(m) - 2.0 * w[..., :, None] * w[..., None, :] / np.sum(w * w, axis=-1)[..., None, None]
    H[..., :, -1] *= sgn[..., None]

    E = np.einsum('...ij,...jk->...ik', C, H)
    frame = np.concatenate([E, v[..., :, None]], axis=-1)
    det = np.linalg.det(np.concatenate([x[..., :, None], frame], axis=-1))
    frame = _flip_first_if(frame, det < 0)

    e_last = frame[..., :, -2]
    u = sin_a[..., None] * e_last + cos_a[..., None] * v
    tangent = np.concatenate([x[..., :, None], -N[..., :, None], frame[..., :, :-2], u[..., :, None]], axis=-1)
    orientation = np.sign(np.linalg.det(tangent))
    if np.any(degenerate):
        log.debug("adapted frame degenerate at %d point(s)", int(np.sum(degenerate)))
    return AdaptedFrame(e=frame, alpha=np.arcsin(sin_a), u=u,
                        orientation=orientation, degenerate=degenerate)


# ═══════════════════════════════════════════════════════════════════
#  Grid specifications
# ═══════════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class GridSpec:
    """
    Declarative grid description, round-tripping to the JSON config forms

        {"kind": "product", "resolution": [64, 64, 64]}
        {"kind": "parallel", "resolution": [64, 128]}
        {"kind": "sliced", "slices": 40, "parallel": [24, 24, 24, 48], "seed": null}
        {"kind": "monte-carlo", "count": 100000, "seed": 7}

    For product and parallel grids, the resolution lists the polar axes
    first and the azimuth last.
    """
    kind: str
    resolution: Tuple[int, ...] = ()
    slices: int = 0
    parallel: Tuple[int, ...] = ()
    count: int = 0
    seed: Optional[int] = None

    def __post_init__(self):
        _validate_kind(self.kind)
        object.__setattr__(self, 'resolution', tuple(int(q) for q in self.resolution))
        object.__setattr__(self, 'parallel', tuple(int(q) for q in self.parallel))
        if self.kind in ('product', 'parallel'):
            _check_resolution(self.resolution)
        elif self.kind == 'sliced':
            if int(self.slices) < 1:
                raise DomainError(f"sliced grids need at least one slice, got {self.slices}")
            _check_resolution(self.parallel)
        elif int(self.count) < 1:
            raise DomainError(f"Monte Carlo sample count must be >= 1, got {self.count}")

    @classmethod
    def from_dict(cls, config):
        config = dict(config)
        kind = config.pop('kind', None)
        if kind is None:
            raise ConfigurationError("grid config needs a 'kind'")
        unknown = set(config) - {'resolution', 'slices', 'parallel', 'count', 'seed'}
        if unknown:
            raise ConfigurationError(f"unknown grid config keys: {sorted(unknown)}")
        return cls(kind=kind, **config)

    def to_dict(self):
        if self.kind in ('product', 'parallel'):
            return {'kind': self.kind, 'resolution': list(self.resolution)}
        if self.kind == 'sliced':
            return {'kind': 'sliced', 'slices': self.slices, 'parallel': list(self.parallel),
                    'seed': self.seed}
        return {'kind': 'monte-carlo', 'count': self.count, 'seed': self.seed}

    def halved(self):
        """The same grid at half the resolution on every axis (at least one node each)."""
        half = lambda q: max(1, q // 2)
        if self.kind in ('product', 'parallel'):
            return GridSpec(self.kind, resolution=[half(q) for q in self.resolution])
        if self.kind == 'sliced':
            return GridSpec('sliced', slices=half(self.slices),
                            parallel=[half(q) for q in self.parallel], seed=self.seed)
        return GridSpec('monte-carlo', count=half(self.count), seed=self.seed)

    def scaled(self, factor):
        """Every axis multiplied by factor (rounded, at least one node)."""
        grow = lambda q: max(1, int(round(q * factor)))
        if self.kind in ('product', 'parallel'):
            return GridSpec(self.kind, resolution=[grow(q) for q in self.resolution])
        if self.kind == 'sliced':
            return GridSpec('sliced', slices=grow(self.slices),
                            parallel=[grow(q) for q in self.parallel], seed=self.seed)
        return GridSpec('monte-carlo', count=grow(self.count), seed=self.seed)


def _check_resolution(resolution):
    if len(resolution) == 0:
        raise DomainError("grid resolution must name at least one axis")
    if any(q < 1 for q in resolution):
        raise DomainError(f"grid resolutions must be positive, got {list(resolution)}")


def default_grid(n, kind):
    """Default GridSpec for S^{2n+1} ('product', 'sliced') or its parallels ('parallel')."""
    if n not in constants.default_grids:
        raise ConfigurationError(f"no default grids for n={n}; pass an explicit grid spec")
    entry = constants.default_grids[n][kind]
    if kind == 'parallel':
        return GridSpec('parallel', resolution=entry)
    return GridSpec.from_dict(entry)


# ═══════════════════════════════════════════════════════════════════
#  Quadrature grids
# ═══════════════════════════════════════════════════════════════════

@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    """
    Nodes and positive weights on a sphere, a parallel, or a slicing of a
    sphere by parallels.

    Nodes are produced on demand by chunk() over spans() in the canonical
    axis-lexicographic order, so the full node array of a large grid is
    never built. The nodes and weights properties materialize everything
    and are meant for small grids.
    """
    kind: str
    manifold_dim: int
    ambient_dim: int
    size: int
    spec: GridSpec
    seed: Optional[int] = None
    pole: Optional[np.ndarray] = None
    _generate: Callable = field(default=None, repr=False, compare=False)
    _chunk: int = field(default=constants.chunk_size, repr=False)

    def chunk(self, start, stop):
        """Nodes and weights with flat indices in [start, stop)."""
        return self._generate(start, stop)

    def spans(self, size=None):
        """Flat index ranges (start, stop) of the chunks, in order."""
        size = size or self._chunk
        for start in range(0, self.size, size):
            yield start, min(start + size, self.size)

    @property
    def nodes(self):
        return self.chunk(0, self.size)[0]

    @property
    def weights(self):
        return self.chunk(0, self.size)[1]

    def describe(self):
        """JSON-ready descriptor of the grid."""
        out = self.spec.to_dict()
        out.update({'manifold_dim': self.manifold_dim, 'nodes': self.size})
        if self.seed is not None:
            out['seed'] = self.seed
        if self.pole is not None:
            out['pole'] = [float(c) for c in self.pole]
        return out


def _polar_rule(m, j, q):
    """Gauss-Jacobi rule for the cosine of the j-th polar angle of S^m."""
    a = (m - j - 1) / 2.0
    if a == 0:
        return special.roots_legendre(q)
    return special.roots_jacobi(q, a, a)


def _product_factors(m, resolution):
    if len(resolution) != m:
        raise ConfigurationError(f"a product grid on S^{m} needs {m} resolutions, got {len(resolution)}")
    factors = [_polar_rule(m, j, q) for j, q in enumerate(resolution[:-1], start=1)]
    q = resolution[-1]
    factors.append((2.0 * math.pi * np.arange(q) / q, np.full(q, 2.0 * math.pi / q)))
    return factors


def _embed_product(values):
    """Hyperspherical coordinates: polar cosines t_1..t_{m-1}, then the azimuth."""
    *ts, phi = values
    count = phi.shape[0]
    x = np.empty((count, len(ts) + 2))
    radius = np.ones(count)
    for i, t in enumerate(ts):
        x[:, i] = radius * t
        radius = radius * np.sqrt(np.clip(1.0 - t * t, 0.0, None))
    x[:, -2] = radius * np.cos(phi)
    x[:, -1] = radius * np.sin(phi)
    return x


def _factor_values(factors, start, stop):
    shape = tuple(len(f[0]) for f in factors)
    idx = np.unravel_index(np.arange(start, stop), shape)
    values = [f[0][i] for f, i in zip(factors, idx)]
    weight = np.ones(stop - start)
    for f, i in zip(factors, idx):
        weight = weight * f[1][i]
    return values, weight


def _product_size(factors):
    return int(np.prod([len(f[0]) for f in factors], dtype=np.int64))


def quad_sphere(m, spec):
    """
    Product grid on S^m: Gauss-Jacobi in the cosine of each polar angle
    (Gauss-Legendre for the last one) and the uniform trapezoid in the
    azimuth. A rule of order q per axis integrates spherical polynomials
    of degree <= 2q-1 exactly.

    Parameters
    ----------
    m : int
    spec : GridSpec
        kind 'product' with m resolutions.

    Returns
    -------
    QuadratureGrid
    """
    if spec.kind != 'product':
        raise ConfigurationError(f"quad_sphere needs a product spec, got '{spec.kind}'")
    factors = _product_factors(m, spec.resolution)

    def generate(start, stop):
        values, weight = _factor_values(factors, start, stop)
        return _embed_product(values), weight

    size = _product_size(factors)
    log.debug("product grid on S^%d: %d nodes", m, size)
    return QuadratureGrid('product', m, m + 1, size, spec, _generate=generate)


def _pole_chart(pole):
    pole = sphere_point(pole, normalize=True)
    return pole, tangent_basis(pole)


def quad_parallel(pole, theta, spec):
    """
    Product grid on the parallel at latitude theta around the pole.

    Nodes are cos(r) pole + sin(r) B y with r = pi/2 - theta, y on a product
    grid of S^{2n} and B the oriented tangent basis at the pole; weights
    carry the factor sin(r)^{2n}.
    """
    if spec.kind != 'parallel':
        raise ConfigurationError(f"quad_parallel needs a parallel spec, got '{spec.kind}'")
    par = ParallelSpec(pole, theta)
    pole, B = _pole_chart(par.pole)
    m = pole.shape[-1] - 2
    r = par.colatitude
    factors = _product_factors(m, spec.resolution)
    scale = math.sin(r) ** m

    def generate(start, stop):
        values, weight = _factor_values(factors, start, stop)
        y = _embed_product(values)
        return math.cos(r) * pole + math.sin(r) * (y @ B.T), scale * weight

    return QuadratureGrid('parallel', m, m + 2, _product_size(factors), spec,
                          pole=pole, _generate=generate)


def quad_sliced(pole, spec):
    """
    S^{2n+1} sliced into parallels around the pole: Gauss-Legendre in the
    colatitude r over (0, pi) with weight sin(r)^{2n}, times a product grid
    on each parallel. No node lies on the pole or its antipode.
    """
    if spec.kind != 'sliced':
        raise ConfigurationError(f"quad_sliced needs a sliced spec, got '{spec.kind}'")
    pole, B = _pole_chart(pole)
    m = pole.shape[-1] - 2
    t, w = special.roots_legendre(spec.slices)
    r = math.pi / 2 * (t + 1.0)
    factors = [(r, math.pi / 2 * w * np.sin(r) ** m)] + _product_factors(m, spec.parallel)

    def generate(start, stop):
        (rr, *values), weight = _factor_values(factors, start, stop)
        y = _embed_product(values)
        x = np.cos(rr)[:, None] * pole + np.sin(rr)[:, None] * (y @ B.T)
        return x, weight

    size = _product_size(factors)
    log.debug("sliced grid on S^%d: %d slices, %d nodes", m + 1, spec.slices, size)
    return QuadratureGrid('sliced', m + 1, m + 2, size, spec, pole=pole, _generate=generate)


def draw_seed():
    """A fresh 64-bit seed from OS entropy."""
    return int(np.random.SeedSequence().generate_state(1, np.uint64)[0])


def mc_sample(m, count, seed=None):
    """
    Uniform Monte Carlo points on S^m from normalized Gaussians.

    Draws come from Philox streams, one child of SeedSequence(seed) per
    block of constants.mc_block points, so any block can be regenerated
    on its own. Every weight is vol(S^m)/count. Without a seed one is drawn
    and recorded on the grid.
    """
    if int(count) < 1:
        raise DomainError(f"Monte Carlo sample count must be >= 1, got {count}")
    count = int(count)
    if seed is None:
        seed = draw_seed()
    block = constants.mc_block
    children = np.random.SeedSequence(seed).spawn(-(-count // block))
    weight = sphere_volume(m) / count

    def draw(b):
        size = min(block, count - b * block)
        g = np.random.Generator(np.random.Philox(children[b])).standard_normal((size, m + 1))
        return g / np.linalg.norm(g, axis=1, keepdims=True)

    def generate(start, stop):
        blocks = range(start // block, (stop - 1) // block + 1)
        pts = np.concatenate([draw(b) for b in blocks])
        offset = blocks[0] * block
        return pts[start - offset:stop - offset], np.full(stop - start, weight)

    spec = GridSpec('monte-carlo', count=count, seed=seed)
    return QuadratureGrid('monte-carlo', m, m + 1, count, spec, seed=seed,
                          _generate=generate, _chunk=block)


def build_grid(spec, m, pole=None):
    """
    Dispatch a GridSpec to the matching constructor for S^m.

    pole is used by sliced grids (default: last coordinate vector).
    Parallel grids are built with quad_parallel, which needs a latitude.
    """
    if spec.kind == 'product':
        return quad_sphere(m, spec)
    if spec.kind == 'sliced':
        if m % 2 == 0:
            raise ConfigurationError(f"sliced grids are defined on odd spheres, got S^{m}")
        if pole is None:
            pole = np.eye(m + 1)[-1]
        return quad_sliced(pole, spec)
    if spec.kind == 'monte-carlo':
        return mc_sample(m, spec.count, spec.seed)
    raise ConfigurationError("parallel grids need a pole and latitude, use quad_parallel")


# ═══════════════════════════════════════════════════════════════════
#  Integration
# ═══════════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class Integral:
    """Weighted sum of an integrand; stderr is set for Monte Carlo grids only."""
    value: float
    stderr: Optional[float] = None
    nodes: int = 0


def integrate(grid, func, workers=None):
    """
    Integrate a batched function over a grid.

    Parameters
    ----------
    grid : QuadratureGrid
    func : callable
        Maps an (k, d) node array to k values.
    workers : int, optional
        Thread count; defaults to worker_count(). Results do not depend on it:
        chunk partial sums are combined in chunk order. Chunks are generated
        by the workers, at most 2 * workers at a time.

    Returns
    -------
    Integral
    """
    workers = workers or worker_count()

    def reduce(span):
        x, w = grid.chunk(*span)
        f = np.asarray(func(x), dtype=float)
        return np.sum(w * f), np.sum(f), np.sum(f * f)

    if workers > 1:
        partials = []
        pending = deque()
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for span in grid.spans():
                if len(pending) >= 2 * workers:
                    partials.append(pending.popleft().result())
                pending.append(pool.submit(reduce, span))
            partials.extend(future.result() for future in pending)
    else:
        partials = [reduce(span) for span in grid.spans()]
    partials = np.array(partials)
    value = float(np.sum(partials[:, 0]))
    stderr = None
    if grid.kind == 'monte-carlo':
        count = grid.size
        mean = np.sum(partials[:, 1]) / count
        var = max(np.sum(partials[:, 2]) / count - mean ** 2, 0.0)
        stderr = float(sphere_volume(grid.manifold_dim) * math.sqrt(var / max(count - 1, 1)))
    log.debug("integrated %d nodes on %s grid: %.12g", grid.size, grid.kind, value)
    return Integral(value=value, stderr=stderr, nodes=grid.size)
