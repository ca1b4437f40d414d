"""
Catalog of unit tangent vector fields on S^{2n+1}.

    hopf            v(x) = J x, J the complex structure (x1, x2, ...) -> (-x2, x1, ...)
    radial          unit tangents of the great circles leaving a pole q (source at q, sink at -q)
    power           z -> z^d suspended in the stereographic chart from -p (index +d at p, -d at -p)
    perturbed-hopf  normalize(J x + eps * (tangential part of a fixed seeded vector))

Every field has an ambient extension used for derivatives: hopf, radial and
perturbed-hopf use their formulas on raw x, power first projects x onto the
sphere. Fields are evaluated in batches, ambient coordinate last.
"""
import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import constants
from .base import ConfigurationError, DomainError, SingularityError
from .matrixkit import ShapeArray
from .spherekit import geodesic_distance, sphere_point, tangent_basis, tangent_project

log = logging.getLogger(__name__)


def _validate_kind(kind):
    if kind not in constants.field_kinds:
        raise ConfigurationError(f"field kind must be one of {constants.field_kinds}, got '{kind}'")


def _validate_derivative(derivative):
    if derivative not in ('analytic', 'central-difference'):
        raise ConfigurationError(f"derivative must be 'analytic' or 'central-difference', got '{derivative}'")


def complex_structure(n):
    """The block rotation J on R^{2n+2}: (x1, x2, ...) -> (-x2, x1, ...)."""
    J = np.zeros((2 * n + 2, 2 * n + 2))
    for i in range(0, 2 * n + 2, 2):
        J[i, i + 1] = -1.0
        J[i + 1, i] = 1.0
    return J


@dataclass(frozen=True, eq=False)
class VectorFieldSpec:
    """
    An analytic unit tangent field on S^{2n+1}.

    Parameters
    ----------
    kind : str
        'hopf', 'radial', 'power' or 'perturbed-hopf'.
    n : int
        Sphere parameter, n >= 1.
    pole : array_like, optional
        q for radial, p for power; normalized. Defaults to (0, ..., 0, 1).
    d : int, optional
        Exponent of the power field, d >= 1.
    eps : float, optional
        Perturbation amplitude for perturbed-hopf, 0 <= eps < 1.
    seed : int, optional
        Seed of the perturbation direction.
    homogeneous : bool, optional
        Power field chart map (z^d, |y|^(d-1) w) when True, the literal
        (z^d, w) when False. Both agree on the unit chart sphere.
    derivative : str, optional
        'analytic' or 'central-difference'. Defaults to analytic for hopf and
        radial, central differences for the others.
    h : float, optional
        Central-difference step.
    """
    kind: str
    n: int
    pole: Optional[np.ndarray] = None
    d: int = 1
    eps: float = 0.2
    seed: int = 0
    homogeneous: bool = True
    derivative: Optional[str] = None
    h: float = constants.fd_step
    _w0: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        _validate_kind(self.kind)
        if int(self.n) < 1:
            raise DomainError(f"sphere parameter n must be >= 1, got {self.n}")
        object.__setattr__(self, 'n', int(self.n))
        dim = 2 * self.n + 2
        pole = np.eye(dim)[-1] if self.pole is None else sphere_point(self.pole, normalize=True)
        if pole.shape != (dim,):
            raise ConfigurationError(f"pole must have {dim} coordinates for n={self.n}, got {pole.shape[-1]}")
        object.__setattr__(self, 'pole', pole)
        if self.kind == 'power' and int(self.d) < 1:
            raise DomainError(f"power exponent d must be >= 1, got {self.d}")
        if not 0 <= self.eps < 1:
            raise DomainError(f"perturbation amplitude must lie in [0, 1), got {self.eps}")
        derivative = self.derivative
        if derivative is None:
            derivative = 'analytic' if self.kind in ('hopf', 'radial') else 'central-difference'
        _validate_derivative(derivative)
        if derivative == 'analytic' and self.kind not in ('hopf', 'radial'):
            raise ConfigurationError(f"no closed-form derivative for '{self.kind}', use central differences")
        object.__setattr__(self, 'derivative', derivative)
        if self.kind == 'perturbed-hopf':
            w0 = np.random.default_rng(self.seed).standard_normal(dim)
            object.__setattr__(self, '_w0', w0 / np.linalg.norm(w0))

    @property
    def dim(self):
        """Ambient dimension 2n+2."""
        return 2 * self.n + 2

    @property
    def bounded(self):
        """Whether the volume integrand is bounded on the sphere."""
        return self.kind in ('hopf', 'perturbed-hopf')

    def singular_points(self):
        """Array of singular points, shape (k, 2n+2)."""
        if self.kind in ('radial', 'power'):
            return np.stack([self.pole, -self.pole])
        return np.empty((0, self.dim))

    def eval(self, x):
        return evaluate(self, x)

    def describe(self):
        """JSON-ready descriptor."""
        out = {'kind': self.kind, 'n': self.n, 'derivative': self.derivative}
        if self.kind in ('radial', 'power'):
            out['pole'] = [float(c) for c in self.pole]
        if self.kind == 'power':
            out.update({'d': int(self.d), 'homogeneous': bool(self.homogeneous)})
        if self.kind == 'perturbed-hopf':
            out.update({'eps': float(self.eps), 'seed': int(self.seed)})
        if self.derivative == 'central-difference':
            out['h'] = float(self.h)
        return out


# ═══════════════════════════════════════════════════════════════════
#  Ambient extensions
# ═══════════════════════════════════════════════════════════════════

def _hopf(f, x):
    return x @ complex_structure(f.n).T


def _radial(f, x):
    c = x @ f.pole
    s = np.sqrt(np.clip(1.0 - c * c, 0.0, None))
    return (c[..., None] * x - f.pole) / s[..., None]


def _chart_field(f, y):
    z = (y[..., 0] + 1j * y[..., 1]) ** f.d
    g = np.empty_like(y)
    g[..., 0] = z.real
    g[..., 1] = z.imag
    w = y[..., 2:]
    if f.homogeneous and f.d > 1:
        w = w * np.linalg.norm(y, axis=-1, keepdims=True) ** (f.d - 1)
    g[..., 2:] = w
    return g


def _power_raw(f, x):
    x = x / np.linalg.norm(x, axis=-1, keepdims=True)
    p = f.pole
    B = tangent_basis(p)
    D = 1.0 + x @ p
    y = (x @ B) / D[..., None]
    g = _chart_field(f, y)
    s = np.sum(y * y, axis=-1)
    yg = np.sum(y * g, axis=-1)
    denom = (1.0 + s)[..., None]
    dx = (2.0 * (g @ B.T) - 2.0 * yg[..., None] * p) / denom - x * (2.0 * yg / (1.0 + s))[..., None]
    return tangent_project(x, dx)


def _perturbed_raw(f, x):
    return _hopf(f, x) + f.eps * tangent_project(x, f._w0)


def _radial_raw(f, x):
    return (x @ f.pole)[..., None] * x - f.pole


_raw = {
    'hopf': _hopf,
    'radial': _radial_raw,
    'power': _power_raw,
    'perturbed-hopf': _perturbed_raw,
}


def _normalized(raw):
    def ext(f, x):
        w = raw(f, x)
        return w / np.linalg.norm(w, axis=-1, keepdims=True)
    return ext


_extensions = {
    'hopf': _hopf,
    'radial': _radial,
    'power': _normalized(_power_raw),
    'perturbed-hopf': _normalized(_perturbed_raw),
}


def _check_points(f, x):
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != f.dim:
        raise ConfigurationError(f"field on S^{2 * f.n + 1} evaluated at points with {x.shape[-1]} coordinates")
    x = sphere_point(x)
    for q in f.singular_points():
        dist = geodesic_distance(x, q)
        if np.any(dist <= constants.singular_distance):
            raise SingularityError(f"{f.kind} field evaluated within {constants.singular_distance} of a singular point")
    return x


def evaluate(f, x):
    """
    Value of the field at points of the sphere.

    Parameters
    ----------
    f : VectorFieldSpec
    x : array_like, shape (..., 2n+2)

    Returns
    -------
    np.ndarray, shape (..., 2n+2)
        Unit vectors tangent at x.

    Raises
    ------
    SingularityError
        If a point lies within 1e-8 of the singular set.
    """
    x = _check_points(f, x)
    return _extensions[f.kind](f, x)


def normalization_denominator(f, x):
    """
    Norm of the unnormalized field at points of the sphere. It vanishes
    exactly on the singular set; no singularity check is made.
    """
    x = sphere_point(np.asarray(x, dtype=float))
    return np.linalg.norm(_raw[f.kind](f, x), axis=-1)


# ═══════════════════════════════════════════════════════════════════
#  Derivatives and shape arrays
# ═══════════════════════════════════════════════════════════════════

def _radial_jacobian(f, x):
    q = f.pole
    c = x @ q
    s = np.sqrt(np.clip(1.0 - c * c, 0.0, None))
    d = x.shape[-1]
    outer_xq = x[..., :, None] * q
    first = (outer_xq + c[..., None, None] * np.eye(d)) / s[..., None, None]
    second = (c[..., None] * x - q)[..., :, None] * q * (c / s ** 3)[..., None, None]
    return first + second


def ambient_jacobian(f, x):
    """
    Derivative of the ambient extension, J[..., i, k] = dv_i / dx_k.

    Analytic mode is exact; central-difference mode uses symmetric steps of
    size f.h along each coordinate axis, error O(h^2).
    """
    x = _check_points(f, x)
    if f.derivative == 'analytic':
        if f.kind == 'hopf':
            return np.broadcast_to(complex_structure(f.n), x.shape + (f.dim,)).copy()
        return _radial_jacobian(f, x)
    ext = _extensions[f.kind]
    cols = []
    for k in range(f.dim):
        step = np.zeros(f.dim)
        step[k] = f.h
        cols.append((ext(f, x + step) - ext(f, x - step)) / (2.0 * f.h))
    return np.stack(cols, axis=-1)


def shape_matrix(f, x, frame):
    """
    Shape array a_AB = <grad_{e_B} v, e_A> of the field in a frame.

    Parameters
    ----------
    f : VectorFieldSpec
    x : array_like, shape (..., 2n+2)
    frame : AdaptedFrame or np.ndarray
        An adapted frame, or any array of shape (..., 2n+2, 2n+1) whose
        columns are orthonormal tangent vectors at x ending with v(x).

    Returns
    -------
    ShapeArray
    """
    E = frame.e if hasattr(frame, 'e') else np.asarray(frame, dtype=float)
    Dv = ambient_jacobian(f, x)
    if f.derivative == 'central-difference':
        # <grad v, v> = 0 for a unit field; drop the O(h^2) residue along v
        v = E[..., :, -1]
        Dv = Dv - v[..., :, None] * np.einsum('...i,...ij->...j', v, Dv)[..., None, :]
    a = np.einsum('...ia,...ij,...jb->...ab', E, Dv, E)
    return ShapeArray(f.n, a)


def field_frame(f, x):
    """
    An orthonormal frame (tangent basis orthogonal to v, then v) at x,
    independent of any pole.
    """
    x = _check_points(f, x)
    v = _extensions[f.kind](f, x)
    Q, _ = np.linalg.qr(np.stack([x, v], axis=-1), mode='complete')
    return np.concatenate([Q[..., :, 2:], v[..., :, None]], axis=-1)


def from_descriptor(kind, n, pole=None, d=1, eps=0.2, seed=0, **kwargs):
    """Build a VectorFieldSpec from flat descriptor values (CLI, records)."""
    return VectorFieldSpec(kind=kind, n=n, pole=pole, d=d, eps=eps,
                           seed=0 if seed is None else seed, **kwargs)
