"""
Dense small-matrix calculus: minors, elementary symmetric functions, the
column-substituted functions sigma_perp, the volume of a matrix and the
matrix inequalities used to compare the volume integrand with the Euler form.

Every function accepts a single matrix of shape (m, m) or a stack of
matrices of shape (..., m, m) and returns a scalar or an array of the
stack shape. All functions are pure.
"""
import logging
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np
from sympy import Rational, binomial

from .base import DomainError

log = logging.getLogger(__name__)


def _validate_method(method):
    if method not in ('minors', 'cauchy-binet'):
        raise DomainError(f"method must be 'minors' or 'cauchy-binet', got '{method}'")


def _validate_convention(convention):
    if convention not in ('oracle', 'substituted'):
        raise DomainError(f"convention must be 'oracle' or 'substituted', got '{convention}'")


def _as_square(M):
    M = np.asarray(M, dtype=float)
    if M.ndim < 2 or M.shape[-1] != M.shape[-2]:
        raise DomainError(f"expected a square matrix (or a stack of them), got shape {M.shape}")
    if M.shape[-1] < 1:
        raise DomainError("matrix must have at least one row")
    if not np.all(np.isfinite(M)):
        raise DomainError("matrix entries must be finite")
    return M


def _submatrix(M, rows, cols):
    """M[..., rows, cols] as a (possibly stacked) len(rows) x len(cols) block."""
    r = np.asarray(rows, dtype=int)
    c = np.asarray(cols, dtype=int)
    return M[..., r[:, None], c]


def _det(M):
    # det of a 0x0 block is 1 by convention
    if M.shape[-1] == 0:
        return np.ones(M.shape[:-2])
    return np.linalg.det(M)


# ═══════════════════════════════════════════════════════════════════
#  Shape arrays
# ═══════════════════════════════════════════════════════════════════

@dataclass(frozen=True, eq=False)
class ShapeArray:
    """
    The (2n+1) x (2n+1) array a_AB = <grad_{e_B} v, e_A> in a frame
    {e_1, ..., e_2n, e_2n+1 = v}.

    The upper-left 2n x 2n block is the second fundamental form (a_ij) of
    the distribution orthogonal to v, the last column holds the components
    of the acceleration grad_v v, and the last row vanishes because v has
    unit length.

    Parameters
    ----------
    n : int
        Sphere parameter (the sphere is S^{2n+1}).
    a : array_like, shape (..., 2n+1, 2n+1)
        Entries, row-major. Stacks are allowed.

    Raises
    ------
    DomainError
        On wrong shape, non-finite entries or a last row that is not zero.
    """
    n: int
    a: np.ndarray

    def __post_init__(self):
        if int(self.n) < 1:
            raise DomainError(f"sphere parameter n must be >= 1, got {self.n}")
        a = _as_square(self.a)
        size = 2 * int(self.n) + 1
        if a.shape[-1] != size:
            raise DomainError(f"shape array for n={self.n} must be {size}x{size}, got {a.shape[-2:]}")
        scale = 1.0 + np.max(np.abs(a), axis=(-2, -1))
        if np.any(np.linalg.norm(a[..., -1, :], axis=-1) > 1e-9 * scale):
            raise DomainError("last row of a shape array must vanish (v has unit length)")
        object.__setattr__(self, 'n', int(self.n))
        object.__setattr__(self, 'a', a)

    @classmethod
    def from_blocks(cls, block, acceleration=None):
        """Assemble from the 2n x 2n block (a_ij) and the acceleration column."""
        block = np.asarray(block, dtype=float)
        m = block.shape[-1]
        if m % 2 or block.shape[-2] != m:
            raise DomainError(f"block must be square of even size, got {block.shape[-2:]}")
        a = np.zeros(block.shape[:-2] + (m + 1, m + 1))
        a[..., :m, :m] = block
        if acceleration is not None:
            a[..., :m, m] = acceleration
        return cls(m // 2, a)

    @property
    def block(self):
        """The 2n x 2n second fundamental form (a_ij)."""
        return self.a[..., :-1, :-1]

    @property
    def acceleration(self):
        """Components a_{i,2n+1} of grad_v v."""
        return self.a[..., :-1, -1]


# ═══════════════════════════════════════════════════════════════════
#  Symmetric functions
# ═══════════════════════════════════════════════════════════════════

@lru_cache(maxsize=None)
def lemma_weight_exact(n, k):
    """C(n,k) / C(2n,2k) as an exact rational."""
    return Rational(binomial(n, k), binomial(2 * n, 2 * k))


@lru_cache(maxsize=None)
def lemma_weights(n):
    """Float weights C(n,k)/C(2n,2k) for k = 0..n, converted from exact rationals."""
    return tuple(float(lemma_weight_exact(n, k)) for k in range(n + 1))


def elem_sym(M, k):
    """
    k-th elementary symmetric function of a square matrix: the sum of its
    principal k x k minors.

    Parameters
    ----------
    M : array_like, shape (..., m, m)
    k : int
        0 <= k <= m. elem_sym(M, 0) = 1.

    Returns
    -------
    float or np.ndarray
    """
    M = _as_square(M)
    m = M.shape[-1]
    if not 0 <= k <= m:
        raise DomainError(f"order k must satisfy 0 <= k <= {m}, got {k}")
    total = np.zeros(M.shape[:-2])
    if k == 0:
        return total + 1.0
    for R in combinations(range(m), k):
        total = total + _det(_submatrix(M, R, R))
    return total


def substituted(A, l):
    """
    The 2n x 2n matrix (a_ij(l)): (a_ij) with its l-th column (1-based)
    replaced by the acceleration column.
    """
    m = 2 * A.n
    if not 1 <= l <= m:
        raise DomainError(f"column index l must satisfy 1 <= l <= {m}, got {l}")
    out = np.array(A.block, copy=True)
    out[..., :, l - 1] = A.acceleration
    return out


def sigma_perp_terms(n, k, l):
    """
    Index sets contributing to sigma_perp of order k at column l.

    Yields (sign, rows, cols) with 0-based indices into the shape array;
    rows is R (increasing, containing l), cols is R without l followed by
    the acceleration column 2n. sign is the parity of the complementary
    indices above l, which is what the Pfaffian expansion produces for the
    basis form omega_1 ^ ... ^ hat(omega_l) ^ ... ^ omega_{2n+1}.
    """
    m = 2 * n
    if k % 2:
        raise DomainError(f"sigma_perp is defined for even orders, got k={k}")
    if not 0 <= k <= m:
        raise DomainError(f"order k must satisfy 0 <= k <= {m}, got {k}")
    if not 1 <= l <= m:
        raise DomainError(f"column index l must satisfy 1 <= l <= {m}, got {l}")
    if k == 0:
        return
    others = [i for i in range(m) if i != l - 1]
    for rest in combinations(others, k - 1):
        rows = tuple(sorted(rest + (l - 1,)))
        cols = tuple(i for i in rows if i != l - 1) + (m,)
        above = sum(1 for s in range(l, m) if s not in rows)
        yield (-1) ** above, rows, cols


def sigma_perp(A, k, l, convention='oracle'):
    """
    sigma_perp_k(l): the k x k minors that involve the acceleration column.

    Parameters
    ----------
    A : ShapeArray
    k : int
        Even order, 0 <= k <= 2n. Order 0 gives 0.
    l : int
        Substituted column, 1 <= l <= 2n.
    convention : str, optional
        'oracle' (default): sum over R containing l of the signed minors with
        rows R and columns (R without l, acceleration last), the form that
        reproduces the Pfaffian expansion of the Euler form exactly.
        'substituted': sum of the principal minors on R containing l of the
        column-substituted matrix (a_ij(l)); equals (-1)^l times 'oracle'.

    Returns
    -------
    float or np.ndarray
    """
    _validate_convention(convention)
    terms = list(sigma_perp_terms(A.n, k, l))
    total = np.zeros(A.a.shape[:-2])
    if convention == 'oracle':
        for sign, rows, cols in terms:
            total = total + sign * _det(_submatrix(A.a, rows, cols))
    else:
        sub = substituted(A, l)
        for _, rows, _ in terms:
            total = total + _det(_submatrix(sub, rows, rows))
    return total


# ═══════════════════════════════════════════════════════════════════
#  Volume of a matrix and the comparison inequalities
# ═══════════════════════════════════════════════════════════════════

def graph_volume(M, method='minors'):
    """
    Volume of a linear map: the volume of the graph of the unit cube.

    Parameters
    ----------
    M : array_like, shape (..., m, m)
    method : str, optional
        'minors' (default) sums the squares of all k x k minors over every
        row and column subset, (1 + sum b_ij^2 + ... + det^2)^(1/2).
        'cauchy-binet' evaluates sqrt(det(I + M^T M)) instead.

    Returns
    -------
    float or np.ndarray
    """
    _validate_method(method)
    M = _as_square(M)
    m = M.shape[-1]
    if method == 'cauchy-binet':
        gram = np.einsum('...ki,...kj->...ij', M, M)
        return np.sqrt(np.linalg.det(np.eye(m) + gram))
    total = np.ones(M.shape[:-2])
    for k in range(1, m + 1):
        subsets = list(combinations(range(m), k))
        for rows in subsets:
            for cols in subsets:
                total = total + _det(_submatrix(M, rows, cols)) ** 2
    return np.sqrt(total)


def diag_bound_rhs(D):
    """
    Right-hand side of the diagonal comparison
    vol(D) >= sum_k C(m,k) C(2m,2k)^-1 sigma_2k(D)
    for a nonnegative diagonal matrix D of even size 2m.
    """
    D = _as_square(D)
    size = D.shape[-1]
    if size % 2:
        raise DomainError(f"diagonal matrix must have even size, got {size}")
    off = D - np.einsum('...ii->...i', D)[..., None] * np.eye(size)
    if np.any(off != 0):
        raise DomainError("matrix must be diagonal")
    if np.any(np.einsum('...ii->...i', D) < 0):
        raise DomainError("diagonal entries must be nonnegative")
    m = size // 2
    weights = lemma_weights(m)
    return sum(w * elem_sym(D, 2 * k) for k, w in enumerate(weights))


def lemma_sums(A):
    """
    Signed sums entering the Euler-form density,
    S1 = sum_k w_k sigma_2k(a_ij) and S2 = sum_k w_k sigma_perp_2k(2n),
    with w_k = C(n,k) C(2n,2k)^-1.

    Returns
    -------
    tuple of (S1, S2)
    """
    n = A.n
    weights = lemma_weights(n)
    s1 = sum(w * elem_sym(A.block, 2 * k) for k, w in enumerate(weights))
    s2 = sum(w * sigma_perp(A, 2 * k, 2 * n) for k, w in enumerate(weights))
    return s1, s2


def pointwise_rhs_abs(A):
    """
    sum_k C(n,k) C(2n,2k)^-1 (|sigma_2k| + |sigma_perp_2k(2n)|).

    This is a probed hypothesis, not an asserted bound: there are shape
    arrays for which it exceeds graph_volume (see puncvol.probe).
    """
    n = A.n
    total = np.zeros(A.a.shape[:-2])
    for k, w in enumerate(lemma_weights(n)):
        total = total + w * (np.abs(elem_sym(A.block, 2 * k)) + np.abs(sigma_perp(A, 2 * k, 2 * n)))
    return total


def pointwise_rhs_angle(A):
    """sqrt(S1^2 + S2^2): the largest value of sin(alpha) S1 + cos(alpha) S2 over alpha."""
    s1, s2 = lemma_sums(A)
    return np.hypot(s1, s2)


def pointwise_rhs_signed(A):
    """S1 + S2, the signed form closing the comparison argument."""
    s1, s2 = lemma_sums(A)
    return s1 + s2
