"""
Exact exterior algebra over polynomials in the shape-array symbols a_AB.

Forms live on the coframe {omega_1, ..., omega_2n+1} dual to an adapted
frame; coefficients are sparse polynomials over QQ in the symbols a_AB
(1 <= A <= 2n, 1 <= B <= 2n+1) and one opaque prefactor P standing for
2 / ((2n)! vol(S^2n)). Nothing in this module touches floating point.

Typical use::

    >>> from puncvol import pfaffian
    >>> report = pfaffian.verify_lemma(2)
    >>> report.verified
    True
"""
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from math import factorial
from typing import Dict, Tuple

from sympy import Rational
from sympy.combinatorics import Permutation
from sympy.polys.domains import QQ
from sympy.polys.rings import ring

from .base import DomainError, ResourceError
from .matrixkit import lemma_weight_exact, sigma_perp_terms

log = logging.getLogger(__name__)

max_n = 3


def _check_n(n):
    if int(n) != n or not 1 <= n <= max_n:
        raise ResourceError(f"symbolic expansion supports 1 <= n <= {max_n}, got {n}")
    return int(n)


class SymbolRing:
    """
    Polynomial ring QQ[a_AB, P] for one sphere parameter.

    Generators are ordered row-major over the a_AB, then P, which is also
    the argument order of evaluate().
    """

    def __init__(self, n):
        self.n = _check_n(n)
        self.keys = [(A, B) for A in range(1, 2 * n + 1) for B in range(1, 2 * n + 2)]
        names = [f'a{A}_{B}' for A, B in self.keys] + ['P']
        self.ring, *gens = ring(names, QQ)
        self.a = dict(zip(self.keys, gens[:-1]))
        self.P = gens[-1]

    @property
    def dim(self):
        return 2 * self.n + 1

    def det(self, rows, cols):
        """Determinant of the symbolic submatrix with 1-based rows and cols."""
        return _det(self, tuple(rows), tuple(cols))


@lru_cache(maxsize=None)
def symbol_ring(n):
    return SymbolRing(n)


@lru_cache(maxsize=None)
def _det_cached(n, rows, cols):
    S = symbol_ring(n)
    if not rows:
        return S.ring.one
    total = S.ring.zero
    first, rest = rows[0], rows[1:]
    for j, c in enumerate(cols):
        entry = S.a[(first, c)]
        minor = _det_cached(n, rest, cols[:j] + cols[j + 1:])
        total += entry * minor if j % 2 == 0 else -entry * minor
    return total


def _det(S, rows, cols):
    if len(rows) != len(cols):
        raise DomainError("determinant needs as many rows as columns")
    return _det_cached(S.n, rows, cols)


# ═══════════════════════════════════════════════════════════════════
#  Exterior forms
# ═══════════════════════════════════════════════════════════════════

def _merge_sign(I, J):
    inversions = sum(1 for i in I for j in J if i > j)
    return -1 if inversions % 2 else 1


class ExteriorForm:
    """
    Homogeneous form sum_I c_I omega_I over strictly increasing 1-based
    index tuples I, with polynomial coefficients. Zero coefficients are
    never stored.
    """

    def __init__(self, S, degree, terms=None):
        self.S = S
        self.degree = int(degree)
        self.terms: Dict[Tuple[int, ...], object] = {}
        for I, c in (terms or {}).items():
            self._accumulate(I, c)

    def _accumulate(self, I, c):
        I = tuple(I)
        if len(I) != self.degree:
            raise DomainError(f"basis tuple {I} does not have degree {self.degree}")
        if len(set(I)) != len(I):
            return
        if any(i < 1 or i > self.S.dim for i in I):
            raise DomainError(f"basis tuple {I} outside 1..{self.S.dim}")
        order = sorted(range(len(I)), key=lambda k: I[k])
        sign = Permutation(order).signature() if I else 1
        key = tuple(I[k] for k in order)
        value = self.terms.get(key, self.S.ring.zero) + (c if sign > 0 else -c)
        if value:
            self.terms[key] = value
        else:
            self.terms.pop(key, None)

    @classmethod
    def basis(cls, S, *indices, coeff=None):
        """omega_{i1} ^ ... ^ omega_{ik} times coeff (default 1)."""
        return cls(S, len(indices), {tuple(indices): S.ring.one if coeff is None else coeff})

    def copy(self):
        return ExteriorForm(self.S, self.degree, dict(self.terms))

    def __add__(self, other):
        if other.degree != self.degree:
            raise DomainError("cannot add forms of different degrees")
        out = self.copy()
        for I, c in other.terms.items():
            out._accumulate(I, c)
        return out

    def __neg__(self):
        return ExteriorForm(self.S, self.degree, {I: -c for I, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        """Multiply every coefficient by a ring element or rational."""
        c = self.S.ring(c)
        return ExteriorForm(self.S, self.degree, {I: c * v for I, v in self.terms.items()})

    def __xor__(self, other):
        return wedge(self, other)

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        return isinstance(other, ExteriorForm) and self.degree == other.degree and self.terms == other.terms

    def coefficient(self, *indices):
        return self.terms.get(tuple(indices), self.S.ring.zero)

    def evaluate(self, a, prefactor=1):
        """
        Coefficients with numbers substituted for the symbols.

        Parameters
        ----------
        a : mapping (A, B) -> number, or nested sequence of shape 2n x (2n+1)
        prefactor : number, optional
            Value of P.

        Returns
        -------
        dict
            Basis tuple -> value (sympy Rational for rational input).
        """
        values = _symbol_values(self.S, a, prefactor)
        return {I: QQ.to_sympy(c(*values)) for I, c in self.terms.items()}

    def __repr__(self):
        body = ' + '.join(f"({c.as_expr()})*w{''.join(map(str, I))}" for I, c in sorted(self.terms.items()))
        return f'ExteriorForm(degree={self.degree}: {body or 0})'


def _symbol_values(S, a, prefactor):
    if isinstance(a, dict):
        values = [QQ.convert(Rational(a.get(k, 0))) for k in S.keys]
    else:
        values = [QQ.convert(Rational(a[A - 1][B - 1])) for A, B in S.keys]
    return values + [QQ.convert(Rational(prefactor))]


def wedge(f, g):
    """
    Exterior product with exact coefficients.

    Raises
    ------
    DomainError
        If the degrees add up beyond 2n+1 or the forms live over different rings.
    """
    if f.S is not g.S:
        raise DomainError("forms belong to different symbol rings")
    degree = f.degree + g.degree
    if degree > f.S.dim:
        raise DomainError(f"wedge of degrees {f.degree} and {g.degree} exceeds {f.S.dim}")
    out = ExteriorForm(f.S, degree)
    for I, c in f.terms.items():
        for J, d in g.terms.items():
            if set(I) & set(J):
                continue
            product = c * d
            out._accumulate(tuple(sorted(I + J)), product if _merge_sign(I, J) > 0 else -product)
    return out


# ═══════════════════════════════════════════════════════════════════
#  Curvature of v^perp and its Pfaffian
# ═══════════════════════════════════════════════════════════════════

def connection_form(S, A):
    """omega_{A,2n+1} = - sum_B a_AB omega_B."""
    terms = {(B,): -S.a[(A, B)] for B in range(1, S.dim + 1)}
    return ExteriorForm(S, 1, terms)


def curvature_perp(S, i, j):
    """
    Curvature of the distribution orthogonal to v on the unit sphere,
    Omega_ij + omega_{i,2n+1} ^ omega_{j,2n+1} with Omega_ij = omega_i ^ omega_j.
    """
    return ExteriorForm.basis(S, i, j) + wedge(connection_form(S, i), connection_form(S, j))


def euler_form_expansion(n):
    """
    P * sum over sigma in S_2n of sgn(sigma) Omega_perp_{s1 s2} ^ ... ^ Omega_perp_{s(2n-1) s(2n)},
    with P the opaque prefactor 2 / ((2n)! vol(S^2n)).

    The permutation sum is explicit; a depth-first walk shares every
    partial wedge among the permutations with the same prefix.

    Raises
    ------
    ResourceError
        Outside 1 <= n <= 3.
    """
    S = symbol_ring(n)
    m = 2 * S.n
    omega = {(i, j): curvature_perp(S, i, j) for i in range(1, m + 1) for j in range(1, m + 1) if i != j}
    total = ExteriorForm(S, m)
    count = 0

    def walk(prefix, form, remaining):
        nonlocal total, count
        if not remaining:
            sign = Permutation([s - 1 for s in prefix]).signature()
            total = total + form if sign > 0 else total - form
            count += 1
            return
        for i in remaining:
            for j in remaining:
                if i == j:
                    continue
                rest = [r for r in remaining if r not in (i, j)]
                nxt = omega[(i, j)] if form is None else wedge(form, omega[(i, j)])
                walk(prefix + [i, j], nxt, rest)

    walk([], None, list(range(1, m + 1)))
    log.debug("euler form n=%d: %d permutations, %d basis tuples", n, count, len(total.terms))
    return total.scale(S.P)


def lemma_rhs_form(n, perturb=None):
    """
    (2/V) sum_k C(n,k)/C(2n,2k) [ sum_l sigma_perp_2k(l) omega_{1..2n+1 without l}
                                  + sigma_2k omega_{1..2n} ],

    with 2/V written as (2n)! P, sigma the principal minors of (a_ij) and
    sigma_perp the signed acceleration-column minors of matrixkit.

    Parameters
    ----------
    n : int
    perturb : tuple, optional
        (basis tuple, rational) added to that coefficient; fault injection
        for checking that verify_lemma localizes a wrong term.
    """
    S = symbol_ring(n)
    m = 2 * S.n
    full = tuple(range(1, S.dim + 1))
    form = ExteriorForm(S, m)
    for k in range(S.n + 1):
        w = S.ring(lemma_weight_exact(S.n, k))
        sigma = S.ring.one if k == 0 else sum(
            (S.det(R, R) for R in combinations(range(1, m + 1), 2 * k)), S.ring.zero)
        form = form + ExteriorForm.basis(S, *range(1, m + 1), coeff=w * sigma)
        if k == 0:
            continue
        for l in range(1, m + 1):
            perp = S.ring.zero
            for sign, rows, cols in sigma_perp_terms(S.n, 2 * k, l):
                minor = S.det([r + 1 for r in rows], [c + 1 for c in cols])
                perp += minor if sign > 0 else -minor
            if perp:
                form = form + ExteriorForm.basis(S, *[i for i in full if i != l], coeff=w * perp)
    form = form.scale(factorial(m) * S.P)
    if perturb is not None:
        I, delta = perturb
        form = form + ExteriorForm.basis(S, *I, coeff=S.ring(Rational(delta)))
    return form


# ═══════════════════════════════════════════════════════════════════
#  Verification report
# ═══════════════════════════════════════════════════════════════════

@dataclass
class DifferenceReport:
    """
    Outcome of comparing the Pfaffian expansion with the lemma's form.

    mismatches maps every basis tuple with a nonzero difference to the
    difference polynomial.
    """
    n: int
    basis_tuples: int
    difference: ExteriorForm
    coefficients: Dict[Tuple[int, ...], Tuple[str, str]] = field(default_factory=dict)

    @property
    def verified(self):
        return not self.difference

    @property
    def status(self):
        return 'verified' if self.verified else 'mismatch'

    @property
    def mismatches(self):
        return {I: c for I, c in self.difference.terms.items()}

    def to_dict(self):
        return {
            'status': self.status,
            'n': self.n,
            'basis_tuples': self.basis_tuples,
            'mismatches': {_key(I): str(c.as_expr()) for I, c in sorted(self.difference.terms.items())},
            'coefficients': {_key(I): {'euler': e, 'lemma': l} for I, (e, l) in sorted(self.coefficients.items())},
        }

    def to_text(self):
        lines = [f'n = {self.n}: {self.status} ({self.basis_tuples} basis tuples)']
        for I, (e, l) in sorted(self.coefficients.items()):
            mark = '  ' if I not in self.difference.terms else '!!'
            lines.append(f'{mark} w{_key(I)}: {e}')
            if mark == '!!':
                lines.append(f'   lemma: {l}')
        return '\n'.join(lines)


def _key(I):
    return '^'.join(str(i) for i in I)


def verify_lemma(n, perturb=None):
    """
    euler_form_expansion(n) - lemma_rhs_form(n), coefficient by coefficient.

    Returns
    -------
    DifferenceReport
        verified iff the difference is identically zero.
    """
    euler = euler_form_expansion(n)
    lemma = lemma_rhs_form(n, perturb=perturb)
    difference = euler - lemma
    tuples = sorted(set(euler.terms) | set(lemma.terms))
    coefficients = {I: (str(euler.coefficient(*I).as_expr()), str(lemma.coefficient(*I).as_expr()))
                    for I in tuples}
    report = DifferenceReport(n=int(n), basis_tuples=len(tuples), difference=difference,
                              coefficients=coefficients)
    log.info("lemma check n=%d: %s", n, report.status)
    return report
