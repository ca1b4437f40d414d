"""
Closed-form volumes and lower bounds for unit vector fields on S^{2n+1}.

All normalized values are volumes divided by vol(S^{2n+1}). Binomial ratios
are formed as exact rationals before conversion to float.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from sympy import Rational, binomial, sqrt as sym_sqrt, pi as sym_pi

from .base import DomainError
from .spherekit import sphere_volume

log = logging.getLogger(__name__)

bound_names = ('thmA', 'corollary', 'thmB', 'bcj2', 'bcj3', 'bcn_a', 'volM')


def _check_n(n):
    if int(n) != n or n < 1:
        raise DomainError(f"sphere parameter n must be an integer >= 1, got {n}")
    return int(n)


def _abs_sum(indices):
    return sum(abs(int(i)) for i in indices)


# ═══════════════════════════════════════════════════════════════════
#  Closed-form volumes
# ═══════════════════════════════════════════════════════════════════

def radial_ratio(n):
    """4^n / C(2n, n), the normalized volume of the radial field (exact)."""
    n = _check_n(n)
    return Rational(4 ** n, binomial(2 * n, n))


def bcn_ratio(n):
    """sum_k C(n,k)^2 / C(2n,2k), the normalized lower bound for smooth fields (exact)."""
    n = _check_n(n)
    return sum((Rational(binomial(n, k) ** 2, binomial(2 * n, 2 * k)) for k in range(n + 1)), Rational(0))


def closed_volumes(n, exact=False):
    """
    Normalized volumes of the reference fields on S^{2n+1}.

    Returns
    -------
    dict
        volM (the sphere itself), hopf (2^n), radial (4^n / C(2n,n)),
        pedersen (sqrt(2 pi n)) and bcn_a. Exact sympy numbers when exact=True.
    """
    n = _check_n(n)
    values = {
        'volM': Rational(1),
        'hopf': Rational(2) ** n,
        'radial': radial_ratio(n),
        'pedersen': sym_sqrt(2 * sym_pi * n),
        'bcn_a': bcn_ratio(n),
    }
    if exact:
        return values
    return {k: float(v) for k, v in values.items()}


def radial_volume(n):
    return float(radial_ratio(n)) * sphere_volume(2 * n + 1)


def chain_table(ns):
    """
    Rows of normalized closed-form volumes, one per sphere parameter, in the
    column order n, volM, radial, pedersen, hopf, bcn_a.
    """
    rows = []
    for n in ns:
        v = closed_volumes(n)
        rows.append({'n': int(n), 'volM': v['volM'], 'radial': v['radial'],
                     'pedersen': v['pedersen'], 'hopf': v['hopf'], 'bcn_a': v['bcn_a']})
    return rows


# ═══════════════════════════════════════════════════════════════════
#  Index-dependent bounds
# ═══════════════════════════════════════════════════════════════════

def thmA_bound(n, Ip, Im):
    """(pi/4) vol(S^2n) (|Ip| + |Im|) for a field singular at two antipodal points."""
    n = _check_n(n)
    return math.pi / 4 * sphere_volume(2 * n) * _abs_sum((Ip, Im))


def corollary_bound(n, Ip, Im):
    """(vol(V_R) / 2) (|Ip| + |Im|) with vol(V_R) = 4^n / C(2n,n) vol(S^{2n+1})."""
    return radial_volume(_check_n(n)) / 2 * _abs_sum((Ip, Im))


def thmB_bound(n, indices):
    """(vol(S^2n) / 2) sum |I| over a finite set of isolated singularities."""
    n = _check_n(n)
    return sphere_volume(2 * n) / 2 * _abs_sum(indices)


def bcj_bounds(m, IN, IS):
    """
    Bounds for fields on S^m with singularities at two antipodal points.

    m = 2: (pi + |IN| + |IS| - 2) vol(S^2) / 2
    m = 3: (|IN| + |IS|) vol(S^3)
    """
    if m == 2:
        return 0.5 * (math.pi + abs(IN) + abs(IS) - 2) * sphere_volume(2)
    if m == 3:
        return (abs(IN) + abs(IS)) * sphere_volume(3)
    raise DomainError(f"these bounds are stated for m = 2 or 3, got {m}")


# ═══════════════════════════════════════════════════════════════════
#  Reports
# ═══════════════════════════════════════════════════════════════════

@dataclass
class BoundReport:
    """
    Bound values for one sphere parameter and index data, optionally
    compared with a computed volume (value +- error).
    """
    n: int
    indices: List[int]
    bounds: Dict[str, dict] = field(default_factory=dict)
    volume: Optional[float] = None
    error: Optional[float] = None

    def add(self, name, value):
        if name not in bound_names:
            raise DomainError(f"unknown bound '{name}'")
        entry = {'value': float(value), 'normalized': float(value) / sphere_volume(2 * self.n + 1)}
        if self.volume is not None:
            entry['satisfied'] = bool(self.volume + (self.error or 0.0) >= value)
        self.bounds[name] = entry

    def to_dict(self):
        return {'n': self.n, 'indices': list(self.indices), 'bounds': self.bounds,
                'volume': self.volume, 'error': self.error}


def bound_report(n, indices, volume=None, error=None):
    """
    Evaluate every bound that applies to the given indices.

    thmA and corollary need exactly two indices (the antipodal pair); bcj3
    applies for n = 1 only; thmB, bcn_a and volM always apply.
    """
    n = _check_n(n)
    indices = [int(i) for i in indices]
    report = BoundReport(n=n, indices=indices, volume=volume, error=error)
    if len(indices) == 2:
        report.add('thmA', thmA_bound(n, *indices))
        report.add('corollary', corollary_bound(n, *indices))
        if n == 1:
            report.add('bcj3', bcj_bounds(3, *indices))
    report.add('thmB', thmB_bound(n, indices))
    report.add('bcn_a', float(bcn_ratio(n)) * sphere_volume(2 * n + 1))
    report.add('volM', sphere_volume(2 * n + 1))
    return report
