"""
Randomized search for shape arrays violating the pointwise comparison
between the graph volume and the weighted sigma sums.

Three right-hand sides are probed:

    abs     sum_k w_k (|sigma_2k| + |sigma_perp_2k(2n)|)
    angle   sqrt(S1^2 + S2^2)
    signed  S1 + S2

The abs form is known to fail: the array [[1,0,0],[0,1,1],[0,0,0]] has
right-hand side 3 against a graph volume of sqrt(6). It is always
evaluated first as a regression case when n = 1.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from . import constants
from .base import DomainError
from .matrixkit import (ShapeArray, graph_volume, pointwise_rhs_abs, pointwise_rhs_angle,
                        pointwise_rhs_signed)
from .spherekit import draw_seed

log = logging.getLogger(__name__)

forms = {
    'abs': pointwise_rhs_abs,
    'angle': pointwise_rhs_angle,
    'signed': pointwise_rhs_signed,
}

regression_case = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 1.0], [0.0, 0.0, 0.0]])

batch_size = 2 ** 16
max_records = 50


def _validate_forms(names):
    for name in names:
        if name not in forms:
            raise DomainError(f"unknown lemma form '{name}', expected one of {sorted(forms)}")


@dataclass
class Violation:
    form: str
    trial: int
    matrix: list
    lhs: float
    rhs: float

    def to_dict(self):
        return {'form': self.form, 'trial': self.trial, 'matrix': self.matrix,
                'lhs': self.lhs, 'rhs': self.rhs}


@dataclass
class ProbeReport:
    """
    Counts of violations per form, with up to max_records stored examples
    each. trial -1 marks the regression case.
    """
    n: int
    trials: int
    seed: int
    counts: Dict[str, int] = field(default_factory=dict)
    worst_ratio: Dict[str, float] = field(default_factory=dict)
    violations: List[Violation] = field(default_factory=list)
    regression: Optional[dict] = None

    def to_dict(self):
        return {'n': self.n, 'trials': self.trials, 'seed': self.seed, 'counts': self.counts,
                'worst_ratio': self.worst_ratio, 'regression': self.regression,
                'violations': [v.to_dict() for v in self.violations]}


def evaluate_batch(n, a, names=tuple(forms)):
    """
    Left side (graph volume of the full array) and every requested right
    side for a stack of shape arrays. Re-evaluating a stored matrix through
    this function reproduces its values exactly.
    """
    A = ShapeArray(n, a)
    lhs = graph_volume(A.a, method='minors')
    return lhs, {name: np.asarray(forms[name](A), dtype=float) for name in names}


def _violated(lhs, rhs):
    return rhs > lhs * (1.0 + 1e-12)


def random_shape_arrays(n, count, rng):
    """Uniform entries in constants.probe_entry_range with a zero last row."""
    lo, hi = constants.probe_entry_range
    size = 2 * n + 1
    a = rng.uniform(lo, hi, size=(count, size, size))
    a[:, -1, :] = 0.0
    return a


def probe_lemma(n, trials, seed=None, names=tuple(forms)):
    """
    Evaluate random shape arrays and collect violations of each form.

    Parameters
    ----------
    n : int
    trials : int
        Number of random arrays (the regression case is extra).
    seed : int, optional
        Drawn and recorded when missing.
    names : sequence of str, optional
        Forms to probe.

    Returns
    -------
    ProbeReport
    """
    _validate_forms(names)
    if trials < 0:
        raise DomainError(f"trial count must be >= 0, got {trials}")
    seed = draw_seed() if seed is None else int(seed)
    report = ProbeReport(n=n, trials=int(trials), seed=seed,
                         counts={name: 0 for name in names},
                         worst_ratio={name: 0.0 for name in names})

    def record(a, start, lhs, rhs):
        for name in names:
            ratio = rhs[name] / lhs
            report.worst_ratio[name] = max(report.worst_ratio[name], float(np.max(ratio, initial=0.0)))
            hits = np.flatnonzero(_violated(lhs, rhs[name]))
            report.counts[name] += int(hits.size)
            stored = sum(1 for v in report.violations if v.form == name)
            for i in hits[:max(0, max_records - stored)]:
                report.violations.append(Violation(form=name, trial=-1 if start < 0 else int(start + i),
                                                   matrix=a[i].tolist(), lhs=float(lhs[i]),
                                                   rhs=float(rhs[name][i])))

    if n == 1:
        lhs, rhs = evaluate_batch(n, regression_case[None], names)
        report.regression = {'matrix': regression_case.tolist(), 'lhs': float(lhs[0]),
                             'rhs': {name: float(v[0]) for name, v in rhs.items()}}
        record(regression_case[None], -1, lhs, rhs)

    blocks = -(-int(trials) // batch_size)
    children = np.random.SeedSequence(seed).spawn(blocks)
    for b, child in enumerate(children):
        count = min(batch_size, trials - b * batch_size)
        rng = np.random.Generator(np.random.Philox(child))
        a = random_shape_arrays(n, count, rng)
        lhs, rhs = evaluate_batch(n, a, names)
        record(a, b * batch_size, lhs, rhs)
    log.info("probed %d arrays (n=%d): %s", trials, n, report.counts)
    return report


def reproduces(violation, n):
    """True if re-evaluating a stored violation gives identical values."""
    lhs, rhs = evaluate_batch(n, np.array(violation.matrix)[None], (violation.form,))
    return float(lhs[0]) == violation.lhs and float(rhs[violation.form][0]) == violation.rhs
