"""
Shared exceptions and runtime settings for puncvol.
"""
import logging
import os
import warnings

__version__ = '0.1.0'

log = logging.getLogger(__name__)

THREADS_ENV = 'PUNCVOL_THREADS'


# ═══════════════════════════════════════════════════════════════════
#  Exceptions
# ═══════════════════════════════════════════════════════════════════

class PuncvolError(Exception):

    """
    Base class for every error raised by puncvol.
    """
    pass


class DomainError(PuncvolError, ValueError):

    """
    To be raised when an input violates an operation's precondition
    (non-square matrix, odd order, index out of range, ...).
    """
    pass


class SingularityError(DomainError):

    """
    To be raised when a vector field is evaluated too close to its
    singular set.
    """
    pass


class DegeneratePointError(DomainError):

    """
    To be raised when a parallel frame is requested at the pole or its
    antipode, where the parallel degenerates to a point.
    """
    pass


class ResourceError(PuncvolError):

    """
    To be raised when a symbolic expansion is requested outside the
    supported range of sphere parameters.
    """
    pass


class ConfigurationError(PuncvolError):

    """
    To be raised when a run configuration is inconsistent, e.g. a grid
    built for another sphere, or Monte Carlo on an unbounded integrand.
    """
    pass


class NumericFailure(PuncvolError):

    """
    To be raised when a computed quantity misses its tolerance, e.g. a
    degree integral too far from an integer.
    """
    pass


# ═══════════════════════════════════════════════════════════════════
#  Runtime settings
# ═══════════════════════════════════════════════════════════════════

def worker_count():
    """
    Number of worker threads for chunked grid reductions.

    Read from the PUNCVOL_THREADS environment variable. Missing means 1;
    anything that is not a positive integer also means 1, with a warning.

    Returns
    -------
    int
    """
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw.strip() == '':
        return 1
    try:
        count = int(raw)
    except ValueError:
        warnings.warn(f"{THREADS_ENV}={raw!r} is not an integer, using 1 worker.",
                      UserWarning, stacklevel=2)
        return 1
    if count < 1:
        warnings.warn(f"{THREADS_ENV}={count} is not positive, using 1 worker.",
                      UserWarning, stacklevel=2)
        return 1
    return count
