# Import every submodule so that `import puncvol` exposes them all.
from puncvol import base, constants, matrixkit, pfaffian, spherekit, fields, functionals, topology, bounds, probe, records, cli

# Shortcuts for the most used entry points (pv.volume instead of pv.functionals.volume).
from .base import __version__
from .fields import VectorFieldSpec
from .spherekit import GridSpec, sphere_volume
from .functionals import volume, parallel_flux, stokes_scan
from .topology import field_index, kronecker_degree
from .pfaffian import verify_lemma

# What `from puncvol import *` brings in.
__all__ = ['base', 'constants', 'matrixkit', 'pfaffian', 'spherekit', 'fields', 'functionals', 'topology', 'bounds', 'probe', 'records', 'cli']
