"""Exact enumeration, asymptotics and random generation for chord
configurations on a disk with a prescribed number of crossings.

Subpackages are organized by concern:

- ``chords_core``: the object model (families, configurations, crossings,
  cores, region profiles, exhaustive generation).
- ``enumeration``: crossing-connected generation, k-core assembly, and
  k-core polynomials.
- ``series_engine``: exact truncated power series and the crossing-free
  functional equations.
- ``gf_compose``: generating functions of k-crossing configurations by
  kernel substitution into core polynomials.
- ``asymptotics``: growth constants, potential analysis, restricted-size
  constants.
- ``sampler``: Boltzmann random generation.
- ``cli``: command line entry point.
"""

__version__ = "0.1.0"
