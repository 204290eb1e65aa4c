"""Numerical laboratory for the Gross-Pitaevskii normal-form system.

Subpackages:

- ``gplab.field``       radial spectral fields, multipliers, norms
- ``gplab.symbols``     dispersion-relation catalog and dyadic band checks
- ``gplab.dynamics``    GP evolution, normal-form transform, verifiers
- ``gplab.oscillatory`` oscillatory integrals and dispersive kernels
- ``gplab.bessel``      Bessel evaluation and asymptotics checks
- ``gplab.strichartz``  dyadic mixed-norm predictions and measurements
- ``gplab.experiments`` reproducible experiment runner
- ``gplab.cli``         command-line entry point
"""

__version__ = "0.1.0"
