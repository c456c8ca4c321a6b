"""Quantization routes for the damped harmonic oscillator.

Fixed-time doubling with Bogoliubov transformations, gauge-invariant
quasifree and thermal states, and the unitary dilation of the full
contraction semigroup on a half-line function space.
"""
from .errors import (DegenerateTransformation, DhoError, InconsistentGenerator, InvalidArgument,
                     NotAContraction, ResourceLimit, TruncationInsufficient, WindowTooSmall)
from .phase_space import (DhoGenerator, PhaseSpace, Propagator, Regime, evolve_closed_form, evolve_oracle,
                          make_generator, make_phase_space, quadratic_residual)

__version__ = "0.1.0"
