"""Stirling's root-finding iteration as a dynamical system.

Symbolic construction of the iteration map z -> z - f(z)/f'(z - f(z)) for
polynomials, rational functions, Moebius maps and unicritical quadratics;
fixed/critical point classification; orbit and basin computation; executable
checks of the classical dynamical facts; and a CLI tying it all together.
"""

from .classification import (FatouCensus, FixedPointReport, classify_infinity,
                             classify_multiplier, critical_census, critical_points,
                             fixed_points, free_critical_points, herman_ring_bound,
                             stirling_fixed_points)
from .dynamics import (AttractorTable, BasinRaster, OrbitResult, classify_grid,
                       conjugate_flip, conjugation_permutation, iterate_orbit)
from .iterators import (MapSpec, build_map, build_newton, build_stirling_mobius,
                        build_stirling_polynomial, build_stirling_rational,
                        build_stirling_unicritical, newton_step_derivative,
                        newton_step_numeric, step_derivative_numeric,
                        step_numeric, stirling_rational_parts,
                        stirling_step_derivative, stirling_step_numeric)
from .polynomial import ComplexPolynomial, NonConvergence, RootSet
from .rational import (INFINITY, Indeterminate, RationalMap, affine_conjugate,
                       compose_poly_rational, conjugate_reciprocal, eval_sphere,
                       is_infinite)
from .render import Palette, ppm_bytes, write_png, write_ppm
from .verify import (VerificationReport, Witness, free_critical_orbit,
                     reference_case_suite, repeated_zero_multiplier, run_suite,
                     scaling_check, symmetry_check)

__version__ = "0.1.0"

__all__ = [
    "AttractorTable", "BasinRaster", "ComplexPolynomial", "FatouCensus",
    "FixedPointReport", "INFINITY", "Indeterminate", "MapSpec", "NonConvergence",
    "OrbitResult", "Palette", "RationalMap", "RootSet", "VerificationReport",
    "Witness", "affine_conjugate", "build_map", "build_newton",
    "build_stirling_mobius", "build_stirling_polynomial",
    "build_stirling_rational", "build_stirling_unicritical", "classify_grid",
    "classify_infinity", "classify_multiplier", "compose_poly_rational",
    "conjugate_flip", "conjugate_reciprocal", "conjugation_permutation",
    "critical_census", "critical_points", "eval_sphere", "fixed_points",
    "free_critical_orbit", "free_critical_points", "herman_ring_bound",
    "is_infinite", "iterate_orbit", "newton_step_derivative",
    "newton_step_numeric", "ppm_bytes", "reference_case_suite",
    "repeated_zero_multiplier", "run_suite", "scaling_check",
    "step_derivative_numeric", "step_numeric", "stirling_fixed_points",
    "stirling_rational_parts",
    "stirling_step_derivative", "stirling_step_numeric", "symmetry_check",
    "write_png", "write_ppm",
]
