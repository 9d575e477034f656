"""Computational higher-order Fourier analysis over F_p^n.

Gowers uniformity norms (direct, recursive and Fourier evaluation paths),
Host-Kra cube measures on finite systems, phase polynomials with exact
exponent arithmetic, abelian cocycle extensions, a finite window into the
Heisenberg nilsystem, and inverse-theorem correlation searches.
"""

from ._backend import BACKEND
from .cubes import (CubeMeasure, cube_integral, cube_space, d_k_exponents, d_k_values,
                    ghk_seminorm, ghk_seminorm_iterated)
from .dynamics import (CoboundaryObstruction, CoboundaryWitness, CocycleTable,
                       CocycleViolation, DegreeCertificate, FiberGroup, FiniteSystem,
                       coboundary_of, enumerate_polynomial_cocycles, exhaustive_degree_bound,
                       extend, fiber_translation, is_cocycle, solve_coboundary,
                       system_degree_bound, translation_system, type_test,
                       vertical_derivative, vertical_derivative_exponents)
from .errors import CapacityError, ContractError, GowersError, resolve_budget
from .functions import (ExponentFunction, GroupFunction, Spectrum, fourier_transform,
                        inner_product, random_unit_function)
from .group import Character, CyclicValue, GroupPoint, Space, get_space, is_prime
from .heisenberg import (HeisenbergPoint, HeisenbergSystem, LaurentWindow,
                         action_homomorphism_audit, binom2, certify_phase_polynomial,
                         well_definedness_audit)
from .norms import (NormReport, dual_function, gowers_inner_product, gowers_norm_direct,
                    gowers_norm_fast, pairing_with_dual, u2_norm_fourier)
from .phasepoly import (CarryTable, CorrelationResult, PhaseFamily, PhasePolynomial,
                        TorsionAudit, carry_bit, carry_polynomial, compose, degree_test,
                        digit_addition_defect, enumerate_phase_polys, inverse_search,
                        root, standard_phase, torsion_audit, torsion_bound_for_degree,
                        translate_product)

__version__ = "0.1.0"
