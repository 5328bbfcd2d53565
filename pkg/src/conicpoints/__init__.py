"""Exact counts of primitive points of bounded height on ternary conics."""
from .counting import (
    CountReport, RegionV, bounding_box, count_M, count_M_star, count_N, count_N_brute,
    count_N_param, count_N_script, volume_V,
)
from .densities import (
    DensityReport, c_prime, count_Nstar_mod, peyre_constant, sigma_infinity, sigma_p, sigma_p_prime,
)
from .harness import CorpusSpec, SweepRow, generate_corpus, run_sweep, verify_identities
from .norms import IsometricNorm, k0
from .parametrization import (
    ParamPoint, ParamSystem, build_param_system, parameter_from_point, point_from_parameter, rho_star,
)
from .quadform import (
    Q0, Q1, SpecialConic, TernaryQuadraticForm, UnimodularMatrix, delta_gcd_minors, discriminant,
    discriminant_special, gram_doubled, height, transform,
)
from .unimodular import complete_to_sl3
from .zeros import PrimitiveZero, ZeroNotFound, find_primitive_zero

__version__ = "0.1.0"
