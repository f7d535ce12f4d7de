"""eikolab: a numerical laboratory for unit-gradient fields in the plane.

Exact solutions of |grad u| = 1, the cubic entropy calculus that separates
regular solutions from entropy producers, the phase-family differential
inclusion and its constrained Beltrami form, fractional difference-quotient
metrics, and a cone-point detector, all on uniform cell-centered grids.
"""

__version__ = "0.1.0"

from .errors import (ConfigurationError, DomainError, EikolabError,
                     HypothesisError, PreconditionError, ResolutionError,
                     SingularityError)
from .grid import (GridSpec, MatrixField2D, Mollifier, ScalarField2D,
                   VectorField2D, bump_integral, bump_test_function,
                   divergence, gradient, integrate, interior_region, mollify,
                   mollify_derivative, perp, second_derivatives)
from .solutions import (EikonalSolution, HalfSpaceIndicator, ball_distance,
                        chi, eikonal_residual, jop_characteristic_residual,
                        planar, point_set_distance, roof, sample, vortex)
from .entropy import (Entropy, EntropyGenerator, SIGMA_E1E2, SIGMA_EPS1EPS2,
                      SpecialEntropyPair, divergence_identity_check,
                      entropy_production, lemma18_identity_check,
                      make_entropy, make_psi, psi_antisymmetry, sigma_e1e2,
                      sigma_e1e2_tilde, sigma_eps1eps2, sigma_eps1eps2_tilde,
                      strong_production_density)
from .special_xi import (ChiKBound, SpecialEntropyXi, chi_k_bound, s0_profile,
                         special_xi_entropy)
from .inclusion import (C0Result, GammaForward, KMatrix, WirtingerPair,
                        beltrami_residual, c0_bruteforce, conformal_split,
                        det_kernel, df_from_gradient, gamma_forward,
                        gamma_inverse, k_matrix, k_matrix_values,
                        phase_recover, wirtinger)
from .sobolev import (EnergyReport, SeminormSweep, aviles_giga_energy,
                      eps_scaled_quotient, gagliardo_seminorm,
                      key_estimate_dual_norm, key_estimate_probe,
                      mollification_bounds_check)
from .singularities import (DetectionReport, LineLikeCluster, SingularPoint,
                            detect_singularities, lipschitz_map, vortex_fit)
from .scenario import (PROBES, ScenarioConfig, ScenarioReport, Verdict,
                       emit_plots, load_config, run_scenario, validate_config)
