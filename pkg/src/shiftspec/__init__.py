"""Spectra of weighted shifts, convolution multipliers and Toeplitz operators
on weighted sequence spaces over Z, Z+ and Z^k."""

__version__ = "0.1.0"

from .errors import (ConfigError, DomainError, HypothesisViolation, PoleError,
                     PreconditionError, ShiftSpecError, UnsupportedNormError)
from .weights import (Domain, WeightFamily, boundedness, eval_weight, log_shift_norm,
                      shift_norm, spectral_radius_shift, windowed_shift_norm)
from .spaces import (ExponentRule, FiniteSeq, Orlicz, OrliczFunction, SpaceSpec,
                     VariableExponent, WeightedLp, scale_seq, space_norm)
from .operators import (OperatorSpec, apply_operator, convolve, finite_section,
                        largest_singular_value, operator_norm_bracket, project_plus)
from .symbols import LaurentSymbol, PointCloud, eval_symbol, image_of_region, sup_on_circle
from .spectra import (Annulus, Circle, Disk, Image, hausdorff, predicted_sigma_multiplier,
                      predicted_sigma_shift, predicted_sigma_toeplitz,
                      predicted_sigma_unilateral, region_contains)
from .verify import (Certificate, approx_eigen_residual, blowup_witness, check_scaling_identity,
                     check_symbol_bound, neumann_outside_certificate, outside_certificate,
                     toeplitz_outside_certificate, verify_point)
from .multidim import (JointRegion, MultiIndexSeq, approx_eigen_residual_multi,
                       eval_symbol_multi, joint_exclusion_test, joint_region_separable,
                       multi_convolve, outside_certificate_multi,
                       predicted_sigma_multiplier_multi)
from .tridiag import sturm_count, tridiagonal_eigenvalues
