"""Numerics for Toeplitz operators on generalized Fock spaces F^2_{m,alpha,s}(C^d)."""

__version__ = "0.1.0"

from .errors import (DivergenceError, FockopError, NoConvergenceError, NumericalError,
                     ParameterError, RangeError, SymbolParseError)
from .space import (MultiIndex, SpaceParams, graded_basis, kernel_constant, log_moment, moment,
                    normalization_constant, orthonormal_coefficient)
from .special import (MLParams, kernel_asymptotic_ratio, kernel_eval, kernel_series, ml_eval,
                      ml_evaluate)
from .quadrature import (build_product_rule, build_radial_rule, gauss_power_exp, integrate,
                         integrate_c1, integrate_c2, integrate_radial, moment_table)
from .symbols import (ScaleIndex, Symbol, constant, counterexample_symbol, dc_norm_estimate,
                      exp_radial, g_transform, indicator_radius, monomial, parse_symbol,
                      radial_power, radialize, v_transform)
from .mellin import (MellinStrip, OmegaFunction, gamma_quotient_kernel, mellin_convolve,
                     mellin_transform, omega, period_scan, vanishing_moment_test)
from .toeplitz import (ResidualReport, TruncatedOperator, build_matrix, commutator_residual,
                       counterexample_check, diagonal_radial, equation_residual, offblock_mass,
                       project_pointwise, zero_product_residual)

__all__ = [name for name in dir() if not name.startswith("_")]
