"""Numerical integration of exp(-W) over decorated-surface moduli, with crown, cluster and tropical tools."""
from .core_types import (BoundaryLengths, ConsistencyError, ConvergenceError, CrownParams,
                         DataError, DecoratedSurface, DivergenceError, EvaluationError,
                         ExpVolError, ParameterError, RecursionConstants, VolumePolynomial,
                         cutting_constant, surface_constant, validate_surface,
                         volume_polynomial)
from .quadrature import IntegralResult, QuadConfig
from .bessel import bessel_J, besselk
from .crown import crown_volume, crown_signed_moment, crown_moment_halfline, operator_signed_moment
from .recursion import (BFunctionResult, LaplaceArgs, b_function, b_function_sign_sum,
                        exp_volume, l_function, vol_A02, vol_A11_neck, vol_A11_unfold)

__version__ = "0.1.0"
