"""Exponential-type neural network operators activated by sigmoidal functions."""

from .density import (DensityKernel, MomentTable, denominator_sum, make_kernel, moments,
                      partition_sum, tail_mass)
from .errors import ExpnnError
from .operators import (FunctionHandle, OperatorConfig, classical_eval, nn_eval,
                        nn_eval_multi, quasi_eval)
from .sigmoids import SigmoidSpec, check_conditions, eval_sigmoid, get_sigmoid

__version__ = "0.1.0"
