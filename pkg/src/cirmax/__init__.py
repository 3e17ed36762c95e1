"""Tail of the running maximum of a CIR diffusion by Kummer-function methods."""

from .asymptotics import cir_tail_asymp, saddle_data, tail_asymp_fixed_y, tail_asymp_small_y
from .eigen import eigen_I, find_zeros
from .inversion import bromwich, bromwich_I, cir_running_max_cdf
from .kummer import LogComplex, kummer_m, kummer_m_da, kummer_m_log
from .params import CirParams, DimensionlessArgs

__version__ = "0.1.0"

__all__ = [
    "CirParams",
    "DimensionlessArgs",
    "LogComplex",
    "bromwich",
    "bromwich_I",
    "cir_running_max_cdf",
    "cir_tail_asymp",
    "eigen_I",
    "find_zeros",
    "kummer_m",
    "kummer_m_da",
    "kummer_m_log",
    "saddle_data",
    "tail_asymp_fixed_y",
    "tail_asymp_small_y",
]
