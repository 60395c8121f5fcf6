"""Compress-and-estimate distortion-rate toolkit.

Closed forms for the quadratic-Gaussian and binary bit-flip settings, the
optimal-coding baselines, and Monte Carlo simulators of the test channels.
"""
from . import binary, gaussian, rdmath, simulator
from ._kernels import BACKEND
from .errors import DomainError, InfeasibleError, SizeError

__all__ = ["binary", "gaussian", "rdmath", "simulator", "BACKEND",
           "DomainError", "InfeasibleError", "SizeError"]
__version__ = "0.1.0"
