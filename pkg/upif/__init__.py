"""
UPIF: unitary precoded integer-forcing simulation
Lattice tools, precoders, IF and ML receivers and Monte-Carlo error-rate curves.
"""

__version__ = "0.1.0"
__author__ = "Alex Prima"
__license__ = "MIT"

from .core import UPIFSimulation
from .simulation import ErrorCurve, SimConfig, diversity_slope, run_curve

__all__ = ['UPIFSimulation', 'SimConfig', 'ErrorCurve', 'run_curve', 'diversity_slope']
