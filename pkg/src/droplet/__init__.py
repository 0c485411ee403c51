"""Energy/mass ratios of balls and cylinders for repulsive liquid-drop energies.

Closed forms, quadratures and certified interval comparisons for Riesz,
truncated Coulomb and Yukawa-screened kernels.
"""

from droplet.enclosure import Enclosure
from droplet.kernels import Family, Kernel, riesz, truncated, yukawa
from droplet.specfun import FAST, Certified, Fast

__all__ = ["Enclosure", "Family", "Kernel", "riesz", "truncated", "yukawa", "FAST", "Certified", "Fast"]
__version__ = "0.1.0"
