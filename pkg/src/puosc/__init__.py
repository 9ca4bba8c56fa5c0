"""Complex canonical transformation of the Pais-Uhlenbeck oscillator.

Subpackages and modules
-----------------------
core       coefficient identities, the matrix M and the reality surface
classical  trajectories, Lagrangian identities and the equal-frequency case
brackets   exact polynomial algebra, Ostrogradsky data and Dirac brackets
cosc       the complexified harmonic oscillator and its kernels
puq        PU spectrum, ground state and propagator
verify     registry of executable checks used by ``puosc verify``
"""

from .core import (
    ComplexPhasePoint,
    Frequencies,
    PUCoefficients,
    RealPhasePoint,
    build_M,
    build_M_inverse,
    compute_coefficients,
    symplectic_residual,
    to_complex,
    to_real,
)
from .errors import Caustic, NotOnRealitySurface, PUError

__version__ = "0.1.0"

__all__ = [
    "Caustic",
    "ComplexPhasePoint",
    "Frequencies",
    "NotOnRealitySurface",
    "PUCoefficients",
    "PUError",
    "RealPhasePoint",
    "__version__",
    "build_M",
    "build_M_inverse",
    "compute_coefficients",
    "symplectic_residual",
    "to_complex",
    "to_real",
]
