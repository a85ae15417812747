"""
Initialization file for spectral package.
"""

# Import spectral components to make them available
from csegeo.spectral.operators import Operators, build_operators, face_gradient, face_gradients, dirichlet_energy
from csegeo.spectral.basis import SpectralBasis, eigenbasis, analyze, synthesize, low_pass
