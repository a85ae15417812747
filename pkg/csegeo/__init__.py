"""
csegeo: continuous surface embeddings on triangle meshes.

Spectral mesh processing, functional-map correspondence, geodesic soft
labels and softmax vertex posteriors.
"""

__version__ = "0.1.0"
