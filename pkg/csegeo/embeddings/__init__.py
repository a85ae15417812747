"""
Initialization file for embeddings package.
"""

# Import embedding components to make them available
from csegeo.embeddings.embedding import (
    EmbeddingSet,
    PixelBatch,
    expand,
    scores,
    posterior,
    predict,
    transfer,
    assign_by_embedding,
    embedding_colors,
)
from csegeo.embeddings.losses import (
    loss_hard,
    loss_soft,
    hard_cross_entropy,
    soft_cross_entropy,
    soft_targets,
)
