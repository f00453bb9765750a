"""
EBAdapt Lab - embedding_compression

Shrinking embeddings under a budget: top-N sparsification, a projection
trained with fine-tuning (DimRed) and a projection distilled from a frozen
retriever (DimRed*).
"""

from .compress import apply_compression, compress_index, compress_query, index_descriptor
from .dimred import ProjectionDistiller, distill_dimred, distill_from_encoder, pca_projection, train_dimred
from .exceptions import CompressionError, InvalidCompressionError
from .models import CompressionDescriptor, CompressionMethod, DistillConfig, DistillResult
from .sparse import sparsify

__all__ = [
    # Types
    "CompressionMethod",
    "CompressionDescriptor",
    "DistillConfig",
    "DistillResult",

    # Compression
    "sparsify",
    "train_dimred",
    "distill_dimred",
    "distill_from_encoder",
    "ProjectionDistiller",
    "pca_projection",
    "apply_compression",
    "compress_index",
    "compress_query",
    "index_descriptor",

    # Exceptions
    "CompressionError",
    "InvalidCompressionError",
]

__version__ = "1.0.0"
