INDEX_MAGIC = b"EBIX"
INDEX_VERSION = 1

EMBED_BATCH_SIZE = 32
DEFAULT_THREADS = 1
THREADS_ENV = "EBADAPT_THREADS"

DEFAULT_TOP_K = 1000

POOLING_ANCHOR = "anchor"
POOLING_MEAN = "mean"
