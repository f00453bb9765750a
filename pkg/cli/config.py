# Exit codes
EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3

# Recorded in every run manifest
CODE_VERSION = "1.0.0"

# Environment
LOG_LEVEL_ENV = "EBADAPT_LOG_LEVEL"
ENV_FILES = (".env", ".ebadapt/.env")
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

# Artifact names inside an --out directory
MANIFEST_FILE = "manifest.json"
TOKENIZER_FILE = "tokenizer.json"
ADAPTED_CHECKPOINT = "adapted.ckpt"
FINETUNED_CHECKPOINT = "finetuned.ckpt"
ADAPT_LOSS_FILE = "adapt_loss.csv"
FINETUNE_LOSS_FILE = "finetune_loss.csv"
INDEX_FILE = "index.bin"
RUN_FILE = "run.trec"
METRICS_FILE = "metrics.json"
LEXICAL_CSV = "lexical.csv"
LEXICAL_TXT = "lexical.txt"
REPORT_CSV = "report.csv"
REPORT_TXT = "report.txt"

SCHEMES = ("n2s", "s2s", "n2n", "none")
COMPRESSION_METHODS = ("sparse", "dimred", "dimred_star")
NEGATIVE_SOURCES = ("mined", "file", "none")
LEXICAL_NS = (10, 100, 500, 1000)
