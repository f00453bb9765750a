# Toy-scale defaults (original setting: 7B LLaMA-2, sequence length 1024)
N_LAYERS = 4
N_HEADS = 4
D_MODEL = 128
D_FF = 512
VOCAB_SIZE = 1024
MAX_SEQ_LEN = 256
ROPE_BASE = 10000.0
NORM_EPS = 1e-6
INIT_STD = 0.02

PAD_ID = 0
BOS_ID = 1
EOS_ID = 2

MLP_ACTIVATIONS = ("silu", "gelu")

CHECKPOINT_MAGIC = b"EBCK"
CHECKPOINT_VERSION = 1
