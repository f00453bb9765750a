# Toy-scale defaults; the original recipe fine-tunes with LoRA on mined ANN negatives
STEPS = 1000
BATCH_SIZE = 16
LEARNING_RATE = 1e-3
TEMPERATURE = 1.0          # raw inner products; ~0.02 is the usual practical setting
N_HARD_NEGATIVES = 1
K_WINDOW = 100
CLIP_NORM = 1.0
LOG_EVERY = 50
SEED = 0

USE_LORA = True
LORA_RANK = 8
LORA_ALPHA = 16.0

# abort when a batch loss exceeds this multiple of ln(candidates per query), floored at 1
DIVERGENCE_FACTOR = 100.0

LOSS_CURVE_COLUMNS = ["step", "loss"]
