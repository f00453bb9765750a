# Toy-scale defaults (original setting: 10,000 steps, batch 256, lr 1e-5)
STEPS = 2000
BATCH_SIZE = 32
LEARNING_RATE = 1e-4
CLIP_NORM = 1.0
LOG_EVERY = 50
SEED = 0

W_EBAE = 1.0
W_EBAR = 1.0

# abort when a record's loss exceeds this multiple of ln|V|
DIVERGENCE_FACTOR = 10.0

LOSS_CURVE_COLUMNS = ["step", "ebae_loss", "ebar_loss"]
