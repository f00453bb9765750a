# Distillation of a projection head (full-batch gradient descent)
DISTILL_STEPS = 200
DISTILL_LEARNING_RATE = 0.5
BACKTRACK_FACTOR = 0.5     # step shrink after a rejected update
GROWTH_FACTOR = 1.5        # step growth after an accepted update
MIN_STEP = 1e-10
SAMPLE_QUERIES = 256
SAMPLE_DOCS = 1024
DISTILL_INIT = "pca"       # "pca" or "identity"
DISTILL_SEED = 0
