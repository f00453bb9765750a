# Seeds for multi-seed comparisons
SEEDS = (0, 1, 2)

# Desk-scale setting (original: 7B model, MS MARCO passages, 10k adaptation steps)
DESK_TASK = {"vocab_size": 400, "n_docs": 150, "n_queries": 150, "seed": 13}
DESK_MODEL = {"n_layers": 4, "n_heads": 4, "d_model": 64, "d_ff": 256, "max_seq_len": 96}
DESK_ADAPT = {"steps": 2000, "batch_size": 8, "learning_rate": 1e-3}
DESK_FINETUNE = {"steps": 1000, "batch_size": 16, "learning_rate": 1e-3, "use_lora": False, "n_hard_negatives": 1, "k_window": 20}

# Micro setting for smoke runs
QUICK_TASK = {"vocab_size": 120, "n_docs": 24, "n_queries": 24, "seed": 5}
QUICK_MODEL = {"n_layers": 1, "n_heads": 2, "d_model": 16, "d_ff": 32, "max_seq_len": 64}
QUICK_ADAPT = {"steps": 3, "batch_size": 4, "learning_rate": 1e-3}
QUICK_FINETUNE = {"steps": 3, "batch_size": 4, "learning_rate": 1e-3, "n_hard_negatives": 1, "k_window": 5}

# Thresholds
MRR_THRESHOLD = 0.8
MONOTONE_TOLERANCE = 0.02

# Compression budgets as fractions of d (original schedule: 768 → 4096 of 4096)
BUDGET_FRACTIONS = (0.125, 0.25, 0.5, 1.0)

PRIMARY_METRIC = "mrr@10"
