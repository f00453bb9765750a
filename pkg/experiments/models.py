"""
Data models for end-to-end experiments.
"""

import dataclasses
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

from adaptation.models import AdaptConfig, AdaptRecord, AdaptResult
from corpus_toolkit.config import DEFAULT_MAX_VOCAB
from corpus_toolkit.models import SynthTask, SynthTaskSpec
from corpus_toolkit.tokenizer import Tokenizer
from eval_metrics.metrics import DEFAULT_CUTOFFS
from eval_metrics.models import EvaluationReport
from finetuning.models import FinetuneConfig, FinetuneResult, TrainPair
from prompt_builder.templates import PromptTemplates
from retrieval_index.encoder import TextEncoder
from retrieval_index.models import DenseIndex
from transformer_model.model import TransformerModel
from transformer_model.models import ModelConfig

from .config import (
    DESK_ADAPT,
    DESK_FINETUNE,
    DESK_MODEL,
    DESK_TASK,
    PRIMARY_METRIC,
    QUICK_ADAPT,
    QUICK_FINETUNE,
    QUICK_MODEL,
    QUICK_TASK,
)


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one pipeline run depends on"""
    task: SynthTaskSpec = field(default_factory=SynthTaskSpec)
    model: Dict[str, Any] = field(default_factory=dict)   # ModelConfig overrides; vocab comes from the tokenizer
    adapt: AdaptConfig = field(default_factory=AdaptConfig)
    finetune: FinetuneConfig = field(default_factory=FinetuneConfig)
    max_vocab: int = DEFAULT_MAX_VOCAB
    seed: int = 0                                          # model initialization
    metrics: Tuple[Tuple[str, int], ...] = DEFAULT_CUTOFFS
    threads: Optional[int] = None

    @classmethod
    def desk(cls, **overrides) -> "ExperimentConfig":
        """Toy-scale setting of the long acceptance experiments."""
        config = cls(
            task=SynthTaskSpec(**DESK_TASK),
            model=dict(DESK_MODEL),
            adapt=AdaptConfig(**DESK_ADAPT),
            finetune=FinetuneConfig(**DESK_FINETUNE),
        )
        return dataclasses.replace(config, **overrides)

    @classmethod
    def quick(cls, **overrides) -> "ExperimentConfig":
        """Micro setting that finishes in seconds."""
        config = cls(
            task=SynthTaskSpec(**QUICK_TASK),
            model=dict(QUICK_MODEL),
            adapt=AdaptConfig(**QUICK_ADAPT),
            finetune=FinetuneConfig(**QUICK_FINETUNE),
            metrics=(("mrr", 10), ("recall", 10), ("ndcg", 10)),
        )
        return dataclasses.replace(config, **overrides)

    def with_seed(self, seed: int) -> "ExperimentConfig":
        """Same task, new seed for initialization, adaptation batches and fine-tuning."""
        return dataclasses.replace(
            self,
            seed=seed,
            adapt=dataclasses.replace(self.adapt, seed=seed),
            finetune=dataclasses.replace(self.finetune, seed=seed),
        )

    def with_scheme(self, scheme: str) -> "ExperimentConfig":
        return dataclasses.replace(self, finetune=dataclasses.replace(self.finetune, scheme=scheme))

    def model_config(self, tokenizer: Tokenizer) -> ModelConfig:
        values = dict(self.model)
        values.update(
            vocab_size=tokenizer.vocab_size,
            pad_id=tokenizer.pad_id,
            bos_id=tokenizer.bos_id,
            eos_id=tokenizer.eos_id,
        )
        return ModelConfig.from_dict(values)

    def validate(self) -> List[str]:
        """Validate configuration and return list of issues"""
        issues = []
        issues.extend(f"task: {i}" for i in self.task.validate())
        issues.extend(f"adapt: {i}" for i in self.adapt.validate())
        issues.extend(f"finetune: {i}" for i in self.finetune.validate())
        unknown = set(self.model) - set(ModelConfig.__dataclass_fields__)
        if unknown:
            issues.append(f"model: unknown fields {sorted(unknown)}")
        if self.max_vocab < 1:
            issues.append("max_vocab must be positive")
        if not self.metrics:
            issues.append("at least one metric is required")
        return issues

    def to_dict(self) -> Dict[str, Any]:
        return {
            "task": self.task.to_dict(),
            "model": dict(self.model),
            "adapt": self.adapt.to_dict(),
            "finetune": self.finetune.to_dict(),
            "max_vocab": self.max_vocab,
            "seed": self.seed,
            "metrics": [f"{name}@{k}" for name, k in self.metrics],
        }


@dataclass
class Workspace:
    """A generated task with its tokenizer; shared across runs of one comparison"""
    task: SynthTask
    tokenizer: Tokenizer
    templates: PromptTemplates

    def adapt_records(self) -> List[AdaptRecord]:
        return [AdaptRecord.from_example(r, self.tokenizer) for r in self.task.adapt_corpus]

    def train_pairs(self) -> List[TrainPair]:
        return [TrainPair.from_example(p, self.tokenizer) for p in self.task.train_pairs]


@dataclass
class PipelineResult:
    """Models, index and metrics of one initialize → adapt → fine-tune → evaluate run"""
    config: ExperimentConfig
    report: EvaluationReport
    initial: TransformerModel
    start: TransformerModel            # fine-tuning start point (adapted or initial), untouched
    finetuned: TransformerModel
    encoder: TextEncoder
    index: DenseIndex
    pairs: Sequence[TrainPair]         # with the negatives fine-tuning used
    adapt_result: Optional[AdaptResult] = None
    finetune_result: Optional[FinetuneResult] = None

    @property
    def adapted(self) -> bool:
        return self.adapt_result is not None

    def metric(self, label: str = PRIMARY_METRIC) -> float:
        return self.report[label]

    def summary(self) -> Dict[str, Any]:
        return {
            "adapted": self.adapted,
            "seed": self.config.seed,
            "scheme": self.config.finetune.scheme,
            **{r.label: r.value for r in self.report.results},
        }
