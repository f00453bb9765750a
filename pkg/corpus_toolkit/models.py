"""
Data models for the corpus toolkit.

Text-level records as they appear in the dataset files. Token-level views
(AdaptRecord, TrainPair) are built from these by the trainers.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional


class Relationship(Enum):
    """How a query relates to its relevant document"""
    CORRELATION = "correlation"            # question -> answer
    LONG_PARAPHRASE = "long-paraphrase"    # document -> reworded document
    SHORT_PARAPHRASE = "short-paraphrase"  # short text -> reworded short text

    @classmethod
    def parse(cls, value: "str | Relationship") -> "Relationship":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            known = ", ".join(r.value for r in cls)
            raise ValueError(f"unknown relationship '{value}' (expected one of: {known})") from None


@dataclass(frozen=True)
class AdaptExample:
    """One (sentence, next sentence) pair of the adaptation corpus"""
    id: str
    text: str
    next: str

    def to_dict(self) -> Dict[str, Any]:
        return {"id": self.id, "text": self.text, "next": self.next}


@dataclass(frozen=True)
class Document:
    doc_id: str
    text: str

    def to_dict(self) -> Dict[str, Any]:
        return {"id": self.doc_id, "text": self.text}


@dataclass(frozen=True)
class Query:
    query_id: str
    text: str

    def to_dict(self) -> Dict[str, Any]:
        return {"id": self.query_id, "text": self.text}


@dataclass
class PairExample:
    """A fine-tuning pair with optional hard negatives (doc id, text)"""
    query_id: str
    query: str
    positive_id: str
    positive: str
    negatives: List[Dict[str, str]] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "query_id": self.query_id,
            "query": self.query,
            "positive_id": self.positive_id,
            "positive": self.positive,
            "negatives": [{"id": n["id"], "text": n["text"]} for n in self.negatives],
        }


@dataclass
class SynthTaskSpec:
    """
    Parameters of a synthetic retrieval task.

    Every document carries a unique pair of key words; its query repeats
    that pair, so relevance is unambiguous by construction. Neighbouring
    documents share one key word each, which makes them partial-overlap
    distractors.
    """
    relationship: Relationship = Relationship.CORRELATION
    vocab_size: int = 600
    n_docs: int = 200
    n_queries: int = 200
    eval_fraction: float = 0.25
    n_attributes: int = 8
    n_filler: int = 6
    seed: int = 13

    def validate(self) -> List[str]:
        """Validate the spec and return list of issues"""
        issues = []

        if self.n_docs < 3:
            issues.append("n_docs must be at least 3")

        if not 1 <= self.n_queries <= self.n_docs:
            issues.append("n_queries must be between 1 and n_docs")

        if not 0.0 < self.eval_fraction < 1.0:
            issues.append("eval_fraction must be strictly between 0 and 1")

        if self.n_attributes < 1:
            issues.append("n_attributes must be positive")

        if self.n_filler < 0:
            issues.append("n_filler cannot be negative")

        # keys + attributes with synonyms + at least 8 values and 8 fillers
        needed = self.n_docs + 2 * self.n_attributes + 16
        if self.vocab_size < needed:
            issues.append(f"vocab_size {self.vocab_size} too small, need at least {needed}")

        return issues

    def to_dict(self) -> Dict[str, Any]:
        return {
            "relationship": self.relationship.value,
            "vocab_size": self.vocab_size,
            "n_docs": self.n_docs,
            "n_queries": self.n_queries,
            "eval_fraction": self.eval_fraction,
            "n_attributes": self.n_attributes,
            "n_filler": self.n_filler,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SynthTaskSpec":
        kwargs = dict(data)
        if "relationship" in kwargs:
            kwargs["relationship"] = Relationship.parse(kwargs["relationship"])
        known = set(cls.__dataclass_fields__)
        return cls(**{k: v for k, v in kwargs.items() if k in known})


@dataclass
class SynthTask:
    """Everything a synthetic task generates"""
    spec: SynthTaskSpec
    documents: List[Document]
    adapt_corpus: List[AdaptExample]
    train_pairs: List[PairExample]
    train_qrels: Dict[str, Dict[str, int]]
    eval_queries: List[Query]
    eval_qrels: Dict[str, Dict[str, int]]
    metadata: Optional[Dict[str, Any]] = None
