"""
Data models for ranking evaluation.
"""

import json
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Sequence, Tuple

Ranking = List[Tuple[str, float]]


@dataclass
class Qrels:
    """Graded relevance judgments: query id → doc id → relevance (≥ 0)"""
    judgments: Dict[str, Dict[str, int]] = field(default_factory=dict)

    def __contains__(self, query_id: str) -> bool:
        return query_id in self.judgments

    def __getitem__(self, query_id: str) -> Dict[str, int]:
        return self.judgments[query_id]

    def __len__(self) -> int:
        return len(self.judgments)

    def relevant(self, query_id: str) -> Dict[str, int]:
        """Docs with relevance > 0 for a query."""
        return {d: r for d, r in self.judgments.get(query_id, {}).items() if r > 0}

    def validate(self) -> List[str]:
        issues = []
        for qid, docs in self.judgments.items():
            for doc_id, rel in docs.items():
                if rel < 0:
                    issues.append(f"negative relevance for ({qid}, {doc_id})")
        return issues

    @classmethod
    def coerce(cls, value: "Qrels | Mapping[str, Mapping[str, int]]") -> "Qrels":
        if isinstance(value, cls):
            return value
        return cls({q: {d: int(r) for d, r in docs.items()} for q, docs in value.items()})


@dataclass
class RunFile:
    """Per-query ranked (doc id, score) lists"""
    rankings: Dict[str, Ranking] = field(default_factory=dict)
    tag: str = "ebadapt"

    def __contains__(self, query_id: str) -> bool:
        return query_id in self.rankings

    def __len__(self) -> int:
        return len(self.rankings)

    def query_ids(self) -> List[str]:
        return sorted(self.rankings)

    def validate(self) -> List[str]:
        """Scores descending with ascending doc-id tie-break; no duplicate docs."""
        issues = []
        for qid in sorted(self.rankings):
            ranking = self.rankings[qid]
            docs = [d for d, _ in ranking]
            if len(set(docs)) != len(docs):
                issues.append(f"query {qid}: duplicate documents in ranking")
            for (d1, s1), (d2, s2) in zip(ranking, ranking[1:]):
                if s1 < s2 or (s1 == s2 and d1 > d2):
                    issues.append(f"query {qid}: {d1} ({s1}) ranked above {d2} ({s2})")
                    break
        return issues

    @classmethod
    def coerce(cls, value: "RunFile | Mapping[str, Sequence[Tuple[str, float]]]") -> "RunFile":
        if isinstance(value, cls):
            return value
        return cls({q: [(str(d), float(s)) for d, s in r] for q, r in value.items()})


@dataclass
class MetricResult:
    """One metric at one cutoff, averaged over evaluated queries"""
    name: str
    k: int
    value: float
    n_evaluated: int
    excluded: List[str] = field(default_factory=list)
    per_query: Dict[str, float] = field(default_factory=dict)

    @property
    def label(self) -> str:
        return f"{self.name}@{self.k}"

    def __str__(self) -> str:
        return f"{self.label}={self.value:.6f}"


@dataclass
class EvaluationReport:
    """All requested metrics for one run"""
    results: List[MetricResult]
    n_queries_in_run: int
    excluded: List[str] = field(default_factory=list)

    def __getitem__(self, label: str) -> float:
        for r in self.results:
            if r.label == label:
                return r.value
        raise KeyError(label)

    def to_dict(self) -> Dict:
        return {
            "metrics": {r.label: r.value for r in self.results},
            "n_queries_in_run": self.n_queries_in_run,
            "n_evaluated": self.results[0].n_evaluated if self.results else 0,
            "excluded_queries": list(self.excluded),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_text(self) -> str:
        lines = [str(r) for r in self.results]
        if self.excluded:
            lines.append(f"# {len(self.excluded)} run queries without judgments were excluded")
        return "\n".join(lines)
