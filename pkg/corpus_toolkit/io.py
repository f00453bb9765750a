"""
Dataset files: JSON lines for records, TREC qrels for judgments.

Every writer emits keys in a fixed order with `ensure_ascii=False`, so the
same records always produce the same bytes.
"""

import json
import logging
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, TypeVar

from eval_metrics.trec_io import write_qrels

from .exceptions import MalformedRecordError
from .models import AdaptExample, Document, PairExample, Query, SynthTask

logger = logging.getLogger(__name__)

T = TypeVar("T")

# File names inside a task directory
DOCUMENTS_FILE = "documents.jsonl"
ADAPT_FILE = "adapt.jsonl"
TRAIN_PAIRS_FILE = "train_pairs.jsonl"
TRAIN_QRELS_FILE = "train_qrels.tsv"
EVAL_QUERIES_FILE = "eval_queries.jsonl"
EVAL_QRELS_FILE = "eval_qrels.tsv"
TASK_FILE = "task.json"


def write_jsonl(records: Iterable[Any], path: "str | Path") -> int:
    """Write records (objects with to_dict or plain dicts); returns the count."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with open(path, "w", encoding="utf-8") as f:
        for rec in records:
            obj = rec.to_dict() if hasattr(rec, "to_dict") else rec
            f.write(json.dumps(obj, ensure_ascii=False) + "\n")
            count += 1
    return count


def read_jsonl(path: "str | Path", parse: Callable[[Dict[str, Any]], T]) -> List[T]:
    out: List[T] = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                out.append(parse(json.loads(line)))
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise MalformedRecordError(f"{path}:{lineno}: {type(exc).__name__}: {exc}") from exc
    return out


def _adapt(obj: Dict[str, Any]) -> AdaptExample:
    return AdaptExample(id=str(obj["id"]), text=obj["text"], next=obj["next"])


def _document(obj: Dict[str, Any]) -> Document:
    return Document(doc_id=str(obj["id"]), text=obj["text"])


def _query(obj: Dict[str, Any]) -> Query:
    return Query(query_id=str(obj["id"]), text=obj["text"])


def _pair(obj: Dict[str, Any]) -> PairExample:
    negatives = [{"id": str(n["id"]), "text": n["text"]} for n in obj.get("negatives", [])]
    return PairExample(
        query_id=str(obj["query_id"]),
        query=obj["query"],
        positive_id=str(obj["positive_id"]),
        positive=obj["positive"],
        negatives=negatives,
    )


def read_adapt_corpus(path: "str | Path") -> List[AdaptExample]:
    return read_jsonl(path, _adapt)


def read_documents(path: "str | Path") -> List[Document]:
    return read_jsonl(path, _document)


def read_queries(path: "str | Path") -> List[Query]:
    return read_jsonl(path, _query)


def read_pairs(path: "str | Path") -> List[PairExample]:
    return read_jsonl(path, _pair)


def write_task(task: SynthTask, out_dir: "str | Path") -> Dict[str, Path]:
    """Write every file of a generated task; returns name → path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "documents": out / DOCUMENTS_FILE,
        "adapt": out / ADAPT_FILE,
        "train_pairs": out / TRAIN_PAIRS_FILE,
        "train_qrels": out / TRAIN_QRELS_FILE,
        "eval_queries": out / EVAL_QUERIES_FILE,
        "eval_qrels": out / EVAL_QRELS_FILE,
        "task": out / TASK_FILE,
    }
    write_jsonl(task.documents, paths["documents"])
    write_jsonl(task.adapt_corpus, paths["adapt"])
    write_jsonl(task.train_pairs, paths["train_pairs"])
    write_qrels(task.train_qrels, paths["train_qrels"])
    write_jsonl(task.eval_queries, paths["eval_queries"])
    write_qrels(task.eval_qrels, paths["eval_qrels"])
    with open(paths["task"], "w", encoding="utf-8") as f:
        json.dump({"spec": task.spec.to_dict(), "metadata": task.metadata or {}}, f, indent=2, sort_keys=True)
        f.write("\n")
    logger.info(f"Wrote synthetic task to {out}")
    return paths
