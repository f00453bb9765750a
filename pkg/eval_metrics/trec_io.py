"""
TREC interchange formats.

Qrels: `qid 0 docid rel` per line.
Run:   `qid Q0 docid rank score tag` per line.

Parsing goes through ir_measures. Rankings are rebuilt from the score
column (descending, ascending doc id on ties), so the rank column is
informational. Scores are written with repr(), which round-trips a float
exactly.
"""

from pathlib import Path
from typing import Dict, List, Tuple

import ir_measures

from .exceptions import InvalidRunError, MalformedTrecFileError
from .models import Qrels, RunFile


def _open(path: "str | Path"):
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"{path} does not exist")
    return open(path, "r", encoding="utf-8")


def read_qrels(path: "str | Path") -> Qrels:
    judgments: Dict[str, Dict[str, int]] = {}
    with _open(path) as f:
        try:
            rows = list(ir_measures.read_trec_qrels(f))
        except (ValueError, IndexError) as exc:
            raise MalformedTrecFileError(f"{path}: {exc}") from None
    for row in rows:
        if row.relevance < 0:
            raise MalformedTrecFileError(f"{path}: negative relevance for ({row.query_id}, {row.doc_id})")
        docs = judgments.setdefault(row.query_id, {})
        if row.doc_id in docs:
            raise MalformedTrecFileError(f"{path}: duplicate judgment ({row.query_id}, {row.doc_id})")
        docs[row.doc_id] = int(row.relevance)
    return Qrels(judgments)


def write_qrels(qrels, path: "str | Path") -> None:
    qrels = Qrels.coerce(qrels)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        for qid in sorted(qrels.judgments):
            for doc_id in sorted(qrels.judgments[qid]):
                f.write(f"{qid} 0 {doc_id} {qrels.judgments[qid][doc_id]}\n")


def _run_tag(path: "str | Path") -> str:
    with _open(path) as f:
        for line in f:
            parts = line.split()
            if len(parts) == 6:
                return parts[5]
    return "ebadapt"


def read_run(path: "str | Path") -> RunFile:
    rows: Dict[str, List[Tuple[str, float]]] = {}
    with _open(path) as f:
        try:
            for scored in ir_measures.read_trec_run(f):
                rows.setdefault(scored.query_id, []).append((scored.doc_id, float(scored.score)))
        except (ValueError, IndexError) as exc:
            raise MalformedTrecFileError(f"{path}: {exc}") from None
    rankings = {q: sorted(r, key=lambda item: (-item[1], item[0])) for q, r in rows.items()}
    run = RunFile(rankings, tag=_run_tag(path))
    issues = run.validate()
    if issues:
        raise InvalidRunError(f"{path}: {issues[0]}")
    return run


def write_run(run, path: "str | Path", tag: str = None) -> None:
    run = RunFile.coerce(run)
    tag = tag or run.tag
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        for qid in run.query_ids():
            for rank, (doc_id, score) in enumerate(run.rankings[qid], start=1):
                f.write(f"{qid} Q0 {doc_id} {rank} {float(score)!r} {tag}\n")
