"""
Data models for the lexical diagnostic.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import pandas as pd

REPORT_NOTE = (
    "mean BM25(v_q, v_a) over evaluation pairs; idf and average length computed over the "
    "projected answer-token pseudo-documents; N is capped at |V|"
)

_HEADER_KEYS = ("note", "n_pairs", "vocab_size")


@dataclass(frozen=True)
class VocabProjection:
    """Top-N vocabulary tokens predicted from one embedding"""
    kind: str
    token_ids: Tuple[int, ...]
    n: int

    def validate(self, vocab_size: Optional[int] = None) -> List[str]:
        issues = []
        if len(set(self.token_ids)) != len(self.token_ids):
            issues.append("token ids are not distinct")
        if vocab_size is not None and len(self.token_ids) != min(self.n, vocab_size):
            issues.append(f"{len(self.token_ids)} tokens for N={self.n}, |V|={vocab_size}")
        return issues


@dataclass
class LexicalReport:
    """Mean lexical similarity per N, one column per checkpoint stage"""
    ns: List[int]
    columns: Dict[str, List[float]] = field(default_factory=dict)
    n_pairs: int = 0
    vocab_size: int = 0
    note: str = REPORT_NOTE

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame({"N": self.ns})
        for label, values in self.columns.items():
            frame[label] = values
        return frame

    def write_csv(self, path) -> None:
        """
        CSV `N,<stage>...` preceded by `# key: value` comment lines carrying
        the note, pair count and vocabulary size.
        """
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(f"# note: {self.note}\n")
            fh.write(f"# n_pairs: {self.n_pairs}\n")
            fh.write(f"# vocab_size: {self.vocab_size}\n")
            self.to_frame().to_csv(fh, index=False, float_format="%.17g")

    @classmethod
    def read_csv(cls, path) -> "LexicalReport":
        header: Dict[str, str] = {}
        with open(path, "r", encoding="utf-8") as fh:
            n_comments = 0
            for line in fh:
                if not line.startswith("#"):
                    break
                n_comments += 1
                key, sep, value = line[1:].strip().partition(": ")
                if sep and key in _HEADER_KEYS:
                    header[key] = value
                else:
                    header["note"] = line[1:].strip()
        frame = pd.read_csv(path, skiprows=n_comments, float_precision="round_trip")
        columns = {c: [float(v) for v in frame[c]] for c in frame.columns if c != "N"}
        return cls(
            ns=[int(n) for n in frame["N"]],
            columns=columns,
            n_pairs=int(header.get("n_pairs", 0)),
            vocab_size=int(header.get("vocab_size", 0)),
            note=header.get("note", REPORT_NOTE),
        )

    def to_text(self) -> str:
        lines = [f"Lexical similarity ({self.n_pairs} pairs, |V|={self.vocab_size})", self.note, ""]
        lines.append(self.to_frame().to_string(index=False, float_format=lambda v: f"{v:.2f}"))
        return "\n".join(lines)
