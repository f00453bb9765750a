"""
Whitespace word tokenizer with character fallback.

Words are stored with a leading marker ("▁word"). A word missing from the
vocabulary is spelled as the bare marker followed by one token per
character; characters missing too become <unk>. <unk> is the only special token
plain text can encode to; <pad>, <bos>, </s> and <sep> never appear.
"""

from __future__ import annotations

import json
import logging
from collections import Counter
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence

from .config import (
    BOS_TOKEN,
    DEFAULT_MAX_VOCAB,
    EOS_TOKEN,
    PAD_TOKEN,
    SEP_TOKEN,
    SPECIAL_TOKENS,
    UNK_TOKEN,
    WORD_MARKER,
)
from .exceptions import TokenizerError

logger = logging.getLogger(__name__)

TOKENIZER_FORMAT_VERSION = 1


def _words(text: str) -> List[str]:
    return text.replace(WORD_MARKER, " ").split()


class Tokenizer:
    """
    Vocabulary map plus special ids.

    Args:
        tokens: id-ordered token strings; the first entries must be the
            special tokens in SPECIAL_TOKENS order
    """

    def __init__(self, tokens: Sequence[str], metadata: Optional[Dict] = None):
        if tuple(tokens[: len(SPECIAL_TOKENS)]) != SPECIAL_TOKENS:
            raise TokenizerError("tokenizer vocabulary must start with the special tokens")
        if len(set(tokens)) != len(tokens):
            raise TokenizerError("tokenizer vocabulary contains duplicate entries")
        self.id_to_token: List[str] = list(tokens)
        self.vocab: Dict[str, int] = {t: i for i, t in enumerate(self.id_to_token)}
        self.metadata: Dict = dict(metadata or {})

    # ------------------------------------------------------------------
    # Special ids
    # ------------------------------------------------------------------
    @property
    def pad_id(self) -> int:
        return self.vocab[PAD_TOKEN]

    @property
    def bos_id(self) -> int:
        return self.vocab[BOS_TOKEN]

    @property
    def eos_id(self) -> int:
        return self.vocab[EOS_TOKEN]

    @property
    def unk_id(self) -> int:
        return self.vocab[UNK_TOKEN]

    @property
    def sep_id(self) -> int:
        return self.vocab[SEP_TOKEN]

    @property
    def special_ids(self) -> frozenset:
        return frozenset(self.vocab[t] for t in SPECIAL_TOKENS)

    def __len__(self) -> int:
        return len(self.id_to_token)

    @property
    def vocab_size(self) -> int:
        return len(self.id_to_token)

    # ------------------------------------------------------------------
    # Encoding
    # ------------------------------------------------------------------
    def encode(self, text: str) -> List[int]:
        ids: List[int] = []
        for word in _words(text):
            wid = self.vocab.get(WORD_MARKER + word)
            if wid is not None:
                ids.append(wid)
                continue
            ids.append(self.vocab.get(WORD_MARKER, self.unk_id))
            ids.extend(self.vocab.get(ch, self.unk_id) for ch in word)
        return ids

    def decode(self, ids: Iterable[int], skip_special: bool = True) -> str:
        pieces: List[str] = []
        specials = self.special_ids
        for i in ids:
            i = int(i)
            if not 0 <= i < len(self.id_to_token):
                raise TokenizerError(f"token id {i} outside vocabulary of size {len(self)}")
            if i in specials:
                if skip_special and i != self.unk_id:
                    continue
                pieces.append(" " + self.id_to_token[i] + " ")
                continue
            pieces.append(self.id_to_token[i].replace(WORD_MARKER, " "))
        return " ".join("".join(pieces).split())

    def token(self, token_id: int) -> str:
        return self.id_to_token[token_id]

    # ------------------------------------------------------------------
    # Persistence
    # ------------------------------------------------------------------
    def to_dict(self) -> Dict:
        return {
            "format_version": TOKENIZER_FORMAT_VERSION,
            "tokens": self.id_to_token,
            "metadata": self.metadata,
        }

    def save(self, path: "str | Path") -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_dict(), f, ensure_ascii=False, indent=1, sort_keys=True)
            f.write("\n")

    @classmethod
    def load(cls, path: "str | Path") -> "Tokenizer":
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except json.JSONDecodeError as exc:
            raise TokenizerError(f"{path}: not a tokenizer file ({exc})") from exc
        if data.get("format_version") != TOKENIZER_FORMAT_VERSION or "tokens" not in data:
            raise TokenizerError(f"{path}: unsupported tokenizer format")
        return cls(data["tokens"], data.get("metadata"))


def build_tokenizer(
    texts: Iterable[str],
    max_vocab: int = DEFAULT_MAX_VOCAB,
    reserved_words: Sequence[str] = (),
) -> Tokenizer:
    """
    Frequency-ranked word vocabulary with character fallback.

    Budget order: reserved words, then every character seen (most frequent
    first), then words by descending frequency (ties alphabetical). At most
    `max_vocab` entries are added on top of the special tokens.
    """
    if max_vocab < 0:
        raise TokenizerError("max_vocab cannot be negative")
    word_counts: Counter = Counter()
    char_counts: Counter = Counter()
    for text in texts:
        for word in _words(text):
            word_counts[word] += 1
            char_counts.update(word)

    tokens: List[str] = list(SPECIAL_TOKENS)
    seen = set(tokens)

    def _add(tok: str) -> None:
        if len(tokens) - len(SPECIAL_TOKENS) < max_vocab and tok not in seen:
            tokens.append(tok)
            seen.add(tok)

    if word_counts or reserved_words:
        _add(WORD_MARKER)
    for word in reserved_words:
        for w in _words(word):
            _add(WORD_MARKER + w)
    for ch, _ in sorted(char_counts.items(), key=lambda kv: (-kv[1], kv[0])):
        _add(ch)
    for word, _ in sorted(word_counts.items(), key=lambda kv: (-kv[1], kv[0])):
        _add(WORD_MARKER + word)

    logger.info(f"Built tokenizer: {len(tokens)} tokens from {len(word_counts)} distinct words")
    return Tokenizer(tokens, metadata={"max_vocab": max_vocab})
