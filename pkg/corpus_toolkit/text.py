"""
Raw-text helpers: sentence splitting and next-sentence pairing.
"""

import re
from typing import List

from .models import AdaptExample

_SENTENCE_END = re.compile(r"(?<=[.!?])\s+")


def split_sentences(text: str) -> List[str]:
    """Split on sentence-final punctuation followed by whitespace."""
    return [s.strip() for s in _SENTENCE_END.split(text.strip()) if s.strip()]


def pair_sentences(text: str, prefix: str = "s") -> List[AdaptExample]:
    """Pair every sentence with the one that follows it."""
    sentences = split_sentences(text)
    return [
        AdaptExample(id=f"{prefix}{i:06d}", text=sentences[i], next=sentences[i + 1])
        for i in range(len(sentences) - 1)
    ]
