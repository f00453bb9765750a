"""
Data models for prompt construction.
"""

from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Tuple

# Prompt wording, verbatim
SELF_PROMPT_TEXT = "The input sentence is:"
NEXT_PROMPT_TEXT = "The next sentence is:"


class PromptKind(Enum):
    """Which prompt precedes the anchor token"""
    SELF = "self"    # embedding summarizes the input itself
    NEXT = "next"    # embedding anticipates the following text
    PLAIN = "plain"  # no prompt, anchor directly after the input

    @property
    def prompt_text(self) -> Optional[str]:
        return {PromptKind.SELF: SELF_PROMPT_TEXT, PromptKind.NEXT: NEXT_PROMPT_TEXT}.get(self)

    @classmethod
    def parse(cls, value: "str | PromptKind") -> "PromptKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ValueError(f"unknown prompt kind '{value}' (expected self, next or plain)") from None


class Segment(Enum):
    """Segment label of a prompt token"""
    INPUT = "input"
    SELF_BLOCK = "self_block"
    NEXT_BLOCK = "next_block"
    PLAIN_BLOCK = "plain_block"


BLOCK_SEGMENT = {
    PromptKind.SELF: Segment.SELF_BLOCK,
    PromptKind.NEXT: Segment.NEXT_BLOCK,
    PromptKind.PLAIN: Segment.PLAIN_BLOCK,
}


class SchemePair(Enum):
    """Prompt kinds for the (query, document) roles"""
    N2S = "n2s"
    S2S = "s2s"
    N2N = "n2n"
    NONE = "none"

    @property
    def query_kind(self) -> PromptKind:
        return _SCHEME_KINDS[self][0]

    @property
    def doc_kind(self) -> PromptKind:
        return _SCHEME_KINDS[self][1]

    def kind_for(self, role: str) -> PromptKind:
        if role == "query":
            return self.query_kind
        if role in ("doc", "document"):
            return self.doc_kind
        raise ValueError(f"unknown role '{role}' (expected query or doc)")

    @classmethod
    def parse(cls, value: "str | SchemePair") -> "SchemePair":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ValueError(f"unknown prompt scheme '{value}' (expected n2s, s2s, n2n or none)") from None


_SCHEME_KINDS = {
    SchemePair.N2S: (PromptKind.NEXT, PromptKind.SELF),
    SchemePair.S2S: (PromptKind.SELF, PromptKind.SELF),
    SchemePair.N2N: (PromptKind.NEXT, PromptKind.NEXT),
    SchemePair.NONE: (PromptKind.PLAIN, PromptKind.PLAIN),
}


@dataclass(frozen=True)
class TokenSeq:
    """
    A single prompted sequence: input ++ block, with the anchor at the end.
    """
    token_ids: Tuple[int, ...]
    segments: Tuple[Segment, ...]
    positions: Tuple[int, ...]
    anchor: int
    kind: PromptKind
    n_input: int

    def __len__(self) -> int:
        return len(self.token_ids)


@dataclass(frozen=True)
class JointPrompt:
    """
    INPUT ++ SELF_BLOCK ++ NEXT_BLOCK in one sequence. Both blocks end with
    the anchor token; NEXT_BLOCK positions restart right after INPUT.
    """
    token_ids: Tuple[int, ...]
    segments: Tuple[Segment, ...]
    positions: Tuple[int, ...]
    alpha_anchor: int
    beta_anchor: int
    n_input: int

    def __len__(self) -> int:
        return len(self.token_ids)

    def anchor(self, kind: PromptKind) -> int:
        if kind is PromptKind.SELF:
            return self.alpha_anchor
        if kind is PromptKind.NEXT:
            return self.beta_anchor
        raise ValueError("a joint prompt has SELF and NEXT anchors only")

    def validate(self) -> List[str]:
        """Check the layout invariants and return list of issues"""
        issues = []
        L = len(self.token_ids)

        if len(self.segments) != L or len(self.positions) != L:
            issues.append("token, segment and position lists differ in length")
            return issues

        if not 0 < self.n_input <= self.alpha_anchor < self.beta_anchor == L - 1:
            issues.append("anchors must satisfy n_input ≤ alpha_anchor < beta_anchor = L-1")
            return issues

        expected = (
            [Segment.INPUT] * self.n_input
            + [Segment.SELF_BLOCK] * (self.alpha_anchor + 1 - self.n_input)
            + [Segment.NEXT_BLOCK] * (L - self.alpha_anchor - 1)
        )
        if list(self.segments) != expected:
            issues.append("segments are not INPUT ++ SELF_BLOCK ++ NEXT_BLOCK")

        next_start = self.alpha_anchor + 1
        if self.positions[next_start] != self.n_input:
            issues.append("NEXT_BLOCK positions must restart after the last INPUT position")

        if self.token_ids[self.alpha_anchor] != self.token_ids[self.beta_anchor]:
            issues.append("both blocks must end with the same anchor token")

        return issues
