"""
Single and joint prompt construction, segment masks and scheme routing.

Position ids of a joint prompt's NEXT block restart right after the input,
so they coincide with the SELF block's. Together with the mask, which hides
each block from the other, the β embedding of one joint pass sees exactly
the tokens and positions of a separate NEXT pass (and α those of a SELF
pass).
"""

import logging
from typing import Sequence

import numpy as np

from corpus_toolkit.models import Relationship

from .exceptions import EmptyInputError, InvalidPromptError, PromptOverflowError, UnknownRelationshipError
from .models import BLOCK_SEGMENT, JointPrompt, PromptKind, SchemePair, Segment, TokenSeq
from .templates import PromptTemplates

logger = logging.getLogger(__name__)

ROUTING = {
    Relationship.CORRELATION: SchemePair.N2S,
    Relationship.LONG_PARAPHRASE: SchemePair.S2S,
    Relationship.SHORT_PARAPHRASE: SchemePair.N2N,
}


def _truncate(text_ids: Sequence[int], budget: int, what: str) -> tuple:
    if len(text_ids) == 0:
        raise EmptyInputError("input text has no tokens")
    if budget < 1:
        raise PromptOverflowError(f"{what} leaves no room for input tokens")
    if len(text_ids) > budget:
        logger.debug(f"Truncating input from {len(text_ids)} to {budget} tokens")
    return tuple(int(t) for t in text_ids[:budget])


def build_single(
    text_ids: Sequence[int],
    kind: PromptKind,
    templates: PromptTemplates,
    max_seq_len: int,
) -> TokenSeq:
    """
    input ++ block(kind); the anchor is the last index.

    Overlong input is cut from its right tail; the prompt block is never cut.

    Raises:
        EmptyInputError: no input tokens
        PromptOverflowError: the block alone fills max_seq_len
    """
    block = templates.block(kind)
    inp = _truncate(text_ids, max_seq_len - len(block), f"{kind.value} prompt block")
    ids = inp + block
    segments = (Segment.INPUT,) * len(inp) + (BLOCK_SEGMENT[kind],) * len(block)
    return TokenSeq(
        token_ids=ids,
        segments=segments,
        positions=tuple(range(len(ids))),
        anchor=len(ids) - 1,
        kind=kind,
        n_input=len(inp),
    )


def build_joint(
    text_ids: Sequence[int],
    templates: PromptTemplates,
    max_seq_len: int,
) -> JointPrompt:
    """
    input ++ SELF block ++ NEXT block with NEXT positions restarting after input.

    Raises:
        EmptyInputError: no input tokens
        PromptOverflowError: the two blocks alone fill max_seq_len
    """
    self_block = templates.block(PromptKind.SELF)
    next_block = templates.block(PromptKind.NEXT)
    inp = _truncate(text_ids, max_seq_len - len(self_block) - len(next_block), "joint prompt blocks")
    n = len(inp)
    ids = inp + self_block + next_block
    segments = (
        (Segment.INPUT,) * n
        + (Segment.SELF_BLOCK,) * len(self_block)
        + (Segment.NEXT_BLOCK,) * len(next_block)
    )
    positions = tuple(range(n + len(self_block))) + tuple(range(n, n + len(next_block)))
    jp = JointPrompt(
        token_ids=ids,
        segments=segments,
        positions=positions,
        alpha_anchor=n + len(self_block) - 1,
        beta_anchor=len(ids) - 1,
        n_input=n,
    )
    issues = jp.validate()
    if issues:
        raise InvalidPromptError(f"Invalid joint prompt: {', '.join(issues)}")
    return jp


def causal_mask(length: int) -> np.ndarray:
    """Lower-triangular boolean mask."""
    return np.tril(np.ones((length, length), dtype=bool))


def build_mask(prompt) -> np.ndarray:
    """
    Segment mask: mask[i][j] is True when j ≤ i and token j is either input
    or in the same block as token i. The SELF and NEXT blocks never see each
    other; for a single prompt this is the plain causal mask.
    """
    seg = np.array([s.value for s in prompt.segments])
    L = len(seg)
    same = seg[:, None] == seg[None, :]
    is_input = (seg == Segment.INPUT.value)[None, :]
    return causal_mask(L) & (same | is_input)


def route_scheme(relationship) -> SchemePair:
    """
    correlation → N2S, long-paraphrase → S2S, short-paraphrase → N2N.

    Raises:
        UnknownRelationshipError: relationship is not one of the three
    """
    try:
        rel = Relationship.parse(relationship)
    except ValueError as exc:
        raise UnknownRelationshipError(str(exc)) from None
    return ROUTING[rel]


# ---------------------------------------------------------------------------
# Token accounting for the one-pass saving
# ---------------------------------------------------------------------------
def cost_of_joint(n_input: int, templates: PromptTemplates) -> int:
    return n_input + len(templates.block(PromptKind.SELF)) + len(templates.block(PromptKind.NEXT))


def cost_of_two_pass(n_input: int, templates: PromptTemplates) -> int:
    return 2 * n_input + len(templates.block(PromptKind.SELF)) + len(templates.block(PromptKind.NEXT))
