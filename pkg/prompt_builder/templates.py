"""
Token blocks appended after the input text.

    PLAIN: </s>
    SELF:  <sep> The input sentence is: </s>
    NEXT:  <sep> The next sentence is: </s>

The separator stands for the space between input and prompt; the prompt
wording is tokenized once per tokenizer and cached on it.
"""

from dataclasses import dataclass
from typing import Dict, Tuple

from .models import PromptKind


@dataclass(frozen=True)
class PromptTemplates:
    sep_id: int
    eos_id: int
    self_ids: Tuple[int, ...]
    next_ids: Tuple[int, ...]

    @classmethod
    def from_tokenizer(cls, tokenizer) -> "PromptTemplates":
        cached = getattr(tokenizer, "_prompt_templates", None)
        if cached is None:
            cached = cls(
                sep_id=tokenizer.sep_id,
                eos_id=tokenizer.eos_id,
                self_ids=tuple(tokenizer.encode(PromptKind.SELF.prompt_text)),
                next_ids=tuple(tokenizer.encode(PromptKind.NEXT.prompt_text)),
            )
            tokenizer._prompt_templates = cached
        return cached

    def block(self, kind: PromptKind) -> Tuple[int, ...]:
        if kind is PromptKind.PLAIN:
            return (self.eos_id,)
        ids = self.self_ids if kind is PromptKind.SELF else self.next_ids
        return (self.sep_id,) + ids + (self.eos_id,)

    def metadata(self) -> Dict:
        """Prompt token ids for run manifests and checkpoints."""
        return {
            "separator": "sep_token",
            "sep_id": self.sep_id,
            "anchor_id": self.eos_id,
            "self_prompt": {"text": PromptKind.SELF.prompt_text, "ids": list(self.self_ids)},
            "next_prompt": {"text": PromptKind.NEXT.prompt_text, "ids": list(self.next_ids)},
        }
