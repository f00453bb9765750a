"""
EBAdapt Lab - prompt_builder

SELF/NEXT prompts, the one-pass joint prompt with its segment mask, and
prompt-scheme routing per task relationship.
"""

from corpus_toolkit.models import Relationship

from .builder import (
    ROUTING,
    build_joint,
    build_mask,
    build_single,
    causal_mask,
    cost_of_joint,
    cost_of_two_pass,
    route_scheme,
)
from .exceptions import (
    EmptyInputError,
    InvalidPromptError,
    PromptBuilderError,
    PromptOverflowError,
    UnknownRelationshipError,
)
from .models import (
    NEXT_PROMPT_TEXT,
    SELF_PROMPT_TEXT,
    JointPrompt,
    PromptKind,
    SchemePair,
    Segment,
    TokenSeq,
)
from .templates import PromptTemplates

PROMPT_WORDS = (SELF_PROMPT_TEXT, NEXT_PROMPT_TEXT)

__all__ = [
    # Types
    "PromptKind",
    "SchemePair",
    "Segment",
    "TokenSeq",
    "JointPrompt",
    "PromptTemplates",
    "Relationship",
    "SELF_PROMPT_TEXT",
    "NEXT_PROMPT_TEXT",
    "PROMPT_WORDS",

    # Operations
    "build_single",
    "build_joint",
    "build_mask",
    "causal_mask",
    "route_scheme",
    "ROUTING",
    "cost_of_joint",
    "cost_of_two_pass",

    # Exceptions
    "PromptBuilderError",
    "EmptyInputError",
    "PromptOverflowError",
    "UnknownRelationshipError",
    "InvalidPromptError",
]

__version__ = "1.0.0"
