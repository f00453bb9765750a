"""
Text → embedding facade over a model, tokenizer and prompt scheme.

Texts are encoded one prompt at a time, so a text's vector never depends
on batch size or thread count. Worker threads enter no_grad themselves
(graph recording is a per-thread switch).
"""

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, Optional, Sequence

import numpy as np

from corpus_toolkit.models import Document, Query
from numerics.tensor import no_grad
from prompt_builder.builder import build_single
from prompt_builder.models import PromptKind, SchemePair
from prompt_builder.templates import PromptTemplates
from transformer_model.model import TransformerModel

from .config import DEFAULT_THREADS, EMBED_BATCH_SIZE, POOLING_ANCHOR, POOLING_MEAN, THREADS_ENV
from .exceptions import DuplicateDocumentIdError, EmptyCorpusError, SchemeMismatchError
from .models import DenseIndex, IndexMetadata


def resolve_threads(threads: Optional[int] = None) -> int:
    """Explicit value, else EBADAPT_THREADS, else 1."""
    if threads is None:
        threads = int(os.environ.get(THREADS_ENV, DEFAULT_THREADS))
    return max(1, int(threads))


class TextEncoder:
    """
    Embeds texts with the prompt kinds of a declared scheme.

    Args:
        model: transformer (with or without adapters)
        tokenizer: corpus tokenizer
        scheme: (query kind, doc kind) pair used for every embedding
        templates: prompt blocks; built from the tokenizer when omitted
        pooling: "anchor" (prompted anchor token) or "mean" (PLAIN prompt,
            mean over the input rows)
        threads: forward-pass workers (None reads EBADAPT_THREADS)
    """

    def __init__(
        self,
        model: TransformerModel,
        tokenizer,
        scheme: SchemePair = SchemePair.N2S,
        templates: Optional[PromptTemplates] = None,
        seq_len: Optional[int] = None,
        pooling: str = POOLING_ANCHOR,
        threads: Optional[int] = None,
        verbose: bool = False,
    ):
        if pooling not in (POOLING_ANCHOR, POOLING_MEAN):
            raise ValueError(f"unknown pooling '{pooling}' (expected anchor or mean)")
        self.model = model
        self.tokenizer = tokenizer
        self.scheme = SchemePair.parse(scheme)
        self.templates = templates or PromptTemplates.from_tokenizer(tokenizer)
        self.seq_len = min(seq_len or model.config.max_seq_len, model.config.max_seq_len)
        self.pooling = pooling
        self.threads = resolve_threads(threads)

        self.logger = logging.getLogger(__name__)
        if verbose:
            self.logger.setLevel(logging.DEBUG)
        self.logger.debug(f"TextEncoder: scheme={self.scheme.value}, pooling={pooling}, threads={self.threads}")

    # ------------------------------------------------------------------
    # Single texts
    # ------------------------------------------------------------------
    def kind_for(self, role: str) -> PromptKind:
        if self.pooling == POOLING_MEAN:
            return PromptKind.PLAIN
        return self.scheme.kind_for(role)

    def check_kind(self, role: str, kind: PromptKind) -> None:
        """
        Raises:
            SchemeMismatchError: `kind` is not the scheme's kind for `role`
        """
        expected = self.kind_for(role)
        if PromptKind.parse(kind) is not expected:
            raise SchemeMismatchError(
                f"{role} embeddings use {expected.value} under scheme {self.scheme.value}, "
                f"got {PromptKind.parse(kind).value}"
            )

    def embed_ids(self, token_ids: Sequence[int], kind: PromptKind) -> np.ndarray:
        """Forward-only embedding of one token sequence, shape [d]."""
        with no_grad():
            if self.pooling == POOLING_MEAN:
                seq = build_single(token_ids, PromptKind.PLAIN, self.templates, self.seq_len)
                hidden = self.model.encode(seq)
                emb = self.model.mean_pool(hidden, seq.n_input, PromptKind.PLAIN)
            else:
                emb = self.model.embed(build_single(token_ids, kind, self.templates, self.seq_len))
        return emb.numpy()

    def embed_texts(self, texts: Sequence[str], kind: PromptKind, batch_size: int = EMBED_BATCH_SIZE) -> np.ndarray:
        """Embeddings [n × d] in input order."""
        kind = PromptKind.parse(kind)
        ids = [self.tokenizer.encode(t) for t in texts]
        out = np.zeros((len(ids), self.model.config.d_model), dtype=np.float32)
        for lo in range(0, len(ids), max(1, batch_size)):
            chunk = ids[lo:lo + batch_size]
            if self.threads > 1:
                with ThreadPoolExecutor(max_workers=self.threads) as executor:
                    vectors = list(executor.map(lambda t: self.embed_ids(t, kind), chunk))
            else:
                vectors = [self.embed_ids(t, kind) for t in chunk]
            for offset, vec in enumerate(vectors):
                out[lo + offset] = vec
            self.logger.debug(f"Embedded {min(lo + batch_size, len(ids))}/{len(ids)} texts")
        return out

    # ------------------------------------------------------------------
    # Collections
    # ------------------------------------------------------------------
    def adapter_checksum(self) -> Optional[str]:
        lora = self.model.lora
        return lora.checksum() if lora is not None and lora.active else None

    def metadata(self, kind: PromptKind) -> IndexMetadata:
        return IndexMetadata(
            kind=kind.value,
            dim=self.model.config.d_model,
            scheme=self.scheme.value,
            model_checksum=self.model.checksum(),
            adapter_checksum=self.adapter_checksum(),
            pooling=self.pooling,
        )

    def embed_corpus(
        self,
        docs: Sequence[Document],
        kind: Optional[PromptKind] = None,
        batch_size: int = EMBED_BATCH_SIZE,
    ) -> DenseIndex:
        """
        Embed documents with the scheme's document kind.

        Raises:
            EmptyCorpusError: no documents
            DuplicateDocumentIdError: two documents share an id
            SchemeMismatchError: `kind` disagrees with the scheme's doc kind
        """
        if not docs:
            raise EmptyCorpusError("no documents to embed")
        if kind is not None:
            self.check_kind("doc", kind)
        kind = self.kind_for("doc")
        ids = [d.doc_id for d in docs]
        if len(set(ids)) != len(ids):
            raise DuplicateDocumentIdError("document ids are not unique")

        self.logger.info(f"Embedding {len(docs)} documents ({kind.value} prompt)")
        vectors = self.embed_texts([d.text for d in docs], kind, batch_size)
        return DenseIndex(doc_ids=ids, vectors=vectors, metadata=self.metadata(kind))

    def embed_queries(
        self,
        queries: Sequence[Query],
        kind: Optional[PromptKind] = None,
        batch_size: int = EMBED_BATCH_SIZE,
    ) -> Dict[str, np.ndarray]:
        """query id → vector, with the scheme's query kind."""
        if kind is not None:
            self.check_kind("query", kind)
        kind = self.kind_for("query")
        vectors = self.embed_texts([q.text for q in queries], kind, batch_size)
        return {q.query_id: vectors[i] for i, q in enumerate(queries)}

    def check_index(self, index: DenseIndex) -> None:
        """
        Raises:
            SchemeMismatchError: the index was built under another scheme,
                pooling or model
        """
        meta = index.metadata
        if meta.scheme is not None and meta.scheme != self.scheme.value:
            raise SchemeMismatchError(f"index built with scheme {meta.scheme}, encoder uses {self.scheme.value}")
        if meta.pooling != self.pooling:
            raise SchemeMismatchError(f"index built with {meta.pooling} pooling, encoder uses {self.pooling}")
        if meta.model_checksum and meta.model_checksum != self.model.checksum():
            raise SchemeMismatchError("index was built by a different model checkpoint")
        if meta.model_checksum and meta.adapter_checksum != self.adapter_checksum():
            raise SchemeMismatchError("index was built with different LoRA adapters")


def mean_pool_encoder(model: TransformerModel, tokenizer, **kwargs) -> TextEncoder:
    """Unadapted pooling baseline: PLAIN prompt, mean over the input rows."""
    return TextEncoder(model, tokenizer, scheme=SchemePair.NONE, pooling=POOLING_MEAN, **kwargs)

