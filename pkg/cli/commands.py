"""
Subcommand handlers.

Each handler takes the parsed arguments and the loaded JSON config, writes
its artifacts plus a manifest into --out, and prints a JSON summary.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from adaptation import AdaptConfig, AdaptRecord, run_adaptation
from corpus_toolkit import (
    Query,
    SynthTaskSpec,
    Tokenizer,
    build_tokenizer,
    gen_synthetic,
    read_adapt_corpus,
    read_documents,
    read_pairs,
    read_queries,
    write_task,
)
from corpus_toolkit.config import DEFAULT_MAX_VOCAB
from corpus_toolkit.io import (
    ADAPT_FILE,
    DOCUMENTS_FILE,
    EVAL_QRELS_FILE,
    EVAL_QUERIES_FILE,
    TRAIN_PAIRS_FILE,
    TRAIN_QRELS_FILE,
)
from embedding_compression import (
    CompressionDescriptor,
    CompressionMethod,
    DistillConfig,
    compress_index,
    compress_query,
    distill_dimred,
)
from eval_metrics import DEFAULT_CUTOFFS, evaluate_run, read_qrels, read_run, write_run
from finetuning import FinetuneConfig, TrainPair, mine_hard_negatives, run_finetune
from lexical_baseline import LexicalReport, eval_pairs, lexical_similarity_report
from prompt_builder import PROMPT_WORDS, PromptTemplates
from retrieval_index import SchemeMismatchError, TextEncoder, load_index, save_index, search_many
from retrieval_index.config import DEFAULT_TOP_K, POOLING_ANCHOR
from transformer_model import ModelConfig, TransformerModel, init_params, load_checkpoint

from .config import (
    CODE_VERSION,
    ADAPT_LOSS_FILE,
    ADAPTED_CHECKPOINT,
    FINETUNE_LOSS_FILE,
    FINETUNED_CHECKPOINT,
    INDEX_FILE,
    LEXICAL_CSV,
    LEXICAL_TXT,
    LEXICAL_NS,
    MANIFEST_FILE,
    METRICS_FILE,
    REPORT_CSV,
    REPORT_TXT,
    RUN_FILE,
    TOKENIZER_FILE,
)
from .exceptions import UsageError
from .manifest import RunManifest
from .settings import resolve

logger = logging.getLogger(__name__)


# ----------------------------------------------------------------------
# Shared helpers
# ----------------------------------------------------------------------
def _out_dir(args) -> Path:
    if not args.out:
        raise UsageError(f"{args.command} needs --out")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _require(args, *names: str) -> None:
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n, None) is None]
    if missing:
        raise UsageError(f"{args.command} needs {', '.join(missing)}")


def _task_file(args, name: str) -> Path:
    _require(args, "task")
    return Path(args.task) / name


def _emit(summary: Dict[str, Any]) -> None:
    print(json.dumps(summary, indent=2, sort_keys=True, default=str))


def _manifest(args, config: Dict[str, Any], seed: Optional[int] = None) -> RunManifest:
    return RunManifest(subcommand=args.command, config=config, seed=seed, code_version=CODE_VERSION)


def _load_tokenizer(args) -> Tokenizer:
    _require(args, "tokenizer")
    return Tokenizer.load(args.tokenizer)


def _model_config(file_config: Dict[str, Any], tokenizer: Tokenizer) -> ModelConfig:
    values = dict(file_config.get("model", {}) or {})
    values.update(
        vocab_size=tokenizer.vocab_size,
        pad_id=tokenizer.pad_id,
        bos_id=tokenizer.bos_id,
        eos_id=tokenizer.eos_id,
    )
    return ModelConfig.from_dict(values)


def _load_model(args, file_config, tokenizer, seed: int) -> Tuple[TransformerModel, Dict[str, Any]]:
    """The --checkpoint model, or a fresh one from the config's model section and the seed."""
    checkpoint = getattr(args, "checkpoint", None)
    if checkpoint is None:
        config = _model_config(file_config, tokenizer)
        logger.info(f"No checkpoint given; initializing a fresh model (seed={seed})")
        return TransformerModel(init_params(config, seed=seed), verbose=args.verbose), {}
    loaded = load_checkpoint(checkpoint)
    if loaded.params.config.vocab_size != tokenizer.vocab_size:
        raise ValueError(
            f"{checkpoint}: vocabulary size {loaded.params.config.vocab_size} does not match "
            f"tokenizer {args.tokenizer} ({tokenizer.vocab_size})"
        )
    return loaded.model(verbose=args.verbose), loaded.metadata


def _resolve_scheme(requested: Optional[str], metadata: Dict[str, Any], source: str) -> str:
    declared = metadata.get("scheme")
    if requested and declared and requested != declared:
        raise SchemeMismatchError(f"{source} was fine-tuned with scheme {declared}, requested {requested}")
    return requested or declared or "n2s"


def _seed(args, file_config: Dict[str, Any]) -> int:
    if args.seed is not None:
        return int(args.seed)
    return int(file_config.get("seed", 0))


# ----------------------------------------------------------------------
# Corpus
# ----------------------------------------------------------------------
def gen_corpus(args, file_config) -> None:
    out = _out_dir(args)
    values = resolve(
        "corpus",
        SynthTaskSpec().to_dict(),
        file_config,
        {
            "relationship": args.relationship,
            "n_docs": args.n_docs,
            "n_queries": args.n_queries,
            "vocab_size": args.vocab_size,
            "seed": args.seed,
        },
    )
    spec = SynthTaskSpec.from_dict(values)
    paths = write_task(gen_synthetic(spec), out)
    manifest = _manifest(args, spec.to_dict(), spec.seed)
    manifest.outputs = {name: p.name for name, p in paths.items()}
    manifest.write(out)
    _emit({"task": str(out), "relationship": spec.relationship.value, "n_docs": spec.n_docs})


def build_tokenizer_cmd(args, file_config) -> None:
    out = _out_dir(args)
    values = resolve("tokenizer", {"max_vocab": DEFAULT_MAX_VOCAB}, file_config, {"max_vocab": args.max_vocab})
    texts: List[str] = [d.text for d in read_documents(_task_file(args, DOCUMENTS_FILE))]
    texts += [f"{r.text} {r.next}" for r in read_adapt_corpus(_task_file(args, ADAPT_FILE))]
    texts += [p.query for p in read_pairs(_task_file(args, TRAIN_PAIRS_FILE))]
    texts += [q.text for q in read_queries(_task_file(args, EVAL_QUERIES_FILE))]
    tokenizer = build_tokenizer(texts, max_vocab=int(values["max_vocab"]), reserved_words=PROMPT_WORDS)
    tokenizer.save(out / TOKENIZER_FILE)

    manifest = _manifest(args, values)
    manifest.add_input("task", args.task)
    manifest.outputs = {"tokenizer": TOKENIZER_FILE}
    manifest.write(out)
    _emit({"tokenizer": str(out / TOKENIZER_FILE), "vocab_size": tokenizer.vocab_size})


# ----------------------------------------------------------------------
# Training
# ----------------------------------------------------------------------
def adapt(args, file_config) -> None:
    out = _out_dir(args)
    seed = _seed(args, file_config)
    tokenizer = _load_tokenizer(args)
    values = resolve(
        "adapt",
        AdaptConfig().to_dict(),
        file_config,
        {"steps": args.steps, "batch_size": args.batch_size, "learning_rate": args.lr, "seed": seed},
    )
    config = AdaptConfig.from_dict(values)
    model, _ = _load_model(args, file_config, tokenizer, seed)
    templates = PromptTemplates.from_tokenizer(tokenizer)
    records = [AdaptRecord.from_example(r, tokenizer) for r in read_adapt_corpus(_task_file(args, ADAPT_FILE))]

    result = run_adaptation(
        config, records, model, templates,
        checkpoint_path=out / ADAPTED_CHECKPOINT,
        loss_curve_path=out / ADAPT_LOSS_FILE,
        verbose=args.verbose,
    )
    manifest = _manifest(args, {"adapt": config.to_dict(), "model": model.config.to_dict()}, seed)
    manifest.add_input("tokenizer", args.tokenizer)
    manifest.add_input("adapt_corpus", _task_file(args, ADAPT_FILE))
    manifest.add_input("checkpoint", args.checkpoint)
    manifest.outputs = {"checkpoint": ADAPTED_CHECKPOINT, "loss_curve": ADAPT_LOSS_FILE}
    manifest.write(out)
    summary = result.summary()
    summary.pop("elapsed_sec", None)
    _emit(summary)


def _training_pairs(args, values, model, tokenizer, templates, scheme) -> List[TrainPair]:
    pairs = [TrainPair.from_example(p, tokenizer) for p in read_pairs(_task_file(args, TRAIN_PAIRS_FILE))]
    source = values.get("negatives", "mined")
    n = int(values["n_hard_negatives"])
    if source == "none" or n == 0:
        return [p.with_negatives(()) for p in pairs]
    if source == "file":
        return [p.with_negatives(p.negatives[:n]) for p in pairs]
    if source != "mined":
        raise UsageError(f"unknown negatives source '{source}' (expected mined, file or none)")
    encoder = TextEncoder(model, tokenizer, scheme=scheme, templates=templates, threads=args.threads)
    judged = read_qrels(_task_file(args, TRAIN_QRELS_FILE))
    documents = read_documents(_task_file(args, DOCUMENTS_FILE))
    return mine_hard_negatives(
        encoder, pairs, documents, int(values["k_window"]), n, judged=judged, seed=int(values["seed"])
    )


def finetune(args, file_config) -> None:
    out = _out_dir(args)
    seed = _seed(args, file_config)
    tokenizer = _load_tokenizer(args)
    model, metadata = _load_model(args, file_config, tokenizer, seed)
    defaults = dict(FinetuneConfig().to_dict(), negatives="mined")
    values = resolve(
        "finetune",
        defaults,
        file_config,
        {
            "scheme": args.scheme,
            "steps": args.steps,
            "batch_size": args.batch_size,
            "learning_rate": args.lr,
            "temperature": args.temperature,
            "n_hard_negatives": args.hard_negatives,
            "k_window": args.k_window,
            "negatives": args.negatives,
            "use_lora": False if args.no_lora else None,
            "lora_rank": args.lora_rank,
            "projection_dim": args.dim,
            "seed": seed,
        },
    )
    values["scheme"] = _resolve_scheme(values.get("scheme"), metadata, str(args.checkpoint))
    config = FinetuneConfig.from_dict(values)
    templates = PromptTemplates.from_tokenizer(tokenizer)
    pairs = _training_pairs(args, values, model, tokenizer, templates, config.scheme_pair)

    result = run_finetune(
        config, pairs, model, templates,
        checkpoint_path=out / FINETUNED_CHECKPOINT,
        loss_curve_path=out / FINETUNE_LOSS_FILE,
        verbose=args.verbose,
    )
    manifest = _manifest(args, {"finetune": values, "model": model.config.to_dict()}, seed)
    manifest.add_input("tokenizer", args.tokenizer)
    manifest.add_input("train_pairs", _task_file(args, TRAIN_PAIRS_FILE))
    manifest.add_input("checkpoint", args.checkpoint)
    manifest.outputs = {"checkpoint": FINETUNED_CHECKPOINT, "loss_curve": FINETUNE_LOSS_FILE}
    manifest.write(out)
    summary = result.summary()
    summary.pop("elapsed_sec", None)
    summary["scheme"] = config.scheme
    _emit(summary)


# ----------------------------------------------------------------------
# Retrieval
# ----------------------------------------------------------------------
def embed(args, file_config) -> None:
    out = _out_dir(args)
    seed = _seed(args, file_config)
    tokenizer = _load_tokenizer(args)
    model, metadata = _load_model(args, file_config, tokenizer, seed)
    scheme = _resolve_scheme(args.scheme, metadata, str(args.checkpoint))
    encoder = TextEncoder(model, tokenizer, scheme=scheme, pooling=args.pooling, threads=args.threads, verbose=args.verbose)
    index = encoder.embed_corpus(read_documents(_task_file(args, DOCUMENTS_FILE)))
    save_index(index, out / INDEX_FILE)

    manifest = _manifest(args, {"scheme": scheme, "pooling": args.pooling}, seed)
    manifest.add_input("tokenizer", args.tokenizer)
    manifest.add_input("documents", _task_file(args, DOCUMENTS_FILE))
    manifest.add_input("checkpoint", args.checkpoint)
    manifest.outputs = {"index": INDEX_FILE}
    manifest.write(out)
    _emit({"index": str(out / INDEX_FILE), "n_docs": len(index), "dim": index.dim, "scheme": scheme})


def search_cmd(args, file_config) -> None:
    out = _out_dir(args)
    _require(args, "index")
    seed = _seed(args, file_config)
    tokenizer = _load_tokenizer(args)
    index = load_index(args.index)
    model, metadata = _load_model(args, file_config, tokenizer, seed)
    scheme = _resolve_scheme(args.scheme or index.metadata.scheme, metadata, str(args.checkpoint))
    encoder = TextEncoder(model, tokenizer, scheme=scheme, pooling=index.metadata.pooling, threads=args.threads)
    encoder.check_index(index)

    queries_path = Path(args.queries) if args.queries else _task_file(args, EVAL_QUERIES_FILE)
    query_vecs = encoder.embed_queries(read_queries(queries_path))
    if index.metadata.compression:
        query_vecs = {qid: compress_query(index, vec) for qid, vec in query_vecs.items()}
    top_k = int(args.top_k or file_config.get("search", {}).get("top_k", DEFAULT_TOP_K))
    run = search_many(index, query_vecs, k=top_k, tag=args.tag)
    write_run(run, out / RUN_FILE)

    config = {"scheme": scheme, "top_k": top_k, "compression": _budget(index.metadata.compression)}
    manifest = _manifest(args, config, seed)
    manifest.add_input("index", args.index)
    manifest.add_input("queries", queries_path)
    manifest.add_input("checkpoint", args.checkpoint)
    manifest.outputs = {"run": RUN_FILE}
    manifest.write(out)
    _emit({"run": str(out / RUN_FILE), "n_queries": len(run), "top_k": top_k})


def _budget(compression: Optional[Dict[str, Any]]) -> Dict[str, Any]:
    """Method and budget of a compression entry, without the projection matrix."""
    if not compression:
        return {"method": "none"}
    return {k: v for k, v in compression.items() if k != "projection"}


def evaluate(args, file_config) -> None:
    _require(args, "run", "qrels")
    run = read_run(args.run)
    qrels = read_qrels(args.qrels)
    metrics = [(name, k) for k in args.k for name in ("mrr", "recall", "ndcg")] if args.k else list(DEFAULT_CUTOFFS)
    report = evaluate_run(run, qrels, metrics)
    print(report.to_text())
    if args.out:
        out = _out_dir(args)
        (out / METRICS_FILE).write_text(report.to_json() + "\n", encoding="utf-8")
        config: Dict[str, Any] = {"metrics": [f"{n}@{k}" for n, k in metrics]}
        run_manifest = Path(args.run).parent / MANIFEST_FILE
        if run_manifest.is_file():
            config["run_config"] = RunManifest.read(run_manifest).config
        manifest = _manifest(args, config)
        manifest.add_input("run", args.run)
        manifest.add_input("qrels", args.qrels)
        manifest.outputs = {"metrics": METRICS_FILE}
        manifest.write(out)


# ----------------------------------------------------------------------
# Diagnostics and compression
# ----------------------------------------------------------------------
def diagnose_lexical(args, file_config) -> None:
    out = _out_dir(args)
    seed = _seed(args, file_config)
    tokenizer = _load_tokenizer(args)
    templates = PromptTemplates.from_tokenizer(tokenizer)

    stages: Dict[str, Tuple[TransformerModel, Dict[str, Any]]] = {}
    if args.initial:
        loaded = load_checkpoint(args.initial)
        stages["initial"] = (loaded.model(), loaded.metadata)
    else:
        stages["initial"] = (TransformerModel(init_params(_model_config(file_config, tokenizer), seed=seed)), {})
    for label, path in (("adapted", args.adapted), ("finetuned", args.finetuned)):
        if path:
            loaded = load_checkpoint(path)
            stages[label] = (loaded.model(), loaded.metadata)
    finetuned_meta = stages["finetuned"][1] if "finetuned" in stages else {}
    scheme = _resolve_scheme(args.scheme, finetuned_meta, str(args.finetuned))
    encoders = {
        label: TextEncoder(model, tokenizer, scheme=scheme, templates=templates, threads=args.threads)
        for label, (model, _) in stages.items()
    }

    documents = read_documents(_task_file(args, DOCUMENTS_FILE))
    queries = read_queries(_task_file(args, EVAL_QUERIES_FILE))
    qrels = read_qrels(_task_file(args, EVAL_QRELS_FILE))
    ns = args.ns or list(file_config.get("lexical", {}).get("ns", LEXICAL_NS))
    report = lexical_similarity_report(encoders, eval_pairs(queries, qrels.judgments, documents), ns)
    report.write_csv(out / LEXICAL_CSV)
    (out / LEXICAL_TXT).write_text(report.to_text() + "\n", encoding="utf-8")
    print(report.to_text())

    manifest = _manifest(args, {"scheme": scheme, "ns": list(ns), "stages": list(stages)}, seed)
    for label, path in (("initial", args.initial), ("adapted", args.adapted), ("finetuned", args.finetuned)):
        manifest.add_input(label, path)
    manifest.add_input("tokenizer", args.tokenizer)
    manifest.outputs = {"csv": LEXICAL_CSV, "text": LEXICAL_TXT}
    manifest.write(out)


def compress(args, file_config) -> None:
    out = _out_dir(args)
    _require(args, "index", "method")
    seed = _seed(args, file_config)
    index = load_index(args.index)
    method = CompressionMethod.parse(args.method)

    if method is CompressionMethod.SPARSE:
        _require(args, "sparse_n")
        descriptor = CompressionDescriptor(method, n_keep=args.sparse_n)
    elif method is CompressionMethod.DIMRED:
        _require(args, "checkpoint")
        projection = load_checkpoint(args.checkpoint).metadata.get("projection")
        if projection is None:
            raise ValueError(f"{args.checkpoint}: no projection head (fine-tune with --dim)")
        descriptor = CompressionDescriptor(method, projection=np.asarray(projection, dtype=np.float32))
        if args.dim is not None and descriptor.dim != args.dim:
            raise ValueError(f"{args.checkpoint}: projection has dim {descriptor.dim}, requested {args.dim}")
    elif method is CompressionMethod.DIMRED_STAR:
        _require(args, "dim")
        tokenizer = _load_tokenizer(args)
        model, _ = _load_model(args, file_config, tokenizer, seed)
        encoder = TextEncoder(model, tokenizer, scheme=index.metadata.scheme or "n2s",
                              pooling=index.metadata.pooling, threads=args.threads)
        encoder.check_index(index)
        queries = [Query(p.query_id, p.query) for p in read_pairs(_task_file(args, TRAIN_PAIRS_FILE))]
        query_vecs = encoder.embed_queries(queries)
        values = resolve("distill", {}, file_config, {"dim": args.dim, "seed": seed})
        config = DistillConfig(**{k: v for k, v in values.items() if k in DistillConfig.__dataclass_fields__})
        query_matrix = np.vstack([query_vecs[q.query_id] for q in queries])
        result = distill_dimred(query_matrix, index.vectors, config, verbose=args.verbose)
        descriptor = result.descriptor
    else:
        raise UsageError("compress needs --method sparse, dimred or dimred_star")

    compressed = compress_index(index, descriptor)
    save_index(compressed, out / INDEX_FILE)
    budget = _budget(descriptor.to_dict())
    manifest = _manifest(args, budget, seed)
    manifest.add_input("index", args.index)
    manifest.add_input("checkpoint", args.checkpoint)
    manifest.outputs = {"index": INDEX_FILE}
    manifest.write(out)
    _emit({"index": str(out / INDEX_FILE), "dim": compressed.dim, **budget})


def report(args, file_config) -> None:
    """Collect metrics (and lexical tables) from run directories into comparison tables."""
    out = _out_dir(args)
    _require(args, "inputs")
    rows = []
    lexical_texts = []
    for directory in (Path(d) for d in args.inputs):
        metrics_path = directory / METRICS_FILE
        if metrics_path.is_file():
            metrics = json.loads(metrics_path.read_text(encoding="utf-8"))["metrics"]
            budget = {"method": "none"}
            if (directory / MANIFEST_FILE).is_file():
                run_config = RunManifest.read(directory).config.get("run_config", {})
                budget = run_config.get("compression", budget)
            budget_value = budget.get("n_keep") or budget.get("dim")
            rows.append({"label": directory.name, "method": budget["method"], "budget": budget_value, **metrics})
        lexical_path = directory / LEXICAL_CSV
        if lexical_path.is_file():
            lexical_texts.append(LexicalReport.read_csv(lexical_path).to_text())
    if not rows and not lexical_texts:
        raise ValueError(f"no {METRICS_FILE} or {LEXICAL_CSV} found under {list(args.inputs)}")

    frame = pd.DataFrame(rows)
    if rows:
        frame["budget"] = frame["budget"].astype("Int64")
        frame = frame.sort_values(["method", "budget", "label"], na_position="first", kind="mergesort")
        frame.to_csv(out / REPORT_CSV, index=False, float_format="%.17g")
    text = []
    if rows:
        text.append(frame.to_string(index=False, float_format=lambda v: f"{v:.4f}"))
    text.extend(lexical_texts)
    (out / REPORT_TXT).write_text("\n\n".join(text) + "\n", encoding="utf-8")
    print("\n\n".join(text))

    manifest = _manifest(args, {"inputs": [Path(d).name for d in args.inputs]})
    manifest.outputs = {"csv": REPORT_CSV, "text": REPORT_TXT} if rows else {"text": REPORT_TXT}
    manifest.write(out)
