"""
ebadapt command-line entry point.

    ebadapt gen-corpus --relationship correlation --out task/
    ebadapt build-tokenizer --task task/ --out tok/
    ebadapt adapt --task task/ --tokenizer tok/tokenizer.json --out adapted/
    ebadapt finetune --task task/ --tokenizer tok/tokenizer.json --checkpoint adapted/adapted.ckpt --out ft/
    ebadapt embed / search / eval / diagnose-lexical / compress / report

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
"""

import argparse
import logging
import sys
from typing import List, Optional

from corpus_toolkit import Relationship
from retrieval_index.config import POOLING_ANCHOR, POOLING_MEAN

from . import commands
from .config import (
    COMPRESSION_METHODS,
    EXIT_DATA,
    EXIT_NUMERIC,
    EXIT_OK,
    EXIT_USAGE,
    NEGATIVE_SOURCES,
    SCHEMES,
)
from .exceptions import UsageError
from .settings import configure_logging, load_config, load_environment

logger = logging.getLogger(__name__)


class ArgumentParser(argparse.ArgumentParser):
    """Raises UsageError instead of exiting, so main() owns the exit code."""

    def error(self, message: str):
        raise UsageError(message)


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file (sections per subcommand)")
    parser.add_argument("--seed", type=int, help="random seed")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--threads", type=int, help="forward-pass worker threads (EBADAPT_THREADS)")
    parser.add_argument("--verbose", "-v", action="store_true", help="debug logging")


def _model_inputs(parser: argparse.ArgumentParser, checkpoint_help: str) -> None:
    parser.add_argument("--task", help="task directory written by gen-corpus")
    parser.add_argument("--tokenizer", help="tokenizer.json")
    parser.add_argument("--checkpoint", help=checkpoint_help)


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(prog="ebadapt", description="Embedding adaptation lab for decoder-only language models")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=ArgumentParser)
    sub.required = True

    p = sub.add_parser("gen-corpus", help="generate a synthetic retrieval task")
    _common(p)
    p.add_argument("--relationship", choices=[r.value for r in Relationship], help="query/document relationship of the task")
    p.add_argument("--n-docs", type=int)
    p.add_argument("--n-queries", type=int)
    p.add_argument("--vocab-size", type=int)
    p.set_defaults(handler=commands.gen_corpus)

    p = sub.add_parser("build-tokenizer", help="build the tokenizer over a task's texts")
    _common(p)
    p.add_argument("--task", help="task directory written by gen-corpus")
    p.add_argument("--max-vocab", type=int)
    p.set_defaults(handler=commands.build_tokenizer_cmd)

    p = sub.add_parser("adapt", help="EBAE/EBAR embedding adaptation")
    _common(p)
    _model_inputs(p, "starting checkpoint (fresh initialization when omitted)")
    p.add_argument("--steps", type=int)
    p.add_argument("--batch-size", type=int)
    p.add_argument("--lr", type=float)
    p.set_defaults(handler=commands.adapt)

    p = sub.add_parser("finetune", help="contrastive fine-tuning")
    _common(p)
    _model_inputs(p, "starting checkpoint, usually the adapted one")
    p.add_argument("--scheme", choices=SCHEMES)
    p.add_argument("--steps", type=int)
    p.add_argument("--batch-size", type=int)
    p.add_argument("--lr", type=float)
    p.add_argument("--temperature", type=float)
    p.add_argument("--hard-negatives", type=int, help="hard negatives per query")
    p.add_argument("--k-window", type=int, help="mine negatives from ranks 2..k")
    p.add_argument("--negatives", choices=NEGATIVE_SOURCES, help="where hard negatives come from")
    p.add_argument("--no-lora", action="store_true", help="train all base weights instead of adapters")
    p.add_argument("--lora-rank", type=int)
    p.add_argument("--dim", type=int, help="train a d x dim projection head jointly (DimRed)")
    p.set_defaults(handler=commands.finetune)

    p = sub.add_parser("embed", help="embed the corpus into a dense index")
    _common(p)
    _model_inputs(p, "model checkpoint (fresh initialization when omitted)")
    p.add_argument("--scheme", choices=SCHEMES)
    p.add_argument("--pooling", choices=(POOLING_ANCHOR, POOLING_MEAN), default=POOLING_ANCHOR)
    p.set_defaults(handler=commands.embed)

    p = sub.add_parser("search", help="rank the index for every evaluation query")
    _common(p)
    _model_inputs(p, "checkpoint the index was built with")
    p.add_argument("--index", help="index.bin")
    p.add_argument("--queries", help="queries JSONL (default: the task's eval queries)")
    p.add_argument("--scheme", choices=SCHEMES)
    p.add_argument("--top-k", type=int)
    p.add_argument("--tag", default="ebadapt", help="TREC run tag")
    p.set_defaults(handler=commands.search_cmd)

    p = sub.add_parser("eval", help="MRR/Recall/NDCG of a run")
    _common(p)
    p.add_argument("--run", help="TREC run file")
    p.add_argument("--qrels", help="TREC qrels file")
    p.add_argument("--k", type=int, nargs="+", help="cutoffs (default: mrr@10 recall@100 ndcg@10 ...)")
    p.set_defaults(handler=commands.evaluate)

    p = sub.add_parser("diagnose-lexical", help="BM25 similarity of vocabulary projections")
    _common(p)
    p.add_argument("--task", help="task directory written by gen-corpus")
    p.add_argument("--tokenizer", help="tokenizer.json")
    p.add_argument("--initial", help="initial checkpoint (fresh initialization when omitted)")
    p.add_argument("--adapted", help="adapted checkpoint")
    p.add_argument("--finetuned", help="fine-tuned checkpoint")
    p.add_argument("--scheme", choices=SCHEMES)
    p.add_argument("--ns", type=int, nargs="+", help="projection sizes N")
    p.set_defaults(handler=commands.diagnose_lexical)

    p = sub.add_parser("compress", help="compress an index (sparse, dimred, dimred_star)")
    _common(p)
    _model_inputs(p, "checkpoint holding the projection (dimred) or the frozen encoder (dimred_star)")
    p.add_argument("--index", help="index.bin")
    p.add_argument("--method", choices=COMPRESSION_METHODS)
    p.add_argument("--sparse-n", type=int, help="components kept per vector")
    p.add_argument("--dim", type=int, help="projected dimension")
    p.set_defaults(handler=commands.compress)

    p = sub.add_parser("report", help="comparison tables over evaluated runs")
    _common(p)
    p.add_argument("--inputs", nargs="+", help="directories holding metrics.json and/or lexical.csv")
    p.set_defaults(handler=commands.report)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    load_environment()
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"ebadapt: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    configure_logging(args.verbose)

    try:
        args.handler(args, load_config(args.config))
    except UsageError as exc:
        print(f"ebadapt {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ArithmeticError as exc:
        logger.error(f"{args.command}: numerical failure: {exc}")
        return EXIT_NUMERIC
    except (ValueError, OSError, KeyError) as exc:
        logger.error(f"{args.command}: {exc}")
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
