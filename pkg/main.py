"""
File:           main.py
Author:         xlembed developers
Created on:     15/10/26, 11:30 am
"""
from typing import List, Optional
import sys
import logging
import argparse

from src.pipeline import commands
from src.rebalance.constant import AlphaGrid
from src.segmentation.segmenter import DEFAULT_THRESHOLD, DEFAULT_MIN_SEPARATION
from src.utils import UINT64_MAX
from src.utils.exception import XLEmbError
from src.utils.logger import LogFacade


logger = LogFacade.get_logger("main")

IO_ERROR_EXIT_CODE = 3


def seed_type(value: str) -> int:
    seed = int(value)
    if not 0 <= seed <= UINT64_MAX:
        raise argparse.ArgumentTypeError(f"{value} is not an unsigned 64-bit seed")
    return seed


def positive_int(value: str) -> int:
    number = int(value)
    if number < 1:
        raise argparse.ArgumentTypeError(f"{value} must be a positive integer")
    return number


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="xlembed", description="Cross-lingual embedding mining toolkit")
    parser.add_argument("--seed", type=seed_type, default=None, help="Seed for every seeded step")
    parser.add_argument("--threads", type=positive_int, default=None, help="Retrieval worker threads")
    parser.add_argument("--quiet", action="store_true", help="Only print warnings and errors")
    # Global flags may also follow the sub-command; SUPPRESS keeps the value given before it
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=seed_type, default=argparse.SUPPRESS)
    common.add_argument("--threads", type=positive_int, default=argparse.SUPPRESS)
    common.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS)
    subparsers = parser.add_subparsers(dest="command", required=True)

    retrieve = subparsers.add_parser("retrieve", parents=[common], help="Top k cosine retrieval")
    retrieve.add_argument("--query", type=str, required=True, help="Query embedding file")
    retrieve.add_argument("--search", type=str, required=True, help="Search embedding file")
    retrieve.add_argument("-k", type=positive_int, default=10)
    retrieve.add_argument("--block-size", type=positive_int, default=None)
    retrieve.add_argument("--out", type=str, required=True, help="Output TSV")
    retrieve.set_defaults(handler=commands.retrieve_command)

    evaluate = subparsers.add_parser("eval", parents=[common], help="R@1, R@k and WER of a retrieval TSV")
    evaluate.add_argument("--result", type=str, required=True)
    evaluate.add_argument("--truth", type=str, required=True, help="query id <tab> search id")
    evaluate.add_argument("--refs", type=str, default=None, help="search id <tab> sentence")
    evaluate.add_argument("-k", type=positive_int, default=10)
    evaluate.add_argument("--json", type=str, default=None, help="Report path")
    evaluate.add_argument("--no-casefold", dest="casefold", action="store_false")
    evaluate.set_defaults(handler=commands.eval_command)

    rebalance = subparsers.add_parser("rebalance", parents=[common], help="Language re-balancing ratios")
    rebalance.add_argument("--stats", type=str, required=True, help="lang <tab> count")
    rebalance.add_argument("--alpha", type=float, default=AlphaGrid.DEFAULT)
    rebalance.add_argument("--corpus", type=str, default=None, help="id <tab> lang")
    rebalance.add_argument("--sample-size", type=positive_int, default=None)
    rebalance.add_argument("--out", type=str, default=None)
    rebalance.set_defaults(handler=commands.rebalance_command)

    train_head = subparsers.add_parser("train-head", parents=[common], help="Train the pooling + projection head")
    train_head.add_argument("--features", type=str, required=True, help="Directory of feature files")
    train_head.add_argument("--targets", type=str, required=True, help="Target embedding file")
    train_head.add_argument("--config", type=str, required=True, help="JSON training config")
    train_head.add_argument("--out", type=str, required=True, help="Head parameter file")
    train_head.add_argument("--loss-curve", type=str, default=None, help="CSV of iter, lr, loss")
    train_head.set_defaults(handler=commands.train_head_command)

    segment = subparsers.add_parser("segment", parents=[common], help="Propose word boundaries of a feature sequence")
    segment.add_argument("--features", type=str, required=True, help="Feature file")
    segment.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    segment.add_argument("--min-sep", type=positive_int, default=DEFAULT_MIN_SEPARATION)
    segment.add_argument("--out", type=str, required=True)
    segment.set_defaults(handler=commands.segment_command)

    synth = subparsers.add_parser("synth", parents=[common], help="Write a synthetic corpus")
    synth.add_argument("--config", type=str, required=True, help="JSON synthetic spec")
    synth.add_argument("--out", type=str, required=True, help="Output directory")
    synth.set_defaults(handler=commands.synth_command)

    pipeline = subparsers.add_parser("pipeline", parents=[common], help="Train, embed, retrieve and score")
    pipeline.add_argument("--config", type=str, required=True)
    pipeline.add_argument("--out", type=str, default=None, help="Overrides output_dir")
    pipeline.set_defaults(handler=commands.pipeline_command)

    sweep = subparsers.add_parser("sweep", parents=[common], help="Run the pipeline over an ablation grid")
    sweep.add_argument("--config", type=str, required=True)
    sweep.add_argument("--grid", choices=["loss-pooling", "alpha"], default="loss-pooling")
    sweep.add_argument("--alphas", type=float, nargs="+", default=None)
    sweep.add_argument("--out", type=str, default=None, help="Overrides output_dir")
    sweep.add_argument("--summary", type=str, default=None, help="Summary CSV path")
    sweep.set_defaults(handler=commands.sweep_command)

    normalize = subparsers.add_parser("normalize", parents=[common], help="L2 normalize an embedding file")
    normalize.add_argument("--input", type=str, required=True)
    normalize.add_argument("--out", type=str, required=True)
    normalize.set_defaults(handler=commands.normalize_command)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.quiet:
        LogFacade.set_stream_level(logging.WARNING)
    try:
        return args.handler(args)
    except XLEmbError as err:
        logger.error(f"{args.command}: {err}")
        return err.exit_code
    except OSError as err:
        logger.error(f"{args.command}: {err}")
        return IO_ERROR_EXIT_CODE


if __name__ == "__main__":
    sys.exit(main())
