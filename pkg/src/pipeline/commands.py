"""
File:           commands.py
Author:         xlembed developers
Created on:     15/10/26, 10:00 am

Handlers behind the main.py sub-commands. Each takes the parsed argparse namespace and returns
the process exit code.
"""
from typing import Dict, List
from argparse import Namespace
from pathlib import Path
import sys

import numpy as np

from src.distillation.models import TrainingExample, load_feature_dir, load_feature_sequence
from src.distillation.params_io import save_head_params
from src.distillation.trainer import train
from src.embedding.matrix import normalize_rows
from src.embedding.store import load_embeddings, save_embeddings
from src.evaluation.report import evaluate
from src.pipeline.ablation import run_loss_pooling_grid, run_alpha_sweep, save_summary
from src.pipeline.config_reader import ConfigReader
from src.pipeline.models import PipelineConfig, SyntheticSpec, parse_config, read_train_config
from src.pipeline.runner import PipelineRunner
from src.pipeline.synthetic import generate_synthetic, write_synthetic_corpus
from src.rebalance.constant import AlphaGrid
from src.rebalance.sampler import (
    LanguageStats, compute_ratios, apply_rebalance, draw_training_subset, read_corpus_tsv, write_ids_tsv
)
from src.retrieval.result_io import write_retrieval_tsv, read_retrieval_tsv, read_truth_tsv, read_refs_tsv
from src.retrieval.similarity import retrieve
from src.segmentation.segmenter import propose_boundaries
from src.utils.exception import ValidationError, ParameterError
from src.utils.logger import LogFacade


logger = LogFacade.get_logger("main")


def _seed(args: Namespace, default: int = 0) -> int:
    return default if args.seed is None else args.seed


def retrieve_command(args: Namespace) -> int:
    Q = normalize_rows(load_embeddings(Path(args.query)))
    S = normalize_rows(load_embeddings(Path(args.search)))
    result = retrieve(Q, S, args.k, block_size=args.block_size, threads=args.threads)
    write_retrieval_tsv(result, Q, S, Path(args.out))
    logger.info(f"Wrote {result.n_queries} x {result.k} ranked results to {args.out}")
    return 0


def eval_command(args: Namespace) -> int:
    ranked = read_retrieval_tsv(Path(args.result))
    truth = read_truth_tsv(Path(args.truth))
    refs = read_refs_tsv(Path(args.refs)) if args.refs else None
    # Search ids only need to be comparable, so number them in order of appearance
    search_index: Dict[str, int] = {}
    topk: List[List[int]] = []
    u: List[int] = []
    hypotheses: List[str] = []
    references: List[str] = []
    for query_id, search_ids in ranked.items():
        if query_id not in truth:
            raise ValidationError(f"Query '{query_id}' has no ground truth entry")
        if len(search_ids) < args.k:
            raise ValidationError(f"Query '{query_id}' has {len(search_ids)} ranked results, k is {args.k}")
        topk.append([search_index.setdefault(x, len(search_index)) for x in search_ids[:args.k]])
        u.append(search_index.setdefault(truth[query_id], len(search_index)))
        if refs is not None:
            for search_id in (search_ids[0], truth[query_id]):
                if search_id not in refs:
                    raise ValidationError(f"Search item '{search_id}' has no reference sentence")
            hypotheses.append(refs[search_ids[0]])
            references.append(refs[truth[query_id]])
    report = evaluate(
        np.asarray(topk, dtype=np.int64).reshape(len(topk), args.k), u, args.k,
        hypotheses if refs is not None else None,
        references if refs is not None else None,
        casefold=args.casefold,
        search_size=len(search_index),
    )
    if args.json:
        report.save(Path(args.json))
    sys.stdout.write(report.to_json() + "\n")
    return 0


def rebalance_command(args: Namespace) -> int:
    stats = LanguageStats.from_tsv(Path(args.stats))
    plan = compute_ratios(stats, args.alpha, _seed(args))
    if args.corpus is None:
        table = plan.table().to_csv(sep="\t", index=False, float_format="%.6f", lineterminator="\n")
        sys.stdout.write(table)
        if args.out:
            Path(args.out).write_text(table, encoding="utf-8")
        return 0
    if not args.out:
        raise ParameterError("rebalance --corpus needs --out")
    corpus = read_corpus_tsv(Path(args.corpus))
    ids = apply_rebalance(corpus, plan)
    if args.sample_size is not None:
        ids = draw_training_subset(ids, args.sample_size, _seed(args))
    lang_of = {x: lang for lang, items in corpus.items() for x in items}
    write_ids_tsv(ids, lang_of, Path(args.out))
    logger.info(f"Wrote {len(ids)} re-balanced ids to {args.out}")
    return 0


def train_head_command(args: Namespace) -> int:
    cfg = read_train_config(Path(args.config))
    if args.seed is not None:
        cfg = cfg.copy(update={"seed": args.seed})
    sequences = load_feature_dir(Path(args.features))
    targets = load_embeddings(Path(args.targets))
    index = targets.index_of()
    rows = targets.as_float64()
    dataset = []
    for seq in sequences:
        if seq.id not in index:
            raise ValidationError(f"Feature sequence '{seq.id}' has no target embedding")
        dataset.append(TrainingExample(features=seq, target=rows[index[seq.id]]))
    result = train(dataset, cfg)
    out = Path(args.out)
    save_head_params(result.params, out)
    loss_curve = Path(args.loss_curve) if args.loss_curve else out.with_name(out.name + ".loss.csv")
    result.save_loss_curve(loss_curve)
    return 0


def segment_command(args: Namespace) -> int:
    proposal = propose_boundaries(load_feature_sequence(Path(args.features)), args.threshold, args.min_sep)
    proposal.save(Path(args.out))
    logger.info(f"Wrote {proposal.peaks.size} boundaries to {args.out}")
    return 0


def synth_command(args: Namespace) -> int:
    reader = ConfigReader(Path(args.config))
    values = reader.get("synthetic") if "synthetic" in reader else reader.as_dict()
    spec = parse_config(SyntheticSpec, values, args.config)
    if args.seed is not None:
        spec = spec.copy(update={"seed": args.seed})
    write_synthetic_corpus(generate_synthetic(spec), Path(args.out))
    return 0


def _pipeline_config(args: Namespace) -> PipelineConfig:
    """ Apply the command line overrides to a pipeline config """
    cfg = PipelineConfig.from_file(Path(args.config))
    update = {}
    if getattr(args, "out", None):
        update["output_dir"] = str(Path(args.out).resolve())
    if args.threads is not None:
        update["retrieval"] = cfg.retrieval.copy(update={"threads": args.threads})
    if args.seed is not None:
        update["train"] = cfg.train.copy(update={"seed": args.seed})
        update["rebalance"] = cfg.rebalance.copy(update={"seed": args.seed})
        if cfg.synthetic is not None:
            update["synthetic"] = cfg.synthetic.copy(update={"seed": args.seed})
    return cfg.copy(update=update)


def pipeline_command(args: Namespace) -> int:
    report = PipelineRunner(_pipeline_config(args)).run()
    sys.stdout.write(report.to_json() + "\n")
    return 0


def sweep_command(args: Namespace) -> int:
    cfg = _pipeline_config(args)
    if args.grid == "alpha":
        alphas = args.alphas or list(AlphaGrid.ABLATION)
        summary = run_alpha_sweep(cfg, alphas)
    else:
        summary = run_loss_pooling_grid(cfg)
    summary_path = Path(args.summary) if args.summary else Path(cfg.output_dir) / f"sweep_{args.grid}.csv"
    save_summary(summary, summary_path)
    logger.info(f"Wrote sweep summary to {summary_path}")
    return 0


def normalize_command(args: Namespace) -> int:
    m = normalize_rows(load_embeddings(Path(args.input)))
    save_embeddings(m, Path(args.out))
    logger.info(f"Normalized {m.count} rows into {args.out}")
    return 0
