"""
File:           ablation.py
Author:         xlembed developers
Created on:     14/10/26, 4:30 pm
"""
from typing import Sequence
from pathlib import Path

import pandas as pd

from src.pipeline.models import PipelineConfig
from src.pipeline.runner import PipelineRunner
from src.utils.enums import LossKind, PoolingKind
from src.utils.logger import LogFacade


logger = LogFacade.get_logger("pipeline")


def _summary_row(runner: PipelineRunner, report) -> dict:
    row = {"r_at_1": report.r_at_1, f"r_at_{report.k}": report.r_at_k, "wer": report.wer}
    if runner.train_result is not None and runner.train_result.losses:
        row["final_loss"] = runner.train_result.losses[-1]
    return row


def run_loss_pooling_grid(config: PipelineConfig) -> pd.DataFrame:
    """ Train and score one head per (loss, pooling) pair, each in its own output sub-directory """
    rows = []
    for loss_kind in LossKind:
        for pooling_kind in PoolingKind:
            name = f"{loss_kind.value}_{pooling_kind.value}"
            train = config.train.copy(update={"loss_kind": loss_kind, "pooling_kind": pooling_kind})
            variant = config.copy(update={"train": train, "output_dir": str(Path(config.output_dir) / name)})
            runner = PipelineRunner(variant)
            report = runner.run()
            logger.info(f"{name}: R@1 {report.r_at_1:.2f}")
            rows.append({"loss": loss_kind.value, "pooling": pooling_kind.value, **_summary_row(runner, report)})
    return pd.DataFrame(rows)


def run_alpha_sweep(config: PipelineConfig, alphas: Sequence[float]) -> pd.DataFrame:
    """ One run per smoothing value; the per-language breakdown average is reported next to the totals """
    rows = []
    for alpha in alphas:
        rebalance = config.rebalance.copy(update={"alpha": float(alpha)})
        variant = config.copy(update={
            "rebalance": rebalance, "output_dir": str(Path(config.output_dir) / f"alpha_{alpha:g}"),
        })
        runner = PipelineRunner(variant)
        report = runner.run()
        average = runner.breakdown[runner.breakdown["lang"] == "avg"].iloc[0]
        logger.info(f"alpha {alpha:g}: R@1 {report.r_at_1:.2f}, language average {average['r_at_1']:.2f}")
        rows.append({"alpha": float(alpha), **_summary_row(runner, report), "lang_avg_r_at_1": average["r_at_1"]})
    return pd.DataFrame(rows)


def save_summary(df: pd.DataFrame, path: Path) -> None:
    df.to_csv(path, index=False, float_format="%.6f", lineterminator="\n")
