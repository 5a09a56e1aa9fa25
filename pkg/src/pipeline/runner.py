"""
File:           runner.py
Author:         xlembed developers
Created on:     14/10/26, 2:10 pm

End to end flow: data -> (re-balance) -> head -> embed queries -> retrieve -> score.
"""
from typing import Dict, List, Optional, Tuple
from contextlib import contextmanager
from pathlib import Path
import json

import numpy as np
import pandas as pd

from src.distillation.head import embed_sequences
from src.distillation.models import FeatureSequence, HeadParameters, TrainingExample, load_feature_dir
from src.distillation.params_io import save_head_params, load_head_params
from src.distillation.trainer import train, TrainResult
from src.embedding.matrix import EmbeddingMatrix, normalize_rows
from src.embedding.store import load_embeddings
from src.evaluation.report import MetricReport, evaluate_result, language_breakdown, resource_group_summary
from src.pipeline.models import PipelineConfig
from src.pipeline.synthetic import generate_synthetic
from src.rebalance.sampler import LanguageStats, compute_ratios, apply_rebalance, draw_training_subset
from src.retrieval.result_io import write_retrieval_tsv, read_truth_tsv, read_refs_tsv
from src.retrieval.similarity import RetrievalResult, retrieve
from src.utils import seeded_generator, file_sha256
from src.utils.enums import HeadMode, Modality
from src.utils.exception import XLEmbError, ArtifactIOError, ValidationError
from src.utils.logger import LogFacade


logger = LogFacade.get_logger("pipeline")


def tag_error(err: XLEmbError, stage_name: str) -> XLEmbError:
    """ Same exception type with the stage prefixed to the message """
    message = str(err)
    if not message.startswith("["):
        message = f"[{stage_name}] {message}"
    tagged = type(err)(message)
    return tagged


@contextmanager
def stage(name: str):
    logger.info(f"[{name}] started")
    try:
        yield
    except XLEmbError as err:
        raise tag_error(err, name) from err
    logger.info(f"[{name}] done")


class PipelineRunner:
    """ Runs one pipeline config and writes its artifacts to output_dir """

    RETRIEVAL_FILE = "retrieval.tsv"
    METRICS_FILE = "metrics.json"
    BREAKDOWN_FILE = "per_language.tsv"
    RESOURCE_GROUPS_FILE = "resource_groups.tsv"
    PARAMS_FILE = "head.xemb"
    LOSS_CURVE_FILE = "loss_curve.csv"
    REBALANCE_FILE = "rebalance.tsv"
    MANIFEST_FILE = "manifest.json"

    def __init__(self, config: PipelineConfig):
        self.config: PipelineConfig = config
        self.output_dir: Path = Path(config.output_dir)
        self.train_result: Optional[TrainResult] = None
        self.result: Optional[RetrievalResult] = None
        self.breakdown: Optional[pd.DataFrame] = None
        self._outputs: List[str] = []

    def check_inputs(self) -> None:
        """ Every input file must exist before any compute starts """
        for path in self.config.input_paths():
            if not path.exists():
                raise ArtifactIOError(f"Input {path} named in the config doesn't exist")

    def load_data(self) -> Tuple[List[TrainingExample], List[FeatureSequence], EmbeddingMatrix, np.ndarray, Optional[List[str]]]:
        """ (training examples, query sequences, search bank, ground truth indices, search sentences) """
        if self.config.synthetic is not None:
            corpus = generate_synthetic(self.config.synthetic)
            return corpus.examples, corpus.sequences, corpus.search, corpus.u, list(corpus.search.texts)

        data = self.config.data
        sequences = load_feature_dir(Path(data.features_dir))
        targets = load_embeddings(Path(data.targets_path))
        target_index = targets.index_of()
        rows = targets.as_float64()
        examples = []
        for seq in sequences:
            if seq.id not in target_index:
                raise ValidationError(f"Feature sequence '{seq.id}' has no target embedding")
            examples.append(TrainingExample(features=seq, target=rows[target_index[seq.id]]))
        queries = sequences
        if data.query_features_dir is not None:
            queries = load_feature_dir(Path(data.query_features_dir))
        search = load_embeddings(Path(data.search_path))
        truth = read_truth_tsv(Path(data.truth_path))
        search_index = search.index_of()
        u = []
        for seq in queries:
            if seq.id not in truth:
                raise ValidationError(f"Query '{seq.id}' has no ground truth entry")
            if truth[seq.id] not in search_index:
                raise ValidationError(
                    f"True target '{truth[seq.id]}' of query '{seq.id}' is missing from the search bank"
                )
            u.append(search_index[truth[seq.id]])
        texts = list(search.texts) if search.has_texts() else None
        if data.refs_path is not None:
            refs = read_refs_tsv(Path(data.refs_path))
            texts = [refs.get(x, "") for x in search.ids]
        return examples, queries, search, np.asarray(u, dtype=np.int64), texts

    def rebalance(self, examples: List[TrainingExample]) -> List[TrainingExample]:
        settings = self.config.rebalance
        if settings.alpha is None and settings.sample_size is None:
            return examples
        by_id: Dict[str, TrainingExample] = {x.features.id: x for x in examples}
        ids = [x.features.id for x in examples]
        if settings.alpha is not None:
            corpus_index: Dict[str, List[str]] = {}
            for example in examples:
                corpus_index.setdefault(example.features.lang, []).append(example.features.id)
            plan = compute_ratios(LanguageStats.from_corpus(corpus_index), settings.alpha, settings.seed)
            self._write_table(plan.table(), self.REBALANCE_FILE)
            ids = apply_rebalance(corpus_index, plan)
        if settings.sample_size is not None:
            ids = draw_training_subset(ids, settings.sample_size, settings.seed)
        logger.info(f"Training on {len(ids)} re-balanced items out of {len(examples)}")
        return [by_id[x] for x in ids]

    def obtain_head(self, examples: List[TrainingExample], search_dim: int) -> HeadParameters:
        mode = self.config.head.mode
        if mode == HeadMode.LOAD:
            return load_head_params(Path(self.config.head.params_path))
        if mode == HeadMode.RANDOM:
            d_in = examples[0].features.d_in
            params = HeadParameters.initialize(d_in, search_dim, seeded_generator(self.config.train.seed))
        else:
            self.train_result = train(examples, self.config.train)
            self.train_result.save_loss_curve(self.output_dir / self.LOSS_CURVE_FILE)
            self._outputs.append(self.LOSS_CURVE_FILE)
            params = self.train_result.params
        save_head_params(params, self.output_dir / self.PARAMS_FILE)
        self._outputs.append(self.PARAMS_FILE)
        return params

    def verify_search_bank(self, search: EmbeddingMatrix, u: np.ndarray) -> None:
        """
        The search bank has to contain every true target plus distractors. A speech bank of the same
        size as the true targets is allowed with a warning (speech to speech retrieval).
        """
        true_targets = np.unique(u)
        if true_targets.size and (true_targets.min() < 0 or true_targets.max() >= search.count):
            raise ValidationError("Ground truth points outside the search bank")
        if search.count > true_targets.size:
            return
        message = (
            f"Search bank of {search.count} rows holds no distractors beyond the "
            f"{true_targets.size} true targets"
        )
        if search.modality != Modality.SPEECH:
            raise ValidationError(message)
        logger.warning(message)

    def resource_groups(self, breakdown: pd.DataFrame) -> pd.DataFrame:
        """ Mean per-language scores of the configured low resource languages and of the rest """
        low = set(self.config.evaluation.low_resource_langs)
        langs = [x for x in breakdown["lang"] if x != "avg"]
        groups = {
            "low": resource_group_summary(breakdown, [x for x in langs if x in low]),
            "high": resource_group_summary(breakdown, [x for x in langs if x not in low]),
        }
        df = pd.DataFrame(groups).T
        df.index.name = "group"
        return df.reset_index()

    def run(self) -> MetricReport:
        self.check_inputs()
        try:
            self.output_dir.mkdir(parents=True, exist_ok=True)
        except OSError as err:
            raise ArtifactIOError(f"Cannot create output directory {self.output_dir}: {err}") from err

        with stage("data"):
            examples, queries, search, u, texts = self.load_data()
            if not examples:
                raise ValidationError("No training examples")
        with stage("rebalance"):
            examples = self.rebalance(examples)
        with stage("train"):
            params = self.obtain_head(examples, search.dim)
        with stage("embed"):
            Q = normalize_rows(embed_sequences(queries, params, self.config.train.pooling_kind))
            S = normalize_rows(search)
        with stage("retrieve"):
            self.verify_search_bank(S, u)
            settings = self.config.retrieval
            self.result = retrieve(Q, S, settings.k, settings.block_size, settings.threads)
            write_retrieval_tsv(self.result, Q, S, self.output_dir / self.RETRIEVAL_FILE)
            self._outputs.append(self.RETRIEVAL_FILE)
        with stage("evaluate"):
            casefold = self.config.evaluation.casefold
            report = evaluate_result(self.result, u, settings.k, texts, casefold, search_size=S.count)
            report.save(self.output_dir / self.METRICS_FILE)
            self._outputs.append(self.METRICS_FILE)
            hypotheses = references = None
            if texts is not None:
                hypotheses = [texts[int(j)] for j in self.result.r]
                references = [texts[int(j)] for j in u]
            self.breakdown = language_breakdown(
                self.result.indices, u, Q.langs, settings.k, hypotheses, references, casefold
            )
            self._write_table(self.breakdown, self.BREAKDOWN_FILE)
            if self.config.evaluation.low_resource_langs:
                self._write_table(self.resource_groups(self.breakdown), self.RESOURCE_GROUPS_FILE)
        self.write_manifest()
        logger.info(f"R@1 {report.r_at_1:.2f}  R@{report.k} {report.r_at_k:.2f}  WER {report.wer}")
        return report

    def _write_table(self, df: pd.DataFrame, name: str) -> None:
        try:
            df.to_csv(self.output_dir / name, sep="\t", index=False, float_format="%.6f", lineterminator="\n")
        except OSError as err:
            raise ArtifactIOError(f"Cannot write {name}: {err}") from err
        self._outputs.append(name)

    def manifest(self) -> dict:
        config = json.loads(self.config.json(exclude={"synthetic"}))
        seeds = {"train": self.config.train.seed, "rebalance": self.config.rebalance.seed}
        if self.config.synthetic is not None:
            config["synthetic"] = json.loads(self.config.synthetic.json(exclude={"planted_head"}))
            seeds["synthetic"] = self.config.synthetic.seed
        inputs = {}
        for path in self.config.input_paths():
            files = sorted(path.glob("*.xemb")) if path.is_dir() else [path]
            for file in files:
                inputs[str(file)] = file_sha256(file)
        outputs = {name: file_sha256(self.output_dir / name) for name in sorted(set(self._outputs))}
        return {"config": config, "seeds": seeds, "inputs": inputs, "outputs": outputs}

    def write_manifest(self) -> None:
        try:
            with open(self.output_dir / self.MANIFEST_FILE, mode="w", encoding="utf-8") as fp_:
                json.dump(self.manifest(), fp_, indent=2, sort_keys=True)
                fp_.write("\n")
        except OSError as err:
            raise ArtifactIOError(f"Cannot write manifest: {err}") from err


def run_pipeline(config_path: Path) -> MetricReport:
    """ Load a pipeline config file and run it """
    return PipelineRunner(PipelineConfig.from_file(Path(config_path))).run()
