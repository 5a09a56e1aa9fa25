"""
File:           models.py
Author:         xlembed developers
Created on:     14/10/26, 9:40 am
"""
from typing import Optional, List
from pathlib import Path

from pydantic import BaseModel, Field, validator, root_validator
from pydantic import ValidationError as PydanticValidationError

from src.distillation.config import TrainConfig
from src.distillation.models import HeadParameters
from src.pipeline.config_reader import ConfigReader
from src.utils.enums import HeadMode
from src.utils.exception import ConfigFileError


class SyntheticSpec(BaseModel):
    """ Desk scale stand-in for transcribed speech / translation pairs """
    n_items: int = Field(..., ge=1)
    n_langs: int = Field(1, ge=1)
    d_in: int = Field(16, ge=1)
    d_out: int = Field(32, ge=1)
    min_frames: int = Field(4, ge=1)
    max_frames: int = Field(12, ge=1)
    noise_scale: float = Field(0.05, ge=0.0)
    seed: int = Field(0, ge=0, le=2 ** 64 - 1)
    n_distractors: int = Field(0, ge=0)
    # Item count of language l is proportional to lang_skew ** l
    lang_skew: float = Field(1.0, gt=0.0, le=1.0)
    planted: bool = False
    planted_head: Optional[HeadParameters] = None

    class Config:
        extra = "forbid"
        arbitrary_types_allowed = True

    @root_validator(skip_on_failure=True)
    def sizes_are_consistent(cls, values):
        if values["n_items"] < values["n_langs"]:
            raise ValueError(f"n_items {values['n_items']} is smaller than n_langs {values['n_langs']}")
        if values["min_frames"] > values["max_frames"]:
            raise ValueError("min_frames exceeds max_frames")
        head = values.get("planted_head")
        if head is not None and (head.d_in, head.d_out) != (values["d_in"], values["d_out"]):
            raise ValueError(
                f"Planted head is {head.d_in} -> {head.d_out}, spec is {values['d_in']} -> {values['d_out']}"
            )
        return values


class DataPaths(BaseModel):
    """ Precomputed inputs: training features with their text targets, the search bank and ground truth """
    features_dir: str
    targets_path: str
    search_path: str
    truth_path: str
    # Evaluate on these sequences instead of the training ones
    query_features_dir: Optional[str] = None
    refs_path: Optional[str] = None

    class Config:
        extra = "forbid"

    def input_paths(self) -> List[Path]:
        paths = [self.features_dir, self.targets_path, self.search_path, self.truth_path,
                 self.query_features_dir, self.refs_path]
        return [Path(x) for x in paths if x is not None]


class HeadSettings(BaseModel):
    mode: HeadMode = HeadMode.TRAIN
    params_path: Optional[str] = None

    class Config:
        extra = "forbid"

    @root_validator(skip_on_failure=True)
    def load_needs_path(cls, values):
        if values["mode"] == HeadMode.LOAD and not values.get("params_path"):
            raise ValueError("head.mode 'load' needs head.params_path")
        return values


class RetrievalSettings(BaseModel):
    k: int = Field(10, ge=1)
    block_size: Optional[int] = Field(None, ge=1)
    threads: Optional[int] = Field(None, ge=1)

    class Config:
        extra = "forbid"


class RebalanceSettings(BaseModel):
    """ alpha = null keeps the natural language distribution """
    alpha: Optional[float] = Field(None, gt=0.0, le=1.0)
    seed: int = Field(0, ge=0, le=2 ** 64 - 1)
    sample_size: Optional[int] = Field(None, ge=1)

    class Config:
        extra = "forbid"


class EvaluationSettings(BaseModel):
    casefold: bool = True
    # When set, per_language.tsv is also summarised into low and high resource groups
    low_resource_langs: Optional[List[str]] = None

    class Config:
        extra = "forbid"


class PipelineConfig(BaseModel):
    output_dir: str
    synthetic: Optional[SyntheticSpec] = None
    data: Optional[DataPaths] = None
    head: HeadSettings = HeadSettings()
    train: TrainConfig
    retrieval: RetrievalSettings = RetrievalSettings()
    rebalance: RebalanceSettings = RebalanceSettings()
    evaluation: EvaluationSettings = EvaluationSettings()

    class Config:
        extra = "forbid"

    @root_validator(skip_on_failure=True)
    def one_data_source(cls, values):
        if (values.get("synthetic") is None) == (values.get("data") is None):
            raise ValueError("Config needs exactly one of 'synthetic' and 'data'")
        return values

    @validator("output_dir")
    def output_dir_not_empty(cls, value: str) -> str:
        if not value.strip():
            raise ValueError("output_dir is empty")
        return value

    def input_paths(self) -> List[Path]:
        """ Every file the run reads, checked before any compute """
        paths = self.data.input_paths() if self.data is not None else []
        if self.head.mode == HeadMode.LOAD:
            paths.append(Path(self.head.params_path))
        return paths

    @classmethod
    def from_file(cls, path: Path) -> "PipelineConfig":
        return parse_config(cls, ConfigReader(Path(path)).as_dict(), path)


def parse_config(model, values: dict, source) -> BaseModel:
    """ Validate a decoded config dict into a model, reporting violations as ConfigFileError """
    try:
        return model.parse_obj(values)
    except PydanticValidationError as err:
        raise ConfigFileError(f"Invalid config {source}: {err}") from err


def read_train_config(path: Path) -> TrainConfig:
    """ A head training config, either bare or as the "train" section of a pipeline config """
    reader = ConfigReader(Path(path))
    values = reader.get("train") if "train" in reader else reader.as_dict()
    return parse_config(TrainConfig, values, path)
