"""
File:           result_io.py
Author:         xlembed developers
Created on:     09/10/26, 2:30 pm
"""
from typing import Dict, List
from pathlib import Path
import csv

import pandas as pd

from src.embedding.matrix import EmbeddingMatrix
from src.retrieval.similarity import RetrievalResult
from src.utils.exception import ArtifactIOError, FormatError, ValidationError


RESULT_COLUMNS = ["query_id", "rank", "search_id", "score"]


def _read_tsv(path: Path, names: List[str], min_columns: int) -> pd.DataFrame:
    """ Read a headerless or headed UTF-8 TSV of strings """
    path = Path(path)
    if not path.is_file():
        raise ArtifactIOError(f"{path} doesn't exist")
    try:
        df = pd.read_csv(
            path, sep="\t", header=None, dtype=str, keep_default_na=False,
            quoting=csv.QUOTE_NONE, encoding="utf-8",
        )
    except pd.errors.EmptyDataError:
        return pd.DataFrame(columns=names)
    except (pd.errors.ParserError, UnicodeDecodeError) as err:
        raise FormatError(f"Cannot parse {path}: {err}") from err
    if df.shape[1] < min_columns:
        raise FormatError(f"{path} has {df.shape[1]} columns, expected at least {min_columns}")
    df = df.iloc[:, :len(names)]
    df.columns = names[:df.shape[1]]
    # Drop a header line if the file has one
    if len(df) and df.iloc[0, 0] == names[0]:
        df = df.iloc[1:].reset_index(drop=True)
    return df


def retrieval_frame(result: RetrievalResult, Q: EmbeddingMatrix, S: EmbeddingMatrix) -> pd.DataFrame:
    """ Long format table: query id, rank (1 based), search id, score """
    records = []
    for i in range(result.n_queries):
        for rank in range(result.k):
            records.append((
                Q.ids[i], rank + 1, S.ids[int(result.indices[i, rank])], float(result.scores[i, rank])
            ))
    return pd.DataFrame.from_records(records, columns=RESULT_COLUMNS)


def write_retrieval_tsv(result: RetrievalResult, Q: EmbeddingMatrix, S: EmbeddingMatrix, path: Path) -> None:
    """ Write the ranked lists with scores printed to 6 decimal places """
    df = retrieval_frame(result, Q, S)
    try:
        df.to_csv(path, sep="\t", index=False, float_format="%.6f", lineterminator="\n")
    except OSError as err:
        raise ArtifactIOError(f"Cannot write {path}: {err}") from err


def read_retrieval_tsv(path: Path) -> Dict[str, List[str]]:
    """ Ranked search ids per query id, in file order of first appearance """
    df = _read_tsv(path, RESULT_COLUMNS, min_columns=4)
    try:
        df["rank"] = df["rank"].astype(int)
    except ValueError as err:
        raise FormatError(f"{path} has a non-integer rank: {err}") from err
    ranked: Dict[str, List[str]] = {}
    for query_id, group in df.groupby("query_id", sort=False):
        ranked[query_id] = group.sort_values("rank", kind="stable")["search_id"].tolist()
    return ranked


def read_truth_tsv(path: Path) -> Dict[str, str]:
    """ Ground truth: query id -> search id of the true translation """
    df = _read_tsv(path, ["query_id", "search_id"], min_columns=2)
    if df["query_id"].duplicated().any():
        duplicate = df.loc[df["query_id"].duplicated(), "query_id"].iloc[0]
        raise ValidationError(f"Query '{duplicate}' has more than one ground truth entry in {path}")
    return dict(zip(df["query_id"], df["search_id"]))


def write_truth_tsv(truth: Dict[str, str], path: Path) -> None:
    df = pd.DataFrame({"query_id": list(truth.keys()), "search_id": list(truth.values())})
    df.to_csv(path, sep="\t", index=False, lineterminator="\n")


def read_refs_tsv(path: Path) -> Dict[str, str]:
    """ Search id -> sentence text """
    df = _read_tsv(path, ["search_id", "text"], min_columns=2)
    return dict(zip(df["search_id"], df["text"]))
