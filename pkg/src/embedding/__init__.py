"""
File:           __init__.py
Author:         xlembed developers
Created on:     08/10/26, 10:00 am
"""
from src.embedding.matrix import EmbeddingMatrix, normalize_rows, is_unit_normalized, DEFAULT_DIM
from src.embedding.store import load_embeddings, save_embeddings, sidecar_path
