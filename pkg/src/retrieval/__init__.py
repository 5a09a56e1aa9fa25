"""
File:           __init__.py
Author:         xlembed developers
Created on:     09/10/26, 9:10 am
"""
from src.retrieval.similarity import RetrievalResult, similarity_matrix, retrieve
