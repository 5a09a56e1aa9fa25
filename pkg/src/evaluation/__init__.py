"""
File:           __init__.py
Author:         xlembed developers
Created on:     10/10/26, 10:00 am
"""
from src.evaluation.metrics import recall_at_1, recall_at_k, word_error_rate, EvaluationCase
from src.evaluation.report import MetricReport, evaluate
