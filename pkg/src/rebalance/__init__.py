"""
File:           __init__.py
Author:         xlembed developers
Created on:     11/10/26, 9:25 am
"""
from src.rebalance.sampler import LanguageStats, RebalancePlan, compute_ratios, apply_rebalance
