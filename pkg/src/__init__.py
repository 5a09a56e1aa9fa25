"""
File:           __init__.py
Author:         xlembed developers
Created on:     07/10/26, 6:50 pm
"""
from pathlib import Path


BASE_DIR = Path(__file__).resolve().parents[1]
LOG_DIR = BASE_DIR / "logs"
LOG_DIR.mkdir(exist_ok=True)
