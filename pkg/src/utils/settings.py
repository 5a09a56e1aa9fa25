"""
File:           settings.py
Author:         xlembed developers
Created on:     07/10/26, 7:05 pm

Environment level defaults. CLI flags override these, these override the built-in values.
"""
import os

from dotenv import load_dotenv

from src import BASE_DIR


# Load env vars from .env
dotenv_path = BASE_DIR / 'env' / '.env'
load_dotenv(dotenv_path=dotenv_path)


DEFAULT_THREADS: int = int(os.environ.get("XLEMB_THREADS", 1))
DEFAULT_BLOCK_SIZE: int = int(os.environ.get("XLEMB_BLOCK_SIZE", 4096))
LOG_LEVEL: str = os.environ.get("XLEMB_LOG_LEVEL", "INFO").upper()
