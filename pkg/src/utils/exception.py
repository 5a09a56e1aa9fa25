"""
File:           exception.py
Author:         xlembed developers
Created on:     07/10/26, 7:20 pm
"""


class XLEmbError(Exception):
    # Process exit code used by main.py
    exit_code: int = 1


class ValidationError(XLEmbError):
    exit_code = 2


class EmptyEvaluationError(ValidationError):
    pass


class ParameterError(XLEmbError):
    exit_code = 2


class ShapeError(XLEmbError):
    exit_code = 2


class ContractError(XLEmbError):
    exit_code = 2


class DegenerateVectorError(XLEmbError):
    exit_code = 2


class ConfigFileError(XLEmbError):
    exit_code = 2


class FormatError(XLEmbError):
    exit_code = 3


class TruncationError(FormatError):
    pass


class ArtifactIOError(XLEmbError):
    exit_code = 3


class TrainingDivergenceError(XLEmbError):
    exit_code = 4
