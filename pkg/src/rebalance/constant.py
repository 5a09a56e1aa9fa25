"""
File:           constant.py
Author:         xlembed developers
Created on:     11/10/26, 9:30 am
"""


class CommonVoiceHours:
    """ Transcribed hours per language of the 25 language CommonVoice v7 training set """
    HOURS = {
        "EN": 2000, "DE": 960, "CA": 790, "FR": 740, "ES": 380,
        "FA": 290, "IT": 290, "CY": 220, "TA": 200, "RU": 150,
        "PL": 130, "ZH_HK": 96, "NL": 93, "PT": 85, "AR": 84,
        "ZH_CN": 63, "ZH_TW": 59, "SV_SE": 34, "ET": 32, "TR": 32,
        "JA": 27, "ID": 25, "MN": 12, "SL": 9, "LV": 7,
    }


class AlphaGrid:
    """ Smoothing values swept when studying re-balancing """
    CURVE = (1.0, 0.7, 0.5, 0.3, 0.1, 0.05)
    ABLATION = (1.0, 0.7, 0.3, 0.1, 0.05, 0.01)
    DEFAULT: float = 0.05
