"""
File:           __init__.py
Author:         xlembed developers
Created on:     14/10/26, 9:05 am
"""
