"""
File:           __init__.py
Author:         xlembed developers
Created on:     13/10/26, 2:25 pm
"""
from src.segmentation.segmenter import BoundaryProposal, adjacent_distances, find_peaks, propose_boundaries
