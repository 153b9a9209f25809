"""Tracking module for the dataset manifest."""

from .tracker import Tracker, graph_id, SPLITS

__all__ = ["Tracker", "graph_id", "SPLITS"]
