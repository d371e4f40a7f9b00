"""Datasett og innlesing."""

from .dataset import Dataset
from .loader import DatasetLoader, load_csv, save_csv

__all__ = ["Dataset", "DatasetLoader", "load_csv", "save_csv"]
