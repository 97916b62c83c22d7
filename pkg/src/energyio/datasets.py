"""Bundled synthetic dataset (5 sectors, 2 years)."""

from pathlib import Path

DATA_DIR = Path(__file__).parent / "data"


def synthetic5_dir() -> Path:
    return DATA_DIR / "synthetic5"


def synthetic5_config() -> Path:
    """Path of the YAML run config for the bundled dataset."""
    return synthetic5_dir() / "config.yaml"
