import json
import os
import sys
from functools import lru_cache
from pathlib import Path

import pytest
from hypothesis import settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", max_examples=60, deadline=None, derandomize=True)
settings.load_profile("default")

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def frozen():
    return json.loads((DATA / "frozen_values.json").read_text())


@lru_cache(maxsize=None)
def built(text: str, layers: int = 3):
    """Cached verified build, shared across test modules."""
    from hypertile.builder import BuildSpec, build
    from hypertile.tuples import parse_tuple

    return build(BuildSpec(parse_tuple(text), layers=layers)).map


@lru_cache(maxsize=None)
def built_kh(k: int, l: int, m: int, layers: int = 2):
    from hypertile.builder import build_kh

    return build_kh(k, l, m, layers)
