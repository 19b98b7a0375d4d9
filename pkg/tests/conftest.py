from pathlib import Path

import pytest

from pnmodal.model import Model

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "data"


@pytest.fixture
def data_dir():
    return DATA


@pytest.fixture
def chain_model():
    """2-world chain w <= v with {w,v} in both neighborhoods and V(p) = {v}."""
    return Model.load(DATA / "models" / "chain.json")
