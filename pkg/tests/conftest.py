from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from cpptopics import TrainConfig, train
from cpptopics import synthetic

TRAIN_SEED = 20250810


@pytest.fixture(scope="session")
def training_snippets():
    return synthetic.training_snippets(80, seed=TRAIN_SEED)


@pytest.fixture(scope="session")
def trained_model(training_snippets):
    return train(training_snippets, TrainConfig())
