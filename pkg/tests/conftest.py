import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from bbogenes.data import Dataset
from bbogenes.datasets import planted_sum_dataset, preset


@pytest.fixture(scope="session")
def colon_like():
    return preset("colon")


@pytest.fixture(scope="session")
def breast_like():
    return preset("breast")


@pytest.fixture(scope="session")
def leukemia_like():
    return preset("leukemia")


@pytest.fixture(scope="session")
def planted_sum():
    """(dataset, planted gene indices) with a 3-gene sum signal."""
    return planted_sum_dataset()


@pytest.fixture(scope="session")
def small_ds():
    """20 samples, 6 genes; gene 3 perfectly separates the classes."""
    rng = np.random.default_rng(42)
    labels = np.array([-1] * 10 + [1] * 10)
    rng.shuffle(labels)
    values = rng.normal(size=(20, 6))
    values[:, 3] = np.where(labels == 1, values[:, 3] + 10.0, values[:, 3])
    return Dataset(values, labels)
