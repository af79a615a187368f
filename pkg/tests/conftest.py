import numpy as np
import pytest

from fewsim import ScenarioSpec, bundled_dataset_path, load_dataset, run_scenario
from fewsim.fmlm import dataset_coefficients


@pytest.fixture(scope="session")
def dataset():
    return load_dataset(bundled_dataset_path())


@pytest.fixture(scope="session")
def coefs(dataset):
    return dataset_coefficients(dataset)


@pytest.fixture(scope="session")
def base_result(dataset, coefs):
    return run_scenario(dataset, ScenarioSpec("ssp245_base", "ssp245"), coefs)


@pytest.fixture()
def rng():
    return np.random.default_rng(42)
