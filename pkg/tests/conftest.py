"""Shared fixtures: mtcars01, seeds and scratch output directories"""

import os

import numpy as np
import pytest
import yaml

from backend.data_loader import load_mtcars, load_mtcars01
from config.settings import Config


@pytest.fixture(scope='session')
def mtcars():
    return load_mtcars()


@pytest.fixture(scope='session')
def mtcars01():
    return load_mtcars01()


@pytest.fixture
def seed():
    return 20240601


@pytest.fixture
def rng():
    return np.random.default_rng(7)


@pytest.fixture
def out_dir(tmp_path):
    path = tmp_path / 'out'
    path.mkdir()
    return str(path)


@pytest.fixture
def write_config(tmp_path):
    """Dump a mapping to a YAML file and return its path"""

    def write(data, name='run.yaml'):
        data = {'schema_version': Config.CONFIG_SCHEMA_VERSION, **data}
        path = os.path.join(str(tmp_path), name)
        with open(path, 'w', encoding='utf-8') as f:
            yaml.safe_dump(data, f, sort_keys=True)
        return path

    return write
