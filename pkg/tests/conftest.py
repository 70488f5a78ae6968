"""Shared fixtures."""

import pytest

from src.config import reset_config


@pytest.fixture(autouse=True)
def fresh_config():
    """Each test reads the environment anew."""
    reset_config()
    yield
    reset_config()
