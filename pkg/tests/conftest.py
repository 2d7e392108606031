import pytest

from microproof.prelude import load_prelude


@pytest.fixture(scope="session")
def env():
    """The fully loaded library environment, shared across the whole run."""
    return load_prelude()
