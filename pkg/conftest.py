import pytest
import structlog


@pytest.fixture(autouse=True)
def _reset_structlog():
    """Keep a configure_logging() call in one spec from binding a later spec's closed capture stream."""
    yield
    structlog.reset_defaults()
