import pytest


@pytest.fixture(autouse=True)
def default_fuel_from_env_off(monkeypatch):
    '''
    Tests assume the built-in fuel default, whatever the caller's environment says.
    '''
    from .common import FUEL_ENV
    monkeypatch.delenv(FUEL_ENV, raising=False)
    yield


@pytest.fixture(scope='session', autouse=True)
def restore_logging():
    '''
    The CLI tests reconfigure loguru sinks; put the default one back afterwards.
    '''
    import sys
    from .common import logger
    try:
        yield
    finally:
        logger.remove()
        logger.add(sys.stderr)
