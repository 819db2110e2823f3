import pytest

from volspec._kernels import warmup


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    # keep JIT compilation out of any timed check
    warmup()
