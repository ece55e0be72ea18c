import pytest

from kernelfuse._kernels import warmup


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    # pay the one-off JIT compilation cost before any timed test runs
    warmup()
