import pytest

from miokit import _kernels


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # compile the JIT kernels once so timed tests measure algorithms, not
    # compilation
    _kernels.warm_up()
