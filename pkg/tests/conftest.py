import os

import pytest

from cedrf import _kernels

BACKENDS = ["numpy"] + (["numba"] if _kernels.HAVE_NUMBA else [])


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


def pytest_report_header(config):
    return f"cedrf kernel backend: {_kernels.BACKEND} (CEDRF_DISABLE_NUMBA={os.environ.get('CEDRF_DISABLE_NUMBA', '')!r})"


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
