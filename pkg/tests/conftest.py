import time
from contextlib import contextmanager

import numpy as np
import pytest

from trifree import _kernels

BACKENDS = sorted(_kernels.available_backends())


@pytest.fixture(params=BACKENDS)
def backend(request, monkeypatch):
    """Route every kernel call through one backend for the duration of a test."""
    mod = _kernels.get_backend(request.param)
    for name in _kernels._NAMES:
        monkeypatch.setattr(_kernels, name, getattr(mod, name))
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_ACCEPTANCE: dict[int, tuple[str, str, float, str]] = {}


@pytest.fixture
def criterion():
    """Context manager recording one acceptance criterion's outcome and runtime.

    A criterion fails if its body raises or if it overruns its time budget.
    """

    @contextmanager
    def record(number: int, title: str, budget: float):
        t0 = time.perf_counter()
        try:
            yield
        except BaseException as exc:
            first = str(exc).strip().splitlines()
            _ACCEPTANCE[number] = ("FAIL", title, time.perf_counter() - t0, first[0] if first else type(exc).__name__)
            raise
        elapsed = time.perf_counter() - t0
        if elapsed > budget:
            _ACCEPTANCE[number] = ("FAIL", title, elapsed, f"runtime {elapsed:.1f}s over budget {budget:g}s")
            pytest.fail(f"criterion {number} took {elapsed:.1f}s, budget {budget:g}s")
        _ACCEPTANCE[number] = ("PASS", title, elapsed, "")

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        status, title, elapsed, note = _ACCEPTANCE[n]
        line = f"criterion {n:2d} {status}  {title} ({elapsed:.2f}s)"
        terminalreporter.write_line(line + (f": {note}" if note else ""))
