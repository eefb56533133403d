import time
from contextlib import contextmanager

import pytest

_LINES = []


@contextmanager
def _criterion(ident, description, limit_s):
    start = time.perf_counter()
    try:
        yield
    except BaseException as exc:
        elapsed = time.perf_counter() - start
        reason = str(exc).strip().splitlines()[0] if str(exc).strip() else type(exc).__name__
        _LINES.append(f"FAIL  {ident:<4} {description} [{elapsed:.2f}s] -- {reason}")
        raise
    elapsed = time.perf_counter() - start
    if elapsed > limit_s:
        _LINES.append(f"FAIL  {ident:<4} {description} [{elapsed:.2f}s > {limit_s}s limit]")
        raise AssertionError(f"{ident} exceeded runtime limit: {elapsed:.2f}s > {limit_s}s")
    _LINES.append(f"PASS  {ident:<4} {description} [{elapsed:.2f}s]")


@pytest.fixture
def criterion():
    return _criterion


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for line in sorted(_LINES, key=lambda l: (int(l.split()[1][2:].rstrip("ab")), l.split()[1])):
        terminalreporter.write_line(line)
