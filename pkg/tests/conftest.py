import pytest

from qzzb import _backend, fidelity

ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture(params=_backend.available_backends())
def backend(request, monkeypatch):
    """Run the test once per importable kernel backend."""
    mod = _backend.get_backend(request.param)
    monkeypatch.setattr(fidelity, "kernels", mod)
    return mod


@pytest.fixture
def report(request):
    """Record one acceptance line; printed now and again in the terminal summary."""
    lines = request.config.stash.setdefault(ACCEPTANCE_KEY, [])

    def _report(criterion, passed, detail):
        status = passed if isinstance(passed, str) else ("PASS" if passed else "FAIL")
        line = f"criterion {criterion}: {status} - {detail}"
        print(line)
        lines.append(line)
        return passed

    return _report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
