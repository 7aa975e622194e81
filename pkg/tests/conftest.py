import pytest

_LINES: list[str] = []


@pytest.fixture
def verdict_line(request):
    """Print one PASS/FAIL line per acceptance check, live and again in the summary."""
    capman = request.config.pluginmanager.getplugin("capturemanager")

    def emit(name: str, ok: bool, detail: str) -> bool:
        line = f"{'PASS' if ok else 'FAIL'}  {name}: {detail}"
        _LINES.append(line)
        with capman.global_and_fixture_disabled():
            print("\n" + line, flush=True)
        return ok

    return emit


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
