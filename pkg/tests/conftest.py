import pytest

from mmhetnet.model import default_config


@pytest.fixture(scope="session")
def table1():
    return default_config()


@pytest.fixture(scope="session")
def table1_sir():
    return default_config().interference_limited()


ACCEPTANCE: dict[int, list[tuple[str, bool, str]]] = {}


def record(criterion: int, check: str, ok: bool, detail: str = "") -> bool:
    ACCEPTANCE.setdefault(criterion, []).append((check, bool(ok), detail))
    print(f"criterion {criterion} [{'PASS' if ok else 'FAIL'}] {check}: {detail}")
    return bool(ok)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for c in sorted(ACCEPTANCE):
        checks = ACCEPTANCE[c]
        failed = [name for name, ok, _ in checks if not ok]
        verdict = "PASS" if not failed else "FAIL"
        note = f" (failing: {'; '.join(failed)})" if failed else ""
        terminalreporter.write_line(f"criterion {c}: {verdict}{note}")
        for name, ok, detail in checks:
            terminalreporter.write_line(f"    {'ok  ' if ok else 'FAIL'} {name}: {detail}")
