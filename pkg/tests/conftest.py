import numpy as np
import pytest

# criterion number -> list of (sub-check name, passed, detail)
ACCEPTANCE = {}


def record(criterion, name, passed, detail=""):
    ACCEPTANCE.setdefault(criterion, []).append((name, bool(passed), detail))
    return bool(passed)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        subs = ACCEPTANCE[k]
        ok = all(p for _, p, _ in subs)
        failed = [f"{n} ({d})" if d else n for n, p, d in subs if not p]
        line = f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}"
        if failed:
            line += "  failing: " + "; ".join(failed)
        terminalreporter.write_line(line)
