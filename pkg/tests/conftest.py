from collections import defaultdict

import pytest
from hypothesis import HealthCheck, settings

# first calls into numba kernels compile (or load from cache), which would
# trip hypothesis' per-example deadline
settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


# acceptance checks report here; the summary prints one line per criterion
_CHECKS = defaultdict(list)


@pytest.fixture
def report():
    def add(criterion: int, name: str, ok: bool, detail: str = "") -> bool:
        _CHECKS[criterion].append((name, bool(ok), detail))
        print(f"criterion {criterion} [{name}] {'PASS' if ok else 'FAIL'} {detail}")
        return bool(ok)
    return add


def pytest_terminal_summary(terminalreporter):
    if not _CHECKS:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(_CHECKS):
        checks = _CHECKS[criterion]
        failed = [c for c in checks if not c[1]]
        status = "FAIL" if failed else "PASS"
        terminalreporter.write_line(f"criterion {criterion:>2}: {status} "
                                    f"({len(checks) - len(failed)}/{len(checks)} checks)")
        for name, ok, detail in checks:
            terminalreporter.write_line(f"    {'PASS' if ok else 'FAIL'} {name}: {detail}")
