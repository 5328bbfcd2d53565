import pytest
from hypothesis import HealthCheck, settings

from conicpoints.harness import CorpusSpec, generate_corpus

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def special_corpus():
    return generate_corpus(CorpusSpec(12, 12, "special", 11))


@pytest.fixture(scope="session")
def general_corpus():
    return generate_corpus(CorpusSpec(8, 12, "general", 12))


# acceptance outcomes, printed once at the end of the run
_ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def record():
    def _record(number: int, ok: bool, detail: str = ""):
        _ACCEPTANCE[number] = (ok, detail)
        print(f"ACCEPTANCE {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
        return ok
    return _record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[n]
        terminalreporter.write_line(f"ACCEPTANCE {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
