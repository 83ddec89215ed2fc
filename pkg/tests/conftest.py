import os
import tempfile

# keep the per-n context cache out of the user's home directory during tests
os.environ.setdefault("M0N_CACHE_DIR", tempfile.mkdtemp(prefix="m0n-cache-"))

from hypothesis import HealthCheck, settings  # noqa: E402

settings.register_profile("m0n", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("m0n")


ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
