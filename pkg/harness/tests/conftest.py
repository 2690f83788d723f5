import sys
from pathlib import Path

import pytest

from mypy_harness.runner import checker_version

HARNESS_ROOT = Path(__file__).resolve().parents[1]
REPO_ROOT = HARNESS_ROOT.parent
PALINDROME = REPO_ROOT / "machines" / "palindrome.tm"

STUB_PROBE = [sys.executable, str(Path(__file__).parent / "stub_probe.py")]

MYPY_VERSION = checker_version()

requires_mypy = pytest.mark.skipif(
    MYPY_VERSION is None,
    reason="mypy is not installed (unavailable from this environment's package mirror)",
)


@pytest.fixture()
def stub_file(tmp_path):
    def make(directive: str) -> str:
        target = tmp_path / "target.py"
        target.write_text(f"# stub: {directive}\n", encoding="utf-8")
        return str(target)

    return make
