from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from tmsub.encoding import build_class_table
from tmsub.tm import parse_tm

settings.register_profile(
    "suite",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")

REPO_ROOT = Path(__file__).resolve().parents[1]
MACHINES = REPO_ROOT / "machines"


@pytest.fixture(scope="session")
def palindrome_tm():
    return parse_tm((MACHINES / "palindrome.tm").read_text())


@pytest.fixture(scope="session")
def palindrome_table(palindrome_tm):
    return build_class_table(palindrome_tm)
