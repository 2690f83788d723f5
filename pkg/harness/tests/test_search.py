import pytest

from conftest import STUB_PROBE
from mypy_harness.runner import CheckStatus
from mypy_harness.search import min_stack_search


def test_degenerate_low_end_passes(stub_file):
    result = min_stack_search(stub_file("exit=0"), 2, 64, 30, probe_cmd=STUB_PROBE)
    assert result.minimal_mb == 2
    assert not result.exceeds_hi
    assert result.status_at_minimal is CheckStatus.TYPE_CHECKED


def test_crashing_everywhere_exceeds_hi(stub_file):
    result = min_stack_search(
        stub_file("threshold=1000"), 2, 64, 30, probe_cmd=STUB_PROBE
    )
    assert result.exceeds_hi
    assert result.minimal_mb is None


def test_timeouts_do_not_pass_the_predicate(stub_file):
    result = min_stack_search(stub_file("sleep"), 2, 4, 1.0, probe_cmd=STUB_PROBE)
    assert result.exceeds_hi


def test_finds_exact_threshold(stub_file):
    result = min_stack_search(
        stub_file("threshold=23"), 1, 64, 30, probe_cmd=STUB_PROBE
    )
    assert result.minimal_mb == 23
    assert result.status_at_minimal is CheckStatus.TYPE_CHECKED
    assert not result.non_monotone
    probed = dict(result.observations)
    assert all(
        status is CheckStatus.CRASHED for mb, status in probed.items() if mb < 23
    )


def test_type_error_files_still_count_as_passing(stub_file):
    """A file the checker rejects is a successful (non-crashing) check."""
    result = min_stack_search(
        stub_file("threshold_error=9"), 1, 64, 30, probe_cmd=STUB_PROBE
    )
    assert result.minimal_mb == 9
    assert result.status_at_minimal is CheckStatus.TYPE_ERROR


def test_bounds_must_be_ordered(stub_file):
    with pytest.raises(ValueError):
        min_stack_search(stub_file("exit=0"), 8, 8, 30, probe_cmd=STUB_PROBE)


def test_real_recursion_search_is_monotone(stub_file):
    """Search over the genuinely recursing stub lands on a boundary: the
    size below the minimum crashes, the minimum itself passes."""
    path = stub_file("depth=30000")
    result = min_stack_search(path, 1, 64, 120, probe_cmd=STUB_PROBE)
    assert not result.exceeds_hi
    assert 1 < result.minimal_mb <= 64
    probed = dict(result.observations)
    assert probed[result.minimal_mb] is not CheckStatus.CRASHED
