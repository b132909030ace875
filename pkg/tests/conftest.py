import pytest

from jellium1d.streams import substream


@pytest.fixture
def rng():
    """Fresh deterministic generator per test."""
    return substream(20250809)


@pytest.fixture
def announce(capfd):
    """Print a line that bypasses pytest capture (acceptance pass/fail lines)."""
    def _announce(line):
        with capfd.disabled():
            print(line, flush=True)
    return _announce
