import numpy as np
import pytest

from coughdet.synth import SynthConfig, generate_dataset


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def small_dataset(tmp_path_factory):
    """Four patients, a handful of events each; shared by slow-ish tests."""
    out = tmp_path_factory.mktemp("synth_small")
    cfg = SynthConfig(n_patients=4, coughs_per_patient=8, noncoughs_per_patient=12, seed=3)
    records = generate_dataset(cfg, out)
    return out, records


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
