import os
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=200, deadline=None,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

MNIST_DIR = Path(os.environ.get("SPIKECOLUMN_MNIST_DIR", "/root/data/mnist"))
MNIST_IMAGES = MNIST_DIR / "train-images.idx3-ubyte"
MNIST_LABELS = MNIST_DIR / "train-labels.idx1-ubyte"

# criterion verdicts collected by the acceptance module
VERDICTS = []


@pytest.fixture(scope="session")
def mnist_paths():
    if not (MNIST_IMAGES.is_file() and MNIST_LABELS.is_file()):
        pytest.skip(f"MNIST IDX files not found under {MNIST_DIR}")
    return str(MNIST_IMAGES), str(MNIST_LABELS)


def pytest_terminal_summary(terminalreporter):
    if not VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in VERDICTS:
        terminalreporter.write_line(line)
