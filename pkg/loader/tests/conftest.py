import subprocess
import sys

import pytest


@pytest.fixture(scope="session")
def toy_bundle_dir(tmp_path_factory):
    """A toy bundle produced through the generator's public CLI."""
    out = tmp_path_factory.mktemp("bundle") / "toy"
    subprocess.run(
        [sys.executable, "-m", "ringbench", "generate",
         "--scale", "toy", "--seed", "7",
         "--rings-ticketing", "4", "--rings-ghost", "4", "--rings-ato", "4",
         "--out", str(out)],
        check=True, capture_output=True, text=True,
    )
    return out
