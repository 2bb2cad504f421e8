import subprocess
import sys

import pytest

PI_3 = "1.0471975511965976"
PI_4 = "0.7853981633974483"
PI = "3.141592653589793"


def qwalk(*args):
    """Invoke the data-producing CLI; the only interface this package uses."""
    proc = subprocess.run(
        [sys.executable, "-m", "kerrwalk.cli", *args],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    return proc


@pytest.fixture(scope="session")
def data_dir(tmp_path_factory):
    """Small fast inputs covering all three schemas, csv and ndjson."""
    base = tmp_path_factory.mktemp("data")
    qwalk("walk", "--theta", PI_3, "--chi", "0.6", "--steps", "400",
          "--stride", "2", "--out", str(base / "trapped.csv"))
    qwalk("walk", "--theta", PI_4, "--chi", "0.0", "--steps", "400",
          "--stride", "2", "--format", "ndjson", "--out", str(base / "ballistic.ndjson"))
    qwalk("profile", "--theta", PI_3, "--chi", "0.6", "--steps", "400",
          "--snapshot-times", ",".join(str(t) for t in range(0, 401, 20)),
          "--out", str(base / "trapped_profile.csv"))
    qwalk("profile", "--theta", PI_4, "--chi", "0.0", "--steps", "60",
          "--snapshot-times", "60", "--out", str(base / "single_snapshot.csv"))
    qwalk("sweep", "--theta-min", "0.0", "--theta-max", PI, "--theta-count", "5",
          "--chi-min", "0.0", "--chi-max", "2.0", "--chi-count", "4",
          "--steps", "200", "--initial", "right", "--workers", "2",
          "--out", str(base / "diagram.csv"))
    return base
