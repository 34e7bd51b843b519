import subprocess
from pathlib import Path

import pytest


class TestFlake8:
    def test_flake8(self):
        p = subprocess.run(
            ["flake8", "python", "tests"],
            capture_output=True,
            cwd=Path(__file__).parent.parent,
        )
        if p.returncode != 0:
            pytest.fail(
                "Flake 8 found issues: %s\n%s"
                % (p.stdout.decode("utf-8"), p.stderr.decode("utf-8"))
            )
