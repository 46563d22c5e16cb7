"""Driving the experiment runner from Python.

Each subcommand writes a CSV table, a summary and the resolved configuration
to the output directory, and returns 0 when every verdict passes.
"""

import tempfile
from pathlib import Path

from conicres.cli import run

with tempfile.TemporaryDirectory() as tmp:
    code = run(["indicial", "--out", tmp, "--set", "modes=0,1,2"])
    print("exit code", code)
    for path in sorted(Path(tmp).iterdir()):
        print(f"--- {path.name}")
        print(path.read_text())
