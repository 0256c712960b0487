"""
The command line
================

Every capability is reachable from JSON problem files.  This script runs
the CLI on a small problem and prints the pieces of each result.
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

problem = {"group": {"family": "SU", "n": 3}, "F": [1.0, 0.2, -1.2], "A": [0.3, 0.0, -0.3],
           "Y": [0.5, -0.9, 0.4], "mc_samples": 50_000, "seed": 7}

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "problem.json"
    path.write_text(json.dumps(problem))
    for command in ["integrate", "membership", "solve", "validate"]:
        res = subprocess.run([sys.executable, "-m", "maxent_orbits", "--input", str(path), "--command", command],
                             capture_output=True, text=True)
        out = json.loads(res.stdout)["result"]
        keys = {"integrate": "log_value", "membership": "status", "solve": "Y_opt", "validate": "pass"}
        print(f"{command:>10} (exit {res.returncode}): {keys[command]} = {out[keys[command]]}")

    # errors come back as a code on stderr and a nonzero exit status
    path.write_text(json.dumps({"group": {"family": "SOeven", "n": 1}, "F": [1.0]}))
    res = subprocess.run([sys.executable, "-m", "maxent_orbits", "--input", str(path), "--command", "integrate"],
                         capture_output=True, text=True)
    print(f"degenerate group: exit {res.returncode}, {res.stderr.strip()}")
