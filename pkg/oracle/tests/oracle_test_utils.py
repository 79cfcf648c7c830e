import subprocess
import sys


def run_fsharm(args):
    """Invoke the fast-solver command-line tool as a subprocess; the oracle
    talks to it only through files."""
    result = subprocess.run(
        [sys.executable, "-m", "fsharm.cli", *args],
        capture_output=True, text=True,
    )
    if result.returncode != 0:
        raise RuntimeError(f"fsharm {args[0]} failed: {result.stderr}")
    return result
