import subprocess
import sys
from pathlib import Path

SCRIPT = Path(__file__).resolve().parents[1] / "benchmarks" / "bench_kernels.py"


def test_benchmark_runs():
    r = subprocess.run(
        [sys.executable, str(SCRIPT), "--spins", "8", "--reads", "4", "--repeat", "1"],
        capture_output=True,
        text=True,
        timeout=300,
    )
    assert r.returncode == 0, r.stderr
    assert "enumerate 2^8 energies" in r.stdout
