"""Shared helper: the CSV named on the command line, or a synthetic export."""

import sys
import tempfile
from pathlib import Path

from profilecast.synthetic import write_daily_activity_csv


def input_csv():
    if len(sys.argv) > 1:
        return Path(sys.argv[1])
    out = Path(tempfile.mkdtemp()) / "dailyActivity_synthetic.csv"
    print(f"(no CSV given; using synthetic data at {out})\n")
    return write_daily_activity_csv(out, seed=7)
