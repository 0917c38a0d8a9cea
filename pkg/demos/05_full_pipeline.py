"""
The whole pipeline in one call
==============================

Equivalent to ``profilecast run --input <csv> --format markdown``.
"""

from profilecast.config import Config
from profilecast.report import render_report, run_pipeline

from _data import input_csv

config = Config(input=str(input_csv()), seed=42, k=4)
report = run_pipeline(config)
print(render_report(report, "markdown").decode())

# The JSON rendering is the canonical artifact; it echoes the full config, so
# feeding report.config back reproduces the run byte for byte.
replay = run_pipeline(Config.from_dict(report.config))
assert render_report(replay) == render_report(report)
print("replay from config echo: identical")
