"""
Rankings, shares and the aggregate trend
========================================

"""

import tempfile
from pathlib import Path

from energyio import load_config, render_reports, run_pipeline, trend_report
from energyio.datasets import synthetic5_config
from energyio.report import render_ranking

result = run_pipeline(load_config(synthetic5_config()))
print(result.ok)

# Non-energy sectors ordered by total intensity in the latest year
print(render_ranking(result.ranking(), "markdown"))

for y in result.years:
    print(y.year, y.aggregate.basis, round(y.aggregate.value, 2), round(y.intermediate_share, 3))

t = result.trend()
print(t.years, t.percent_change)

# The trend helper works on any pair of endpoints, e.g. 3.73 -> 4.13
print(trend_report([3.73, 4.13]).percent_change)

# Write all four reports; the CLI `energyio run` does the same thing
out = Path(tempfile.mkdtemp())
for p in render_reports(result, out, "markdown"):
    print(p.name)
print((out / "trend.md").read_text())
