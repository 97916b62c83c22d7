"""Exit criteria for the package; each test prints one PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v``; the lines are also
repeated in the terminal summary.
"""

import csv
import filecmp
import subprocess
import sys
import time

import numpy as np

from conftest import ACCEPTANCE_LINES
from energyio import (CoefficientMatrix, EnergyAccount, NonProductiveError, PricingError,
                      compute_intensities, direct_share, energy_prices, leontief_inverse,
                      leontief_series_oracle, rank_sectors, sector_energy_price,
                      technical_coefficients, trend_report)
from energyio.datasets import synthetic5_config, synthetic5_dir
from energyio.io_core import EconomyTable, SectorCatalog
from energyio.synthetic import random_coefficients, synthetic_economy


def check(label, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_ac1_leontief_matches_power_series():
    rng = np.random.default_rng(1)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(100):
        a = random_coefficients(rng, 10, max_column_sum=0.9)
        diff = np.max(np.abs(leontief_inverse(a).values - leontief_series_oracle(a, 200)))
        worst = max(worst, diff)
    elapsed = time.perf_counter() - start
    check("AC1 Leontief vs sum A^k (k<=200), 100 economies n=10",
          worst < 1e-8 and elapsed < 2.0, f"max diff {worst:.2e} (< 1e-8), {elapsed:.3f}s (< 2s)")


def _random_case(rng, n):
    """A random economy plus energy account; some draws are sparse or nearly closed."""
    max_col = rng.choice([0.3, 0.9, 0.99, 0.999])
    table = synthetic_economy(rng, n, n_energy=int(rng.integers(1, n)), max_column_sum=max_col)
    if rng.random() < 0.3:
        # knock out flows so some sectors buy nothing from anyone
        z = np.array(table.flows) * (rng.random((n, n)) < 0.3)
        x = table.total_output
        table = EconomyTable(table.sectors, z, np.maximum(x - z.sum(axis=1), 0), table.imports,
                             x - z.sum(axis=0), x)
    energy = rng.uniform(0.1, 50.0, n)
    return table, EnergyAccount(table.sectors, energy)


def test_ac2_closure_is_exact():
    rng = np.random.default_rng(2)
    violations = 0
    trials = 300
    for _ in range(trials):
        n = int(rng.integers(2, 51))
        s, _, _ = compute_intensities(*_random_case(rng, n))
        violations += int(np.count_nonzero(s.total - s.direct - s.indirect))
    check("AC2 total - direct - indirect == 0 exactly", violations == 0,
          f"{violations} nonzero entries over {trials} economies, n in [2, 50]")


def test_ac3_indirect_nonnegative():
    rng = np.random.default_rng(3)
    violations = 0
    trials = 1000
    for _ in range(trials):
        n = int(rng.integers(2, 51))
        s, _, _ = compute_intensities(*_random_case(rng, n))
        violations += int(np.count_nonzero(s.indirect < 0))
    check("AC3 indirect intensity >= 0", violations == 0,
          f"{violations} negative entries over {trials} productive economies")


def _raw_fixture(year):
    """Direct intensities and A rebuilt from the CSV text with plain Python."""
    base = synthetic5_dir()
    with open(base / "sectors.csv") as fh:
        sectors = list(csv.DictReader(fh))
    codes = [s["code"] for s in sectors]
    energy_codes = [s["code"] for s in sectors if s["is_energy"] == "true"]
    with open(base / str(year) / "flows.csv") as fh:
        z = {r["code"]: {c: float(r[c]) for c in codes} for r in csv.DictReader(fh)}
    with open(base / str(year) / "accounts.csv") as fh:
        acc = {r["code"]: r for r in csv.DictReader(fh)}
    with open(base / str(year) / "energy.csv") as fh:
        e = {r["code"]: float(r["energy_use"]) for r in csv.DictReader(fh)}
    x = {c: float(acc[c]["total_output"]) for c in codes}
    prices = [e[k] / (x[k] - float(acc[k]["imports"])) for k in energy_codes]
    p = sum(prices) / len(prices)
    direct = [sum(z[k][j] * p for k in energy_codes) / x[j] for j in codes]
    a = [[z[i][j] / x[j] for j in codes] for i in codes]
    return direct, a


def test_ac4_brute_force_embodied_energy(bundled_config):
    from energyio.report import load_year
    worst = 0.0
    for year in (2005, 2011):
        direct, a = _raw_fixture(year)
        n = len(direct)
        # embodied energy after k rounds of the supply chain: d A^k, accumulated
        layer = list(direct)
        total = list(direct)
        for _ in range(500):
            layer = [sum(layer[i] * a[i][j] for i in range(n)) for j in range(n)]
            total = [t + v for t, v in zip(total, layer)]
        s, _, _ = compute_intensities(*load_year(bundled_config, year))
        worst = max(worst, max(abs(u - v) for u, v in zip(s.total, total)))
    check("AC4 Leontief total vs 500-round supply-chain propagation", worst < 1e-9,
          f"max diff {worst:.2e} (< 1e-9) on the bundled 5-sector fixture, 2005 and 2011")


def test_ac5_published_share_arithmetic():
    transport, food = direct_share([232.2, 9.2], [339.9, 109.7])
    ok = abs(transport - 68.3) <= 0.05 and abs(food - 8.4) <= 0.05
    check("AC5 direct share vs printed ratios", ok,
          f"transport {transport:.3f}% (68.3 +/- 0.05), food {food:.3f}% (8.4 +/- 0.05)")


def test_ac6_trend_endpoints():
    change = trend_report([3.73, 4.13]).percent_change
    # the text says 10.9 percent; its own endpoints give 10.72, a rounding gap in the source
    check("AC6 trend 3.73 -> 4.13", abs(change - 10.7) <= 0.1, f"{change:+.3f}% (10.7 +/- 0.1)")


def _share_columns(markdown):
    rows = [line.split("|") for line in markdown.splitlines() if line.startswith("| ")]
    # cells: '', name, direct_y1, share_y1, direct_y2, share_y2, ''
    return [row[3:-1:2] for row in rows]


def test_ac7_currency_rescaling(bundled_config):
    from energyio.report import load_year, ranking_table, render_direct_share
    c = 1000.0
    details = []
    ok = True
    sets, scaled_sets = [], []
    for year in (2005, 2011):
        table, account = load_year(bundled_config, year)
        big = table.scaled(c)
        same_a = np.array_equal(technical_coefficients(table).values, technical_coefficients(big).values)
        s, _, _ = compute_intensities(table, account)
        t, _, _ = compute_intensities(big, account)
        sets.append(s)
        scaled_sets.append(t)
        nz = s.indirect > 0
        rel = max(float(np.max(np.abs(t.direct * c / s.direct - 1))),
                  float(np.max(np.abs(t.total * c / s.total - 1))),
                  float(np.max(np.abs(t.indirect[nz] * c / s.indirect[nz] - 1))))
        same_ranks = ([r.code for r in rank_sectors(s.total, s.sectors)]
                      == [r.code for r in rank_sectors(t.total, t.sectors)])
        share_rel = float(np.max(np.abs(t.share / s.share - 1)))
        ok &= same_a and same_ranks and rel <= 1e-12 and share_rel <= 1e-12
        details.append(f"{year}: A identical={same_a}, ranks identical={same_ranks}, "
                       f"intensity rel err {rel:.1e}, share rel err {share_rel:.1e}")
    same_table = (_share_columns(render_direct_share(ranking_table(sets), "markdown"))
                  == _share_columns(render_direct_share(ranking_table(scaled_sets), "markdown")))
    ok &= same_table
    details.append(f"reported share columns identical={same_table}")
    check("AC7 x1000 currency rescaling", ok, "; ".join(details))


def _raised(fn, error):
    try:
        fn()
    except error as exc:
        return True, f"{error.__name__} ({exc})"
    return False, "returned a result"


def test_ac8_degenerate_inputs():
    catalog = SectorCatalog.from_records([("E", "Energy", True), ("G", "Goods", False)])
    # energy sector: output 7 = 2 intermediate + 20 final - 15 imports
    table = EconomyTable(catalog, [[1, 1], [1, 1]], [20, 10], [15, 0], [5, 10], [7, 12])
    cases = {
        "A=I": _raised(lambda: leontief_inverse(CoefficientMatrix(np.eye(3))), NonProductiveError),
        "imports > output": _raised(lambda: energy_prices(table, EnergyAccount(catalog, [5, 0])),
                                    PricingError),
        "imports > output (single price)": _raised(lambda: sector_energy_price(10, 100, 150),
                                                   PricingError),
    }
    check("AC8 degenerate inputs raise", all(ok for ok, _ in cases.values()),
          "; ".join(f"{k} -> {msg}" for k, (_, msg) in cases.items()))


def test_ac9_end_to_end_determinism(tmp_path):
    outputs, times = [], []
    for k in range(2):
        out = tmp_path / f"run{k}"
        start = time.perf_counter()
        proc = subprocess.run([sys.executable, "-m", "energyio", "run", str(synthetic5_config()),
                               "--out", str(out)], capture_output=True, text=True)
        times.append(time.perf_counter() - start)
        assert proc.returncode == 0, proc.stderr
        outputs.append(out)
    names = sorted(p.name for p in outputs[0].iterdir())
    match, mismatch, errors = filecmp.cmpfiles(outputs[0], outputs[1], names, shallow=False)
    ok = len(names) == 4 and not mismatch and not errors and max(times) < 5.0
    check("AC9 `run` determinism", ok,
          f"{len(match)}/{len(names)} report files byte-identical, run times "
          f"{times[0]:.2f}s and {times[1]:.2f}s (< 5s)")
