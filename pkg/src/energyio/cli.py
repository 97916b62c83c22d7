"""Command-line entry point.

Exit codes: 0 success, 1 validation failure, 2 configuration or I/O error.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys

from .errors import ConfigError, DataFormatError, ReportError
from .report import (FORMATS, load_config, process_year, render_ranking, render_reports,
                     render_trend, run_pipeline, _full)

EXIT_OK, EXIT_VALIDATION, EXIT_CONFIG = 0, 1, 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="energyio",
        description="Sectoral direct, indirect and total energy intensities from input-output tables.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("config", help="YAML run configuration")
        p.add_argument("--balance-tol", type=float, default=None,
                       help="override balance_rel_tol from the config")
        return p

    add("validate", "check accounting balances and productivity for every year")
    add("intensities", "print per-sector intensities for every year as CSV")
    rank = add("rank", "print the ranking of the most intensive non-energy sectors")
    rank.add_argument("--top", type=int, default=None, help="number of sectors (default: config)")
    add("trend", "print the aggregate intensity trend")
    run = add("run", "run the full pipeline and write all reports")
    run.add_argument("--format", choices=FORMATS, default=None, help="report format (default: config)")
    run.add_argument("--out", default="reports", help="output directory (default: ./reports)")
    run.add_argument("--workers", type=int, default=1, help="years processed in parallel")
    return parser


def _validate(config, out) -> int:
    status = EXIT_OK
    for year in config.years:
        result = process_year(config, year)
        print(f"[{year}] {result.balance.summary()}", file=out)
        worst_row = max(abs(result.balance.row_residuals / result.table.total_output))
        worst_col = max(abs(result.balance.col_residuals / result.table.total_output))
        print(f"[{year}] max relative residual: row {worst_row:.3e}, column {worst_col:.3e}", file=out)
        if result.coefficients is not None:
            print(f"[{year}] Hawkins-Simon: {result.coefficients.productivity.detail}", file=out)
        if not result.ok:
            print(f"[{year}] FAIL: {result.error}", file=out)
            status = EXIT_VALIDATION
        else:
            print(f"[{year}] ok", file=out)
    return status


def _report_failures(result) -> int:
    for y in result.failures:
        print(f"validation failed: {y.error}", file=sys.stderr)
    return EXIT_VALIDATION


def _intensities(result, out) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["year", "code", "name", "is_energy", "direct", "indirect", "total",
                     "direct_share_pct"])
    for y in result.years:
        s = y.intensities
        share = s.share
        for sec in s.sectors:
            k = sec.index
            writer.writerow([y.year, sec.code, sec.name, str(sec.is_energy).lower(),
                             _full(s.direct[k]), _full(s.indirect[k]), _full(s.total[k]),
                             _full(share[k])])


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    out = sys.stdout
    try:
        config = load_config(args.config)
        if getattr(args, "top", None) is not None and args.top < 1:
            raise ConfigError("--top must be at least 1")
        if args.balance_tol is not None:
            config = config.replace(balance_rel_tol=args.balance_tol)
        if args.command == "validate":
            return _validate(config, out)

        result = run_pipeline(config, workers=getattr(args, "workers", 1))
        if not result.ok:
            return _report_failures(result)
        if args.command == "intensities":
            _intensities(result, out)
        elif args.command == "rank":
            out.write(render_ranking(result.ranking(args.top), "markdown"))
        elif args.command == "trend":
            out.write(render_trend(result, "markdown"))
        elif args.command == "run":
            fmt = args.format or config.output_format
            for path in render_reports(result, args.out, fmt):
                print(path, file=out)
        return EXIT_OK
    except (ConfigError, DataFormatError, ReportError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
