"""Energy input-output analysis: sectoral direct, indirect and total energy intensities."""

from .energy import (EnergyAccount, EnergyFlowTable, EnergyPriceVector, build_energy_flow_table,
                     energy_prices, intermediate_demand_share, load_energy_account,
                     sector_energy_price, uniform_energy_price)
from .errors import (ConfigError, DataFormatError, EnergyIOError, NonProductiveError, PricingError,
                     ReportError, SolveError)
from .intensity import (AggregateIntensity, IntensitySet, aggregate_intensity, compute_intensities,
                        direct_intensity, direct_share, indirect_intensity, total_intensity)
from .io_core import (BalanceReport, CoefficientMatrix, EconomyTable, LeontiefInverse, Sector,
                      SectorCatalog, hawkins_simon_check, leontief_inverse, leontief_series_oracle,
                      load_economy_table, load_sector_catalog, solve_output,
                      technical_coefficients, validate_balances)
from .report import (PipelineResult, RankingTable, RunConfig, TrendSeries, load_config,
                     rank_sectors, ranking_table, render_reports, run_pipeline, trend_report)

__version__ = "0.1.0"
