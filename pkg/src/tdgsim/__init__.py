"""Deterministic simulator of a volunteer desktop-computing grid.

Compares a centralized assignment/work/collection-server topology with a
trust-based grid: reputation-driven replication, three distribution
strategies, explicit trust communities with manager election, and a
hash-chained credit ledger.
"""

from .config import ScenarioConfig
from .scenario import parse_scenario, run

__all__ = ["ScenarioConfig", "parse_scenario", "run"]
__version__ = "0.1.0"
