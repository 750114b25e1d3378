"""
Configuration for the channel reliability bounds toolkit.
"""

import os
from dataclasses import dataclass, field
from pathlib import Path

from dotenv import load_dotenv

# Load .env file
load_dotenv()


def _env_bool(name: str, default: bool) -> bool:
    raw = os.getenv(name)
    if raw is None:
        return default
    return raw.strip().lower() in ("1", "true", "yes", "on")


@dataclass
class Config:
    """Configuration with environment variable support."""

    # Product alphabets (kronecker, extension, gram, strong_product)
    size_cap: int = field(
        default_factory=lambda: int(os.getenv("RELIABILITY_SIZE_CAP", "4096"))
    )

    # Rho search for E_sp / E_r / E_ex
    rho_cap: float = field(
        default_factory=lambda: float(os.getenv("RELIABILITY_RHO_CAP", "64"))
    )
    rho_tolerance: float = 1e-9
    rho_max_iter: int = 200

    # E0 maximization over the input simplex
    e0_tolerance: float = 1e-9
    e0_max_iter: int = 10000

    # Blahut-Arimoto
    capacity_tolerance: float = 1e-10
    capacity_max_iter: int = 100000

    # Expurgation quadratic program
    qk_tolerance: float = 1e-8
    qk_max_iter: int = 20000
    exhaustive_support_max: int = 12  # |X|^k at or below this -> enumerate supports

    # Branch-and-bound for independence numbers
    independence_vertex_cap: int = field(
        default_factory=lambda: int(os.getenv("RELIABILITY_VERTEX_CAP", "64"))
    )

    # Oracle
    fictitious_play_iterations: int = 20000

    # Semi-decision
    semidecide_budget: int = field(
        default_factory=lambda: int(os.getenv("RELIABILITY_BUDGET", "500"))
    )

    # Sweep worker pool
    sweep_workers: int = field(
        default_factory=lambda: int(os.getenv("RELIABILITY_SWEEP_WORKERS", "4"))
    )

    # Logging
    log_level: str = field(
        default_factory=lambda: os.getenv("RELIABILITY_LOG_LEVEL", "WARNING")
    )
    log_runs: bool = field(
        default_factory=lambda: _env_bool("RELIABILITY_LOG_RUNS", False)
    )
    run_log_dir: Path = field(
        default_factory=lambda: Path(os.getenv("RELIABILITY_RUN_LOG_DIR", "./data/runs"))
    )

    def __post_init__(self):
        """Validate limits and ensure directories exist."""
        for name in ("size_cap", "e0_max_iter", "capacity_max_iter", "qk_max_iter",
                     "independence_vertex_cap", "fictitious_play_iterations",
                     "semidecide_budget", "sweep_workers", "rho_max_iter"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1, got {getattr(self, name)}")
        for name in ("rho_tolerance", "e0_tolerance", "capacity_tolerance", "qk_tolerance"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")
        if self.rho_cap <= 1:
            raise ValueError(f"rho_cap must be > 1, got {self.rho_cap}")

        self.run_log_dir = Path(self.run_log_dir)
        if self.log_runs:
            self.run_log_dir.mkdir(parents=True, exist_ok=True)
