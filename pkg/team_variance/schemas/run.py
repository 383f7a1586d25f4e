from pathlib import Path
from typing import Optional

from pydantic import BaseModel, Field

from team_variance.schemas.report import (
    ConvergenceCertificate,
    SimulationEstimate,
    StartSummary,
)


class RunConfig(BaseModel):
    scenario: str = "microgrid"
    seed: int = Field(default=0, ge=0, lt=2**64)
    n_starts: int = Field(default=1, ge=1)
    max_iters: int = Field(default=50, ge=1)
    tie_tol: Optional[float] = Field(default=None, gt=0.0)
    solve_tol: Optional[float] = Field(default=None, gt=0.0)
    out: Path = Path("out")
    oracle: bool = False
    simulate: Optional[int] = Field(default=None, ge=1)


class OracleComparison(BaseModel):
    global_min_value: float
    argmin: list[list[list[int]]]
    evaluated: int
    skipped_multichain: int
    best_run_matches: bool


class SimulationComparison(BaseModel):
    estimate: SimulationEstimate
    analytic_team_mean: float
    analytic_team_variance: float
    within_three_se: bool


class RunSummary(BaseModel):
    scenario: str
    seed: int
    n_starts: int
    max_iters: int
    converged_starts: int
    best_start: Optional[int] = None
    best_policy: Optional[list[list[int]]] = None
    best_team_mean: Optional[float] = None
    best_team_variance: Optional[float] = None
    best_iterations: Optional[int] = None
    certificate: Optional[ConvergenceCertificate] = None
    starts: list[StartSummary] = Field(default_factory=list)
    timing_seconds: float
    oracle: Optional[OracleComparison] = None
    simulation: Optional[SimulationComparison] = None
