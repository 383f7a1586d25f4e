import enum
from typing import Optional

from pydantic import BaseModel, Field


class VarianceReport(BaseModel):
    per_player_mean: list[float]
    per_player_variance: list[float]
    team_mean: float
    team_variance: float
    within_sum: float
    between_sum: float

    @property
    def n_players(self) -> int:
        return len(self.per_player_mean)


class IterationRecord(BaseModel):
    iteration: int
    policy: list[list[int]]
    team_mean: float
    team_variance: float
    per_player_pseudo_variance: list[float]
    per_player_variance: list[float]
    per_player_mean: list[float]
    # decisions the improvement step changed starting from this policy
    decisions_changed: int


class CertificateClass(str, enum.Enum):
    STRICT_LOCAL_MIN = "StrictLocalMin"
    FIRST_ORDER_STATIONARY = "FirstOrderStationary"


class DeviationViolation(BaseModel):
    player: int
    state: int
    action: int
    gap: float


class ConvergenceCertificate(BaseModel):
    satisfied_necessary_condition: list[list[bool]]
    violations: list[DeviationViolation] = Field(default_factory=list)
    min_directional_derivative: float
    classification: CertificateClass

    @property
    def n_violations(self) -> int:
        return len(self.violations)


class StartSummary(BaseModel):
    start: int
    seed_entropy: int
    spawn_key: list[int]
    initial_team_variance: Optional[float] = None
    final_team_variance: Optional[float] = None
    iterations: Optional[int] = None
    converged: bool = False
    error: Optional[str] = None


class PolicyValue(BaseModel):
    policy: list[list[int]]
    team_variance: float


class EnumerationResult(BaseModel):
    global_min_value: float
    argmin: list[list[list[int]]]
    table: Optional[list[PolicyValue]] = None
    evaluated: int
    skipped_multichain: int

    def value_of(self, policy: list[list[int]]) -> Optional[float]:
        for entry in self.table or []:
            if entry.policy == policy:
                return entry.team_variance
        return None


class SimulationEstimate(BaseModel):
    horizon: int = Field(ge=1)
    seed: int
    burn_in: int
    team_mean: float
    team_variance: float
    per_player_mean: list[float]
    team_mean_se: float = Field(ge=0.0)
    team_variance_se: float = Field(ge=0.0)
