"""Decentralized policy iteration on pseudo-variance costs.

Each iteration evaluates the joint policy once, broadcasts the team mean as the
coordination signal, and lets every player improve its own policy against its
own potential. Players never read each other's state, so the improvement step
is order independent.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from team_variance.exceptions import (
    MaxIterationsError,
    MonotonicityError,
    MultichainError,
    TeamVarianceError,
)
from team_variance.models.chain import ChainAnalysis
from team_variance.models.game import (
    ActionMap,
    DeterministicPolicy,
    GameModel,
    PlayerModel,
    random_policy,
)
from team_variance.schemas.report import (
    CertificateClass,
    ConvergenceCertificate,
    DeviationViolation,
    IterationRecord,
    StartSummary,
    VarianceReport,
)
from team_variance.services.variance_metrics import (
    player_derivative_terms,
    player_potential,
    team_metrics,
)
from team_variance.settings import Settings, get_settings
from team_variance.utils.decorators.validators import validate_args
from team_variance.utils.logging import get_logger

logger = get_logger(__name__)


@dataclass
class RunResult:
    policy: DeterministicPolicy
    records: list[IterationRecord]
    report: VarianceReport
    certificate: Optional[ConvergenceCertificate] = None
    converged: bool = False

    @property
    def iterations(self) -> int:
        """Improvement steps that changed the policy."""
        return max(len(self.records) - 1, 0)

    @property
    def initial_team_variance(self) -> float:
        return self.records[0].team_variance


@dataclass
class MultistartResult:
    summaries: list[StartSummary]
    runs: list[Optional[RunResult]] = field(default_factory=list)
    best_start: Optional[int] = None

    @property
    def best(self) -> Optional[RunResult]:
        return None if self.best_start is None else self.runs[self.best_start]


def improve_player(
    player: PlayerModel,
    u_i: ActionMap,
    mu_signal: float,
    settings: Optional[Settings] = None,
    analysis: Optional[ChainAnalysis] = None,
    player_index: Optional[int] = None,
) -> tuple[int, ...]:
    """One policy-improvement step for a single player.

    Minimizes (r(s, a) - mu)^2 + sum_s' p(s'|s, a) g(s') per state. Within
    ``tie_tol`` of the minimum the current action wins, then the lowest index.
    """
    settings = settings or get_settings()
    if analysis is None:
        analysis = player_potential(
            player, u_i, mu_signal, settings, player_index=player_index
        )
    g = analysis.potential
    improved = []
    for s in range(player.n_states):
        acts, rows, rewards = player.candidates(s)
        values = (rewards - mu_signal) ** 2 + rows @ g
        best = values.min()
        ties = [a for a, v in zip(acts, values) if v <= best + settings.tie_tol]
        improved.append(u_i[s] if u_i[s] in ties else min(ties))
    return tuple(int(a) for a in improved)


def _evaluate(
    game: GameModel,
    policy: DeterministicPolicy,
    iteration: int,
    previous: Optional[DeterministicPolicy],
    settings: Settings,
) -> tuple[VarianceReport, list[ChainAnalysis]]:
    try:
        report = team_metrics(game, policy, settings)
        analyses = [
            player_potential(player, policy[i], report.team_mean, settings, player_index=i)
            for i, player in enumerate(game.players)
        ]
    except MultichainError as e:
        state = None
        if previous is not None and e.player is not None:
            changed = [
                s
                for s, (a, b) in enumerate(zip(previous[e.player], policy[e.player]))
                if a != b
            ]
            state = changed[0] if changed else None
        raise e.attribute(iteration=iteration, state=state) from None
    return report, analyses


def _check_monotone(
    previous_variance: float,
    report: VarianceReport,
    previous: DeterministicPolicy,
    policy: DeterministicPolicy,
    analyses: list[ChainAnalysis],
    iteration: int,
    settings: Settings,
) -> None:
    tol = settings.monotonicity_tol * max(1.0, abs(previous_variance))
    step = report.team_variance - previous_variance
    if step < -tol:
        return
    if step > tol:
        raise MonotonicityError(
            f"team variance rose from {previous_variance!r} to "
            f"{report.team_variance!r} at iteration {iteration}"
        )
    # Flat step: only legal when every changed decision is transient under the new policy.
    recurrent_changes = [
        (i, s)
        for i in range(len(policy))
        for s, (a, b) in enumerate(zip(previous[i], policy[i]))
        if a != b and analyses[i].recurrent_mask[s]
    ]
    if recurrent_changes:
        raise MonotonicityError(
            f"team variance did not decrease at iteration {iteration} although "
            f"recurrent decisions {recurrent_changes} changed"
        )
    logger.warning(
        "Improvement changed only transient decisions",
        iteration=iteration,
        team_variance=report.team_variance,
    )


def _record(
    iteration: int,
    policy: DeterministicPolicy,
    report: VarianceReport,
    analyses: list[ChainAnalysis],
    decisions_changed: int,
) -> IterationRecord:
    return IterationRecord(
        iteration=iteration,
        policy=policy.to_list(),
        team_mean=report.team_mean,
        team_variance=report.team_variance,
        per_player_pseudo_variance=[a.avg_cost for a in analyses],
        per_player_variance=report.per_player_variance,
        per_player_mean=report.per_player_mean,
        decisions_changed=decisions_changed,
    )


@validate_args({"max_iters": {"min": {"value": 1}}})
def run_algorithm1(
    game: GameModel,
    init: DeterministicPolicy,
    max_iters: Optional[int] = None,
    settings: Optional[Settings] = None,
) -> RunResult:
    """Evaluate / improve until the joint policy stops changing.

    ``max_iters`` bounds the number of policy evaluations.
    """
    settings = settings or get_settings()
    if max_iters is None:
        max_iters = settings.default_max_iters
    game.validate_policy(init)

    policy = init
    previous: Optional[DeterministicPolicy] = None
    records: list[IterationRecord] = []
    report: Optional[VarianceReport] = None

    for iteration in range(max_iters):
        report, analyses = _evaluate(game, policy, iteration, previous, settings)
        if records:
            _check_monotone(
                records[-1].team_variance,
                report,
                previous,
                policy,
                analyses,
                iteration,
                settings,
            )

        # the team mean is the only quantity shared between players
        mu_signal = report.team_mean
        improved = DeterministicPolicy(
            tuple(
                improve_player(
                    player,
                    policy[i],
                    mu_signal,
                    settings,
                    analysis=analyses[i],
                    player_index=i,
                )
                for i, player in enumerate(game.players)
            )
        )
        changed = policy.count_changes(improved)
        records.append(_record(iteration, policy, report, analyses, changed))
        logger.debug(
            "Policy iteration step",
            iteration=iteration,
            team_mean=report.team_mean,
            team_variance=report.team_variance,
            decisions_changed=changed,
        )

        if changed == 0:
            certificate = check_necessary_condition(game, policy, settings)
            logger.info(
                "Policy iteration converged",
                iterations=len(records) - 1,
                team_variance=report.team_variance,
                classification=certificate.classification.value,
            )
            return RunResult(
                policy=policy,
                records=records,
                report=report,
                certificate=certificate,
                converged=True,
            )
        previous, policy = policy, improved

    raise MaxIterationsError(
        f"no fixed point within {max_iters} evaluations",
        result=RunResult(
            policy=DeterministicPolicy(tuple(map(tuple, records[-1].policy))),
            records=records,
            report=report,
            converged=False,
        ),
    )


def check_necessary_condition(
    game: GameModel, u: DeterministicPolicy, settings: Optional[Settings] = None
) -> ConvergenceCertificate:
    """Elementwise optimality check plus derivatives along single-decision deviations.

    Deviating player i at state s to action a moves J_sigma at rate
    pi_i(s) times the bracket of the derivative formula at (s, a).
    """
    settings = settings or get_settings()
    game.validate_policy(u)
    mu = team_metrics(game, u, settings).team_mean

    satisfied: list[list[bool]] = []
    violations: list[DeviationViolation] = []
    min_derivative = float("inf")
    for i, player in enumerate(game.players):
        analysis = player_potential(player, u[i], mu, settings, player_index=i)
        terms = player_derivative_terms(player, u[i], mu, analysis, player_index=i)
        ok = [True] * player.n_states
        for (s, a), gap in terms.items():
            if a == u[i][s]:
                continue
            if gap < -settings.tie_tol:
                ok[s] = False
                violations.append(DeviationViolation(player=i, state=s, action=a, gap=gap))
            min_derivative = min(min_derivative, float(analysis.pi[s]) * gap)
        satisfied.append(ok)

    classification = (
        CertificateClass.STRICT_LOCAL_MIN
        if min_derivative > settings.certificate_tol
        else CertificateClass.FIRST_ORDER_STATIONARY
    )
    return ConvergenceCertificate(
        satisfied_necessary_condition=satisfied,
        violations=violations,
        min_directional_derivative=min_derivative,
        classification=classification,
    )


def _run_start(
    game: GameModel,
    start: int,
    seed_seq: np.random.SeedSequence,
    max_iters: Optional[int],
    settings: Settings,
) -> tuple[StartSummary, Optional[RunResult]]:
    rng = np.random.default_rng(seed_seq)
    init = random_policy(game, rng)
    summary = StartSummary(
        start=start,
        seed_entropy=int(seed_seq.entropy),
        spawn_key=list(seed_seq.spawn_key),
    )
    try:
        result = run_algorithm1(game, init, max_iters=max_iters, settings=settings)
    except MaxIterationsError as e:
        result = e.result
        summary.error = e.detail
    except TeamVarianceError as e:
        logger.warning("Start failed", start=start, error=e.detail)
        summary.error = e.detail
        return summary, None

    summary.initial_team_variance = result.initial_team_variance
    summary.final_team_variance = result.report.team_variance
    summary.iterations = result.iterations
    summary.converged = result.converged
    return summary, result


@validate_args(
    {
        "n_starts": {"required": True, "min": {"value": 1}},
        "max_iters": {"min": {"value": 1}},
    }
)
def multistart(
    game: GameModel,
    n_starts: int,
    seed: int,
    max_iters: Optional[int] = None,
    settings: Optional[Settings] = None,
) -> MultistartResult:
    """Run policy iteration from ``n_starts`` seeded random initial policies.

    Start k draws its policy from child k of ``SeedSequence(seed)``, so the
    outcome does not depend on how starts are scheduled.
    """
    settings = settings or get_settings()
    children = np.random.SeedSequence(seed).spawn(n_starts)

    def run(start: int):
        return _run_start(game, start, children[start], max_iters, settings)

    if settings.max_workers > 1:
        with ThreadPoolExecutor(max_workers=settings.max_workers) as pool:
            outcomes = list(pool.map(run, range(n_starts)))
    else:
        outcomes = [run(start) for start in range(n_starts)]

    summaries = [summary for summary, _ in outcomes]
    runs = [result for _, result in outcomes]
    converged = [k for k, s in enumerate(summaries) if s.converged]
    best_start = (
        min(converged, key=lambda k: (summaries[k].final_team_variance, k))
        if converged
        else None
    )
    logger.info(
        "Multistart finished",
        n_starts=n_starts,
        converged=len(converged),
        best_start=best_start,
    )
    return MultistartResult(summaries=summaries, runs=runs, best_start=best_start)


def solve_pseudo_mdp(
    player: PlayerModel,
    y: float,
    init: Optional[ActionMap] = None,
    max_iters: int = 1000,
    settings: Optional[Settings] = None,
    player_index: Optional[int] = None,
) -> tuple[tuple[int, ...], float]:
    """Minimize one player's pseudo variance for a fixed y (average-cost policy iteration)."""
    settings = settings or get_settings()
    u_i = tuple(init) if init is not None else tuple(a[0] for a in player.admissible)
    for _ in range(max_iters):
        analysis = player_potential(player, u_i, y, settings, player_index=player_index)
        improved = improve_player(
            player, u_i, y, settings, analysis=analysis, player_index=player_index
        )
        if improved == u_i:
            return u_i, analysis.avg_cost
        u_i = improved
    raise MaxIterationsError(f"pseudo-variance MDP did not converge in {max_iters} steps")


def inner_problem_value(
    game: GameModel, y: float, settings: Optional[Settings] = None
) -> tuple[float, DeterministicPolicy]:
    """Value of the decoupled inner level: sum over players of min pseudo variance at y."""
    settings = settings or get_settings()
    solutions = [
        solve_pseudo_mdp(player, y, settings=settings, player_index=i)
        for i, player in enumerate(game.players)
    ]
    return (
        float(sum(value for _, value in solutions)),
        DeterministicPolicy(tuple(u_i for u_i, _ in solutions)),
    )
