"""Error hierarchy.

Every error carries a human-readable ``detail`` and the process exit code the
CLI maps it to (2 parse error, 3 numerical error, 4 no convergence).
"""

from typing import Any, Optional

EXIT_PARSE_ERROR = 2
EXIT_NUMERICAL_ERROR = 3
EXIT_NO_CONVERGENCE = 4


class TeamVarianceError(Exception):
    exit_code: int = EXIT_NUMERICAL_ERROR

    def __init__(self, detail: str, exit_code: Optional[int] = None):
        super().__init__(detail)
        self.detail = detail
        if exit_code is not None:
            self.exit_code = exit_code


class InvalidArgumentError(TeamVarianceError):
    exit_code = EXIT_PARSE_ERROR


class BadParamsError(TeamVarianceError):
    exit_code = EXIT_PARSE_ERROR


class ScenarioParseError(TeamVarianceError):
    exit_code = EXIT_PARSE_ERROR

    def __init__(
        self,
        detail: str,
        line: Optional[int] = None,
        field: Optional[str] = None,
    ):
        context = []
        if line is not None:
            context.append(f"line {line}")
        if field:
            context.append(f"field {field}")
        message = f"{detail} ({', '.join(context)})" if context else detail
        super().__init__(message)
        self.line = line
        self.field = field


class MultichainError(TeamVarianceError):
    """The chain induced by a policy has more than one closed class."""

    def __init__(
        self,
        detail: str = "chain has more than one closed communicating class",
        player: Optional[int] = None,
        iteration: Optional[int] = None,
        state: Optional[int] = None,
    ):
        context = []
        if player is not None:
            context.append(f"player {player}")
        if iteration is not None:
            context.append(f"iteration {iteration}")
        if state is not None:
            context.append(f"state {state}")
        message = f"{detail} [{', '.join(context)}]" if context else detail
        super().__init__(message)
        self.player = player
        self.iteration = iteration
        self.state = state

    def attribute(
        self,
        player: Optional[int] = None,
        iteration: Optional[int] = None,
        state: Optional[int] = None,
    ) -> "MultichainError":
        """Return a copy enriched with the caller's context."""
        base = str(self).split(" [", 1)[0]
        return MultichainError(
            base,
            player=self.player if player is None else player,
            iteration=self.iteration if iteration is None else iteration,
            state=self.state if state is None else state,
        )


class SingularSystemError(TeamVarianceError):
    pass


class InadmissibleActionError(TeamVarianceError):
    exit_code = EXIT_PARSE_ERROR

    def __init__(self, player: Optional[int], state: int, action: Any):
        who = f"player {player}, " if player is not None else ""
        super().__init__(f"action {action!r} is not admissible ({who}state {state})")
        self.player = player
        self.state = state
        self.action = action


class AnalysisMismatchError(TeamVarianceError):
    pass


class EnumerationTooLargeError(TeamVarianceError):
    exit_code = EXIT_PARSE_ERROR

    def __init__(self, size: int, cap: int):
        super().__init__(f"policy space has {size} joint policies, cap is {cap}")
        self.size = size
        self.cap = cap


class MonotonicityError(TeamVarianceError):
    pass


class MaxIterationsError(TeamVarianceError):
    exit_code = EXIT_NO_CONVERGENCE

    def __init__(self, detail: str, result: Any = None):
        super().__init__(detail)
        # partial RunResult, trace included
        self.result = result
