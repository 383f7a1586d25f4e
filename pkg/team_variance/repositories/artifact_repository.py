import csv
import io
from pathlib import Path
from typing import Iterable

from team_variance.schemas.report import IterationRecord
from team_variance.schemas.run import RunSummary

TRACE_FILENAME = "trace.csv"
SUMMARY_FILENAME = "summary.json"


def format_number(value: float) -> str:
    return f"{value:.12g}"


def trace_columns(n_players: int) -> list[str]:
    players = range(1, n_players + 1)
    return (
        ["run_id", "iteration", "team_mean", "team_variance"]
        + [f"pseudo_variance_{i}" for i in players]
        + [f"variance_{i}" for i in players]
        + [f"mean_{i}" for i in players]
        + ["decisions_changed"]
    )


def render_trace(
    n_players: int, runs: Iterable[tuple[int, list[IterationRecord]]]
) -> str:
    """CSV text for the per-iteration trace, one block per run."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(trace_columns(n_players))
    for run_id, records in runs:
        for record in records:
            writer.writerow(
                [run_id, record.iteration]
                + [format_number(record.team_mean), format_number(record.team_variance)]
                + [format_number(v) for v in record.per_player_pseudo_variance]
                + [format_number(v) for v in record.per_player_variance]
                + [format_number(v) for v in record.per_player_mean]
                + [record.decisions_changed]
            )
    return buffer.getvalue()


class ArtifactRepository:
    def __init__(self, out_dir: Path):
        self.out_dir = Path(out_dir)

    def write_trace(
        self, n_players: int, runs: Iterable[tuple[int, list[IterationRecord]]]
    ) -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        path = self.out_dir / TRACE_FILENAME
        path.write_text(render_trace(n_players, runs), encoding="utf-8")
        return path

    def write_summary(self, summary: RunSummary) -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        path = self.out_dir / SUMMARY_FILENAME
        path.write_text(summary.model_dump_json(indent=2), encoding="utf-8")
        return path


def get_artifact_repository(out_dir: Path) -> ArtifactRepository:
    return ArtifactRepository(out_dir=out_dir)
