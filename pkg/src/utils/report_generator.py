"""Run artifacts: per-job JSON, summary CSV, plot data and a markdown digest"""

import json
from datetime import datetime
from pathlib import Path
from typing import Optional

import pandas as pd

from src.models.schemas import JobReport, MarginProfile, SeminormValue


class RunReportWriter:
    """
    Write everything a scenario run produces under one output directory

    Reports are deterministic; wall-clock data goes to meta.json only.
    """

    def __init__(self, out_dir: str):
        self.out_dir = Path(out_dir)
        self.plots_dir = self.out_dir / "plots"

    def prepare(self) -> None:
        self.plots_dir.mkdir(parents=True, exist_ok=True)

    def write_job_report(self, report: JobReport) -> Path:
        path = self.out_dir / f"report_{report.job_id}.json"
        payload = report.model_dump(mode="json")
        path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")
        return path

    def write_plot(self, name: str, frame: pd.DataFrame) -> Path:
        path = self.plots_dir / f"{name}.csv"
        frame.to_csv(path, index=False)
        return path

    def summary_frame(self, reports: list[JobReport]) -> pd.DataFrame:
        return pd.DataFrame(
            [
                {
                    "job_id": r.job_id,
                    "kind": r.kind,
                    "family": r.family or "",
                    "function": r.function or "",
                    "constant": r.constant,
                    "margin": r.margin,
                    "passed": r.passed,
                    "message": r.message,
                }
                for r in reports
            ],
            columns=["job_id", "kind", "family", "function", "constant", "margin", "passed", "message"],
        )

    def write_summary(self, reports: list[JobReport]) -> Path:
        path = self.out_dir / "summary.csv"
        self.summary_frame(reports).to_csv(path, index=False)
        return path

    def generate_digest(self, scenario_name: str, reports: list[JobReport]) -> str:
        """Human-readable digest of a run"""
        passed = sum(r.passed for r in reports)
        lines = [
            f"# Verification digest: {scenario_name}",
            "",
            f"**Jobs**: {len(reports)}",
            f"**Passed**: {passed}",
            f"**Failed**: {len(reports) - passed}",
            "",
            "| Job | Kind | Function | Constant | Margin | Status |",
            "|-----|------|----------|----------|--------|--------|",
        ]
        for r in reports:
            lines.append(
                f"| {r.job_id} | {r.kind} | {r.function or '-'} | {self._fmt(r.constant)} "
                f"| {self._fmt(r.margin)} | {'pass' if r.passed else 'FAIL'} |"
            )
        failures = [r for r in reports if not r.passed]
        if failures:
            lines += ["", "## Failures", ""]
            lines += [f"- **{r.job_id}** ({r.kind}): {r.message}" for r in failures]
        return "\n".join(lines) + "\n"

    def write_digest(self, scenario_name: str, reports: list[JobReport]) -> Path:
        path = self.out_dir / "digest.md"
        path.write_text(self.generate_digest(scenario_name, reports))
        return path

    def write_meta(self, meta: dict, started: datetime, finished: Optional[datetime] = None) -> Path:
        finished = finished or datetime.now()
        payload = {
            **meta,
            "started": started.isoformat(timespec="seconds"),
            "finished": finished.isoformat(timespec="seconds"),
            "elapsed_seconds": round((finished - started).total_seconds(), 3),
        }
        path = self.out_dir / "meta.json"
        path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")
        return path

    def _fmt(self, value: Optional[float]) -> str:
        return "-" if value is None else f"{value:.4g}"


def profile_frame(profile: MarginProfile) -> pd.DataFrame:
    frame = pd.DataFrame({"x": profile.xs, "margin": profile.margins})
    if profile.ys:
        frame.insert(1, "y", profile.ys)
    return frame


def seminorm_frame(values: dict[str, SeminormValue]) -> pd.DataFrame:
    return pd.DataFrame(
        [
            {
                "name": name,
                "value": v.value,
                "log_value": v.log_value,
                "tail_bound": v.tail_bound,
                "truncation": v.truncation,
                "box_half_width": v.box_half_width,
                "converged": v.converged,
            }
            for name, v in sorted(values.items())
        ],
        columns=["name", "value", "log_value", "tail_bound", "truncation", "box_half_width", "converged"],
    )
