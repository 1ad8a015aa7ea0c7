"""Campaign reports: JSON summary plus a CSV coverage-over-time series."""

import csv
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from statefuzz.bytecode.cfg import BranchId
from statefuzz.oracles.models import Finding

logger = logging.getLogger(__name__)

REPORT_SCHEMA = "statefuzz.report/1"
CSV_COLUMNS = ("round", "executions", "covered", "total", "coverage_percent", "elapsed")


@dataclass(frozen=True)
class RoundStats:
    """Coverage after one round. Round 0 is the initial corpus."""

    round: int
    executions: int
    covered: int
    total: int
    elapsed: float

    @property
    def coverage_percent(self) -> float:
        return 100.0 if self.total == 0 else 100.0 * self.covered / self.total

    def to_dict(self, include_timing: bool = True) -> dict[str, Any]:
        data: dict[str, Any] = {
            "round": self.round,
            "executions": self.executions,
            "covered": self.covered,
            "total": self.total,
            "coveragePercent": round(self.coverage_percent, 2),
        }
        if include_timing:
            data["elapsed"] = round(self.elapsed, 3)
        return data


@dataclass
class CampaignReport:
    contract: str
    package_hash: str
    total_branches: int
    covered_branches: list[BranchId] = field(default_factory=list)
    findings: list[Finding] = field(default_factory=list)
    executions: int = 0
    rounds: list[RoundStats] = field(default_factory=list)
    wall_clock: float = 0.0
    termination: str = "time"
    templates: list[list[str]] = field(default_factory=list)
    config: dict[str, Any] = field(default_factory=dict)

    @property
    def branch_coverage_percent(self) -> float:
        if self.total_branches == 0:
            return 100.0
        return 100.0 * len(self.covered_branches) / self.total_branches

    @property
    def has_findings(self) -> bool:
        return bool(self.findings)

    def to_dict(self, include_timing: bool = True) -> dict[str, Any]:
        """Serialize the report; without timing two runs with one seed compare equal."""
        data: dict[str, Any] = {
            "schema": REPORT_SCHEMA,
            "contract": self.contract,
            "packageHash": self.package_hash,
            "branchCoveragePercent": round(self.branch_coverage_percent, 2),
            "coveredBranchIds": [list(b) for b in sorted(self.covered_branches)],
            "totalBranches": self.total_branches,
            "findings": [f.to_dict() for f in self.findings],
            "executions": self.executions,
            "termination": self.termination,
            "templates": self.templates,
            "perRound": [r.to_dict(include_timing) for r in self.rounds],
            "config": self.config,
        }
        if include_timing:
            data["wallClock"] = round(self.wall_clock, 3)
        return data


def generate_json_report(report: CampaignReport, pretty: bool = True, include_timing: bool = True) -> str:
    data = report.to_dict(include_timing)
    if pretty:
        return json.dumps(data, indent=2)
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


def coverage_csv_path(report_path: Path) -> Path:
    return report_path.with_name(f"{report_path.stem}.coverage.csv")


def save_coverage_csv(report: CampaignReport, output_path: Path) -> None:
    with output_path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(CSV_COLUMNS)
        for stats in report.rounds:
            writer.writerow(
                [
                    stats.round,
                    stats.executions,
                    stats.covered,
                    stats.total,
                    f"{stats.coverage_percent:.2f}",
                    f"{stats.elapsed:.3f}",
                ]
            )


def save_report(report: CampaignReport, output_path: Path) -> Path:
    """Write the JSON report and the coverage CSV next to it.

    Args:
        report: The finished campaign report
        output_path: Where the JSON goes

    Returns:
        Path of the CSV series
    """
    output_path.parent.mkdir(parents=True, exist_ok=True)
    output_path.write_text(generate_json_report(report), encoding="utf-8")
    csv_path = coverage_csv_path(output_path)
    save_coverage_csv(report, csv_path)
    logger.info(f"Wrote report to {output_path} and coverage series to {csv_path}")
    return csv_path
