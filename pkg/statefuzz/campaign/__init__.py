"""Campaign configuration, orchestration, reporting and replay."""

from statefuzz.campaign.config import CampaignConfig
from statefuzz.campaign.orchestrator import FuzzCampaign, resolve_package, run_campaign
from statefuzz.campaign.replay import ReplayResult, replay
from statefuzz.campaign.report import (
    CampaignReport,
    RoundStats,
    generate_json_report,
    save_coverage_csv,
    save_report,
)

__all__ = [
    "CampaignConfig",
    "CampaignReport",
    "FuzzCampaign",
    "ReplayResult",
    "RoundStats",
    "generate_json_report",
    "replay",
    "resolve_package",
    "run_campaign",
    "save_coverage_csv",
    "save_report",
]
