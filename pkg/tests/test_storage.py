from datetime import datetime

import pytest

from src.compliance import BudgetRegistry, analyze
from src.scoring import BatteryRegistry, rank_systems, read_ratings
from src.storage import ReportStore

from builders import ratings_text, track_two_rows

GENERATED_AT = datetime(2026, 3, 14, 9, 30)


@pytest.fixture
def store(tmp_path) -> ReportStore:
    return ReportStore(tmp_path / "reports")


@pytest.fixture
def compliance_report(reference_descriptor, config_dir):
    budget = BudgetRegistry(config_dir / "budgets.yaml").get_budget(1)
    return analyze(reference_descriptor, budget)


@pytest.fixture
def score_reports(config_dir):
    battery = BatteryRegistry(config_dir / "battery.yaml").get_battery(2)
    return rank_systems(read_ratings(ratings_text(track_two_rows())), battery)


def test_store_compliance(store, compliance_report):
    path = store.store_compliance(compliance_report, "Reference Track-1 model!", GENERATED_AT)
    assert path.name == "2026-03-14-reference-track-1-model-track1-compliance.md"

    front_matter, body = store.load_report(path)
    assert front_matter["kind"] == "compliance"
    assert front_matter["model"] == "Reference Track-1 model!"
    assert front_matter["passed"] is True
    assert front_matter["latency_ms"]["total"] == 10.0
    assert "PASS  total_complexity" in body


def test_store_scores(store, score_reports):
    path = store.store_scores(score_reports, "round2_ratings.csv", GENERATED_AT)
    front_matter, body = store.load_report(path)
    assert front_matter["kind"] == "scores"
    assert front_matter["ranking"][0]["final"] == pytest.approx(61.25)
    assert front_matter["ranking"][0]["conditions"][0]["mode"] == "ulb"
    assert "Final score: 61.2500" in body


def test_list_reports_by_kind(store, compliance_report, score_reports):
    store.store_compliance(compliance_report, "ref", GENERATED_AT)
    store.store_compliance(compliance_report, "ref", datetime(2026, 4, 1))
    store.store_scores(score_reports, "ratings", GENERATED_AT)
    compliance = store.list_reports("compliance")
    assert [p.name[:10] for p in compliance] == ["2026-04-01", "2026-03-14"]
    assert len(store.list_reports("scores")) == 1
    assert len(store.list_reports()) == 3


def test_load_report_rejects_plain_files(store, tmp_path):
    plain = tmp_path / "reports" / "notes.md"
    plain.write_text("no front matter here")
    assert store.load_report(plain) is None
    assert store.load_report(tmp_path / "reports" / "missing.md") is None
