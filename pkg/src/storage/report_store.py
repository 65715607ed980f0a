import re
from datetime import datetime
from pathlib import Path
from typing import Any, Optional

import yaml

from src.compliance import ComplianceReport, render_table, report_document
from src.scoring import ScoreReport, render_score_table, score_document


class ReportStore:
    """Keeps reports as markdown files whose YAML front matter carries the
    machine-readable document."""

    def __init__(self, reports_dir: Path):
        self._reports_dir = reports_dir
        self._reports_dir.mkdir(parents=True, exist_ok=True)

    def _slugify(self, text: str) -> str:
        slug = text.lower()
        slug = re.sub(r"[^\w\s-]", "", slug)
        slug = re.sub(r"[\s_]+", "-", slug)
        slug = re.sub(r"-+", "-", slug)
        return slug[:50].strip("-")

    def _write(self, filename: str, front_matter: dict[str, Any], body: str) -> Path:
        file_path = self._reports_dir / filename
        md_content = "---\n"
        md_content += yaml.safe_dump(front_matter, default_flow_style=False, allow_unicode=True, sort_keys=False)
        md_content += "---\n\n"
        md_content += "```\n" + body + "\n```\n"
        with open(file_path, "w") as f:
            f.write(md_content)
        return file_path

    def store_compliance(
        self, report: ComplianceReport, model_name: str, generated_at: datetime
    ) -> Path:
        date_str = generated_at.strftime("%Y-%m-%d")
        filename = f"{date_str}-{self._slugify(model_name)}-track{report.track}-compliance.md"
        front_matter = {
            "kind": "compliance",
            "model": model_name,
            "generated_at": generated_at.isoformat(),
            **report_document(report),
        }
        return self._write(filename, front_matter, render_table(report))

    def store_scores(
        self, reports: list[ScoreReport], ratings_name: str, generated_at: datetime
    ) -> Path:
        date_str = generated_at.strftime("%Y-%m-%d")
        filename = f"{date_str}-{self._slugify(ratings_name)}-scores.md"
        front_matter = {
            "kind": "scores",
            "ratings": ratings_name,
            "generated_at": generated_at.isoformat(),
            **score_document(reports),
        }
        return self._write(filename, front_matter, render_score_table(reports))

    def list_reports(self, kind: Optional[str] = None) -> list[Path]:
        suffix = f"-{kind}.md" if kind else ".md"
        return sorted(
            (p for p in self._reports_dir.glob("*.md") if p.name.endswith(suffix)),
            reverse=True,
        )

    def load_report(self, file_path: Path) -> Optional[tuple[dict, str]]:
        try:
            with open(file_path) as f:
                text = f.read()
        except OSError:
            return None

        if not text.startswith("---"):
            return None
        end = text.find("\n---", 3)
        if end < 0:
            return None

        front_matter = yaml.safe_load(text[3:end])
        body = text[end + 4:].strip()
        return front_matter, body
