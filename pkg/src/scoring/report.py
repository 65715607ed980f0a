from typing import Any

from .aggregate import ScoreReport


def score_document(reports: list[ScoreReport]) -> dict[str, Any]:
    return {
        "ranking": [
            {
                "rank": rank,
                "system": r.system,
                "track": r.track,
                "final": r.final,
                "raters_failed": r.raters_failed,
                "records_dropped": r.records_dropped,
                "conditions": [
                    {
                        "condition": s.condition,
                        "mode": s.mode.value,
                        "test": s.test.value,
                        "raw": s.raw,
                        "normalized": s.normalized,
                        "weight": s.weight,
                        "items": s.items,
                        "responses": s.responses,
                    }
                    for s in r.conditions
                ],
            }
            for rank, r in enumerate(reports, start=1)
        ]
    }


def render_score_table(reports: list[ScoreReport]) -> str:
    lines = []
    for rank, r in enumerate(reports, start=1):
        lines += [
            f"#{rank} {r.system} - Track {r.track}",
            "=" * 64,
            f"{'Cond':<6} {'Mode':<5} {'Test':<9} {'Raw':>9} {'Norm':>8} {'Weight':>7} {'Items':>6}",
            "-" * 64,
        ]
        for s in r.conditions:
            lines.append(
                f"{s.condition:<6} {s.mode.value:<5} {s.test.value:<9} {s.raw:>9.3f} "
                f"{s.normalized:>8.3f} {s.weight:>7g} {s.items:>6}"
            )
        lines.append("-" * 64)
        if r.records_dropped:
            failed = ", ".join(f"{k} {v}" for k, v in r.raters_failed.items() if v)
            lines.append(f"Screened out: {r.records_dropped} responses ({failed})")
        lines += [f"Final score: {r.final:.4f}", ""]
    return "\n".join(lines)
