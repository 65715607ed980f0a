from fractions import Fraction
from typing import Any

import yaml

from .analyzer import MEGA, ComplianceReport


def _number(value: Fraction) -> int | float:
    return int(value) if value.denominator == 1 else float(value)


def report_document(report: ComplianceReport) -> dict[str, Any]:
    """Plain-data form of a report, for YAML output and report front matter."""
    return {
        "track": report.track,
        "passed": report.passed,
        "subtotals_mflops": {
            "encoder": float(report.encoder_flops / MEGA),
            "rvq": float(report.rvq_flops / MEGA),
            "decoder": float(report.decoder_flops / MEGA),
        },
        "receive_side_mflops": float(report.receive_side_mflops),
        "total_mflops": float(report.total_mflops),
        "total_macs_per_s": _number(report.total_macs),
        "total_adds_per_s": _number(report.total_adds),
        "latency_ms": {
            "algorithmic": float(report.latency.algorithmic_ms),
            "buffering": float(report.latency.buffering_ms),
            "total": float(report.latency.total_ms),
        },
        "verdicts": [
            {
                "constraint": v.constraint,
                "value": float(v.value),
                "limit": float(v.limit),
                "unit": v.unit,
                "margin": float(v.margin),
                "passed": v.passed,
            }
            for v in report.verdicts
        ],
        "layers": [
            {
                "id": r.layer_id,
                "kind": r.kind,
                "f_in": _number(r.f_in),
                "f_out": _number(r.f_out),
                "macs_per_s": _number(r.macs),
                "adds_per_s": _number(r.adds),
                "flops_per_s": _number(r.flops),
            }
            for r in report.rows
        ],
    }


def render_machine(report: ComplianceReport) -> str:
    return yaml.safe_dump(report_document(report), sort_keys=False)


def render_table(report: ComplianceReport) -> str:
    lines = [
        f"Compliance report - Track {report.track}",
        "=" * 72,
        f"{'Layer':<22} {'Kind':<14} {'MMAC/s':>12} {'MFLOP/s':>12} {'f_out (Hz)':>10}",
        "-" * 72,
    ]
    for r in report.rows:
        lines.append(
            f"{r.layer_id:<22} {r.kind:<14} {float(r.macs / MEGA):>12.4f} "
            f"{float(r.flops / MEGA):>12.4f} {float(r.f_out):>10.1f}"
        )
    lines += [
        "-" * 72,
        f"{'Encoder':<22} {float(report.encoder_flops / MEGA):>40.4f} MFLOP/s",
        f"{'RVQ':<22} {float(report.rvq_flops / MEGA):>40.4f} MFLOP/s",
        f"{'Decoder':<22} {float(report.decoder_flops / MEGA):>40.4f} MFLOP/s",
        f"Latency: {float(report.latency.algorithmic_ms):.3f} ms algorithmic + "
        f"{float(report.latency.buffering_ms):.3f} ms buffering = "
        f"{float(report.latency.total_ms):.3f} ms",
        "",
    ]
    for v in report.verdicts:
        status = "PASS" if v.passed else "FAIL"
        lines.append(
            f"{status}  {v.constraint:<18} {float(v.value):>12.4f} / {float(v.limit):<10g} "
            f"{v.unit:<8} margin {float(v.margin):+.4f}"
        )
    return "\n".join(lines)
