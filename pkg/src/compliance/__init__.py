from .budgets import Budget, BudgetRegistry, BudgetsConfig
from .analyzer import (
    ComplianceError,
    ComplianceReport,
    CostRow,
    Latency,
    RvqCost,
    Verdict,
    analyze,
    latency,
    layer_cost,
    rvq_cost,
)
from .report import render_machine, render_table, report_document

__all__ = [
    "Budget",
    "BudgetRegistry",
    "BudgetsConfig",
    "ComplianceError",
    "ComplianceReport",
    "CostRow",
    "Latency",
    "RvqCost",
    "Verdict",
    "analyze",
    "latency",
    "layer_cost",
    "rvq_cost",
    "render_machine",
    "render_table",
    "report_document",
]
