# ptsturm - Licence MIT (voir LICENSE.md)
"""Rapports de contrôle structurés.

Un rapport rassemble des contrôles chiffrés (violation maximale observée,
tolérance). Il sert à la fois à la vérification des hypothèses sur f et à la
suite de recette lancée par la commande verify. Le module n'écrit rien, sauf
via la fonction explicite d'export CSV.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import pandas as pd


SEVERITY_BLOCKING = "blocking"
SEVERITY_ALERT = "alert"
SEVERITY_WARNING = "warning"

VALIDATION_COLUMNS = ["level", "code", "subject", "passed", "violation", "tolerance", "message"]


@dataclass(frozen=True)
class CheckResult:
    code: str
    subject: str
    violation: float
    tolerance: float
    message: str = ""
    severity: str = SEVERITY_BLOCKING
    forced: bool | None = None  # verdict imposé quand le critère n'est pas un seuil

    @property
    def passed(self) -> bool:
        if self.forced is not None:
            return self.forced
        return math.isfinite(self.violation) and self.violation < self.tolerance


@dataclass
class ValidationReport:
    checks: list[CheckResult] = field(default_factory=list)

    def add(self, check: CheckResult) -> None:
        self.checks.append(check)

    def extend(self, checks: Iterable[CheckResult]) -> None:
        self.checks.extend(checks)

    @property
    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]

    @property
    def blocking_issues(self) -> list[CheckResult]:
        return [c for c in self.failures if c.severity == SEVERITY_BLOCKING]

    @property
    def alerts(self) -> list[CheckResult]:
        return [c for c in self.failures if c.severity == SEVERITY_ALERT]

    @property
    def warnings(self) -> list[CheckResult]:
        return [c for c in self.failures if c.severity == SEVERITY_WARNING]

    @property
    def passed(self) -> bool:
        return not self.blocking_issues and not self.alerts


def format_validation_summary(report: ValidationReport) -> str:
    return (
        f"Contrôles : {len(report.checks)} exécuté(s), "
        f"{len(report.blocking_issues)} blocage(s), "
        f"{len(report.alerts)} alerte(s), "
        f"{len(report.warnings)} avertissement(s)."
    )


def format_validation_table(report: ValidationReport) -> str:
    """Tableau texte aligné, une ligne par contrôle."""
    lines = []
    width = max([len(c.code) for c in report.checks] + [4])
    for c in report.checks:
        status = "OK  " if c.passed else "ÉCHEC"
        lines.append(f"{status} {c.code:<{width}}  {c.violation:.3e} / {c.tolerance:.1e}  {c.message}")
    return "\n".join(lines)


def report_frame(report: ValidationReport) -> pd.DataFrame:
    rows = [{
        "level": c.severity,
        "code": c.code,
        "subject": c.subject,
        "passed": c.passed,
        "violation": float(c.violation),
        "tolerance": float(c.tolerance),
        "message": c.message,
    } for c in report.checks]
    return pd.DataFrame(rows, columns=VALIDATION_COLUMNS)


def write_validation_csv(report: ValidationReport, path: Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    report_frame(report).to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
