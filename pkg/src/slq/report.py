"""Three-valued verdicts with numeric evidence."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from enum import Enum


class Verdict(str, Enum):
    SATISFIED = "satisfied"
    VIOLATED = "violated"
    INCONCLUSIVE = "inconclusive"
    # kernel probe only: the evidence matches, but nothing is certified
    CONSISTENT = "consistent-with-self-adjoint"

    def __str__(self):
        return self.value


def combine(verdicts):
    """Conjunction: any violation wins, then any inconclusive, else satisfied."""
    verdicts = list(verdicts)
    if Verdict.VIOLATED in verdicts:
        return Verdict.VIOLATED
    if any(v is not Verdict.SATISFIED for v in verdicts):
        return Verdict.INCONCLUSIVE
    return Verdict.SATISFIED


@dataclass
class ConditionReport:
    criterion: str
    verdict: Verdict
    evidence: list = field(default_factory=list)
    notes: str = ""

    def value(self, label):
        for key, val in self.evidence:
            if key == label:
                return val
        raise KeyError(label)

    def to_text(self, fmt="{:.12g}"):
        lines = [f"criterion: {self.criterion}", f"verdict: {self.verdict}"]
        for label, val in self.evidence:
            lines.append(f"  {label} = {_fmt(val, fmt)}")
        if self.notes:
            lines.append(f"notes: {self.notes}")
        return "\n".join(lines) + "\n"

    def to_csv(self, fmt="{:.12g}"):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["criterion", "verdict", "label", "value"])
        for label, val in self.evidence:
            w.writerow([self.criterion, str(self.verdict), label, _fmt(val, fmt)])
        return buf.getvalue()


def _fmt(val, fmt):
    if isinstance(val, bool):
        return str(int(val))
    if isinstance(val, (int, float)):
        return fmt.format(val)
    return str(val)
