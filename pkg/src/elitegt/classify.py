"""Elite-customer decision rule over the repetition estimate and compliance.

A customer is elite when the estimated repetition probability clears the
threshold ``tau`` and every in-window return complied. ``tau`` defaults to
0.5, the trigger-strategy threshold of the built-in refund game, and can be
derived from any symmetric 2x2 game via `repeated.grim_trigger_threshold`.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass
from typing import Sequence

from .behavior import (
    EstimatorConfig,
    PurchaseHistory,
    ReturnHistory,
    compliance_all,
    estimate_delta,
)

DECISIONS_HEADER = ["customer_id", "delta_hat", "compliant", "elite", "reason"]


class Reason(str, enum.Enum):
    LOW_DELTA = "LowDelta"
    COMPLIANCE_FAILURE = "ComplianceFailure"
    ELITE = "Elite"


class Boundary(str, enum.Enum):
    """How a repetition estimate exactly equal to tau is treated.

    STRICT keeps the decision rule's literal `delta_hat < tau -> not elite`,
    so the boundary case stays elite-eligible. INCLUSIVE demands strictly
    more than tau. STRICT is the default.
    """

    STRICT = "strict"
    INCLUSIVE = "inclusive"


@dataclass(frozen=True)
class ClassifierConfig:
    estimator: EstimatorConfig
    tau: float = 0.5
    boundary: Boundary = Boundary.STRICT

    def __post_init__(self):
        if not 0.0 <= self.tau <= 1.0:
            raise ValueError(f"tau must lie in [0, 1], got {self.tau}")


@dataclass(frozen=True)
class EliteDecision:
    customer_id: str
    delta_hat: float
    compliant: bool
    elite: bool
    reason: Reason


def classify(
    delta_hat: float,
    compliant: bool,
    config: ClassifierConfig,
    customer_id: str = "",
) -> EliteDecision:
    """Apply the two-step rule: repetition threshold first, then compliance."""
    if not 0.0 <= delta_hat <= 1.0:
        raise ValueError(f"delta_hat must lie in [0, 1], got {delta_hat}")
    if config.boundary is Boundary.STRICT:
        below = delta_hat < config.tau
    else:
        below = delta_hat <= config.tau
    if below:
        reason = Reason.LOW_DELTA
    elif compliant:
        reason = Reason.ELITE
    else:
        reason = Reason.COMPLIANCE_FAILURE
    return EliteDecision(
        customer_id=customer_id,
        delta_hat=delta_hat,
        compliant=compliant,
        elite=reason is Reason.ELITE,
        reason=reason,
    )


def classify_population(
    purchases: Sequence[PurchaseHistory],
    returns: Sequence[ReturnHistory],
    config: ClassifierConfig,
) -> list[EliteDecision]:
    """One decision per customer appearing in either input, sorted by id.

    Customers without purchase history get delta_hat = 0; customers without
    return history are vacuously compliant.
    """
    purchase_map = {h.customer_id: h for h in purchases}
    return_map = {h.customer_id: h for h in returns}
    decisions = []
    for cid in sorted(set(purchase_map) | set(return_map)):
        history = purchase_map.get(cid, PurchaseHistory(cid))
        delta_hat = estimate_delta(history, config.estimator)
        compliant = compliance_all(return_map.get(cid, ReturnHistory(cid)), config.estimator)
        decisions.append(classify(delta_hat, compliant, config, customer_id=cid))
    return decisions


def write_decisions(path, decisions: Sequence[EliteDecision]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(DECISIONS_HEADER)
        for d in decisions:
            writer.writerow(
                [
                    d.customer_id,
                    f"{d.delta_hat:.6f}",
                    int(d.compliant),
                    int(d.elite),
                    d.reason.value,
                ]
            )


def load_decisions(path) -> list[EliteDecision]:
    decisions = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            return []
        if [c.strip() for c in header] != DECISIONS_HEADER:
            raise ValueError(f"{path}: unexpected header {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(DECISIONS_HEADER):
                raise ValueError(f"{path} line {lineno}: expected 5 fields")
            try:
                reason = Reason(row[4].strip())
            except ValueError:
                raise ValueError(f"{path} line {lineno}: unknown reason {row[4]!r}") from None
            decision = EliteDecision(
                customer_id=row[0].strip(),
                delta_hat=float(row[1]),
                compliant=row[2].strip() == "1",
                elite=row[3].strip() == "1",
                reason=reason,
            )
            if decision.elite != (reason is Reason.ELITE):
                raise ValueError(f"{path} line {lineno}: elite flag contradicts reason")
            decisions.append(decision)
    return decisions
