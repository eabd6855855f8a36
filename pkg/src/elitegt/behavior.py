"""Customer purchase/return histories and the repetition-probability estimate.

The estimate looks back a fixed window from a reference date (defaults:
270 days, i.e. nine months) and treats each consecutive purchase gap of at
most ``gap_days`` (default 90) as one observed repetition of the customer
relationship; the estimate is the qualifying fraction of gaps. Day counts
rather than calendar months keep the window deterministic across locales.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from datetime import date, timedelta
from typing import Iterable, NamedTuple, Sequence

DEFAULT_WINDOW_DAYS = 270
DEFAULT_GAP_DAYS = 90

PURCHASES_HEADER = ["customer_id", "purchase_date"]
RETURNS_HEADER = ["customer_id", "return_date", "complied"]


class ReturnEvent(NamedTuple):
    when: date
    complied: bool


@dataclass(frozen=True)
class PurchaseHistory:
    customer_id: str
    purchase_dates: tuple[date, ...] = ()


@dataclass(frozen=True)
class ReturnHistory:
    customer_id: str
    events: tuple[ReturnEvent, ...] = ()


@dataclass(frozen=True)
class EstimatorConfig:
    """Window geometry for the estimator: inclusive on both ends."""

    reference_date: date
    window_days: int = DEFAULT_WINDOW_DAYS
    gap_days: int = DEFAULT_GAP_DAYS

    def __post_init__(self):
        if self.window_days <= 0:
            raise ValueError("window_days must be positive")
        if self.gap_days <= 0:
            raise ValueError("gap_days must be positive")
        if self.gap_days > self.window_days:
            raise ValueError("gap_days cannot exceed window_days")

    @property
    def window_start(self) -> date:
        return self.reference_date - timedelta(days=self.window_days)


def purchases_in_window(history: PurchaseHistory, config: EstimatorConfig) -> list[date]:
    start = config.window_start
    end = config.reference_date
    return sorted(d for d in history.purchase_dates if start <= d <= end)


def returns_in_window(history: ReturnHistory, config: EstimatorConfig) -> list[ReturnEvent]:
    start = config.window_start
    end = config.reference_date
    return sorted(
        (e for e in history.events if start <= e.when <= end), key=lambda e: e.when
    )


def estimate_delta(history: PurchaseHistory, config: EstimatorConfig) -> float:
    """Fraction of in-window consecutive purchase gaps within the gap limit.

    Fewer than two in-window purchases observe no repetition at all and give
    0.0 (the cautious default). A same-day repeat purchase is a gap of zero
    days and qualifies.
    """
    dates = purchases_in_window(history, config)
    if len(dates) < 2:
        return 0.0
    gaps = [(b - a).days for a, b in zip(dates, dates[1:])]
    qualifying = sum(1 for g in gaps if g <= config.gap_days)
    return qualifying / len(gaps)


def compliance_all(history: ReturnHistory, config: EstimatorConfig) -> bool:
    """True when every in-window return complied; vacuously true with none."""
    return all(e.complied for e in returns_in_window(history, config))


def _read_rows(path, header: list[str]) -> Iterable[tuple[int, list[str]]]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            first = next(reader)
        except StopIteration:
            return  # empty file -> no records
        if [c.strip() for c in first] != header:
            raise ValueError(
                f"{path}: expected header {','.join(header)!r}, got {','.join(first)!r}"
            )
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ValueError(f"{path} line {lineno}: expected {len(header)} fields")
            yield lineno, row


def _parse_date(path, lineno: int, text: str) -> date:
    try:
        return date.fromisoformat(text.strip())
    except ValueError:
        raise ValueError(f"{path} line {lineno}: bad date {text!r}") from None


def _parse_flag(path, lineno: int, text: str) -> bool:
    text = text.strip()
    if text == "0":
        return False
    if text == "1":
        return True
    raise ValueError(f"{path} line {lineno}: flag must be 0 or 1, got {text!r}")


def load_purchases(path) -> list[PurchaseHistory]:
    """Read purchases.csv into per-customer histories sorted by customer id."""
    by_customer: dict[str, list[date]] = {}
    for lineno, row in _read_rows(path, PURCHASES_HEADER):
        cid = row[0].strip()
        if not cid:
            raise ValueError(f"{path} line {lineno}: empty customer_id")
        by_customer.setdefault(cid, []).append(_parse_date(path, lineno, row[1]))
    return [
        PurchaseHistory(cid, tuple(sorted(dates)))
        for cid, dates in sorted(by_customer.items())
    ]


def load_returns(path) -> list[ReturnHistory]:
    """Read returns.csv into per-customer histories sorted by customer id."""
    by_customer: dict[str, list[ReturnEvent]] = {}
    for lineno, row in _read_rows(path, RETURNS_HEADER):
        cid = row[0].strip()
        if not cid:
            raise ValueError(f"{path} line {lineno}: empty customer_id")
        event = ReturnEvent(
            _parse_date(path, lineno, row[1]), _parse_flag(path, lineno, row[2])
        )
        by_customer.setdefault(cid, []).append(event)
    return [
        ReturnHistory(cid, tuple(sorted(events, key=lambda e: e.when)))
        for cid, events in sorted(by_customer.items())
    ]


def write_purchases(path, histories: Sequence[PurchaseHistory]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(PURCHASES_HEADER)
        for history in sorted(histories, key=lambda h: h.customer_id):
            for d in history.purchase_dates:
                writer.writerow([history.customer_id, d.isoformat()])


def write_returns(path, histories: Sequence[ReturnHistory]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RETURNS_HEADER)
        for history in sorted(histories, key=lambda h: h.customer_id):
            for event in history.events:
                writer.writerow(
                    [history.customer_id, event.when.isoformat(), int(event.complied)]
                )
