"""Seeded synthetic customer populations for end-to-end pipeline runs.

Purchases follow a renewal process with exponential inter-arrival times per
segment (rounded up to whole days, minimum one day), so the chance that a
gap qualifies as a repetition has the closed form 1 - exp(-gap_limit/mean)
and generated populations can be checked against analytic targets. Returns
are dated to their originating purchase; one extra held-out compliance draw
per returning customer becomes the evaluation ground truth.

Everything derives from a single 64-bit seed (one splitmix64 substream per
customer), so generation is reproducible byte for byte and insensitive to
how customers would be partitioned across workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import date, timedelta

from .behavior import DEFAULT_WINDOW_DAYS, PurchaseHistory, ReturnEvent, ReturnHistory
from .rng import SplitMix64

NSERVES_MAX = 3


@dataclass(frozen=True)
class SegmentSpec:
    name: str
    count: int
    purchase_gap_mean_days: float
    compliance_prob: float
    return_prob_per_purchase: float

    def __post_init__(self):
        if not self.name.isalnum():
            raise ValueError(f"segment name must be alphanumeric, got {self.name!r}")
        if self.count < 0:
            raise ValueError("segment count must be >= 0")
        if self.purchase_gap_mean_days <= 0:
            raise ValueError("purchase_gap_mean_days must be positive")
        for prob, label in (
            (self.compliance_prob, "compliance_prob"),
            (self.return_prob_per_purchase, "return_prob_per_purchase"),
        ):
            if not 0.0 <= prob <= 1.0:
                raise ValueError(f"{label} must lie in [0, 1], got {prob}")


@dataclass(frozen=True)
class PopulationSpec:
    segments: tuple[SegmentSpec, ...]
    horizon_days: int
    reference_date: date
    seed: int

    def __post_init__(self):
        if not self.segments:
            raise ValueError("population needs at least one segment")
        if len({s.name for s in self.segments}) != len(self.segments):
            raise ValueError("segment names must be unique")
        # keep the full estimator window inside the generated horizon
        if self.horizon_days < DEFAULT_WINDOW_DAYS:
            raise ValueError(
                f"horizon_days must be >= {DEFAULT_WINDOW_DAYS} so the"
                " estimation window is fully populated"
            )


@dataclass(frozen=True)
class SynthPopulation:
    purchases: tuple[PurchaseHistory, ...]
    returns: tuple[ReturnHistory, ...]
    nserves: dict[str, int]
    ground_truth: dict[str, bool]
    segment_of: dict[str, str]


def generate(spec: PopulationSpec) -> SynthPopulation:
    """Generate one population; deterministic given the population spec and seed."""
    start = spec.reference_date - timedelta(days=spec.horizon_days)
    purchases: list[PurchaseHistory] = []
    returns: list[ReturnHistory] = []
    nserves: dict[str, int] = {}
    ground_truth: dict[str, bool] = {}
    segment_of: dict[str, str] = {}

    ordinal = 0
    for segment in spec.segments:
        for i in range(segment.count):
            cid = f"{segment.name}{i:06d}"
            rng = SplitMix64.substream(spec.seed, ordinal)
            ordinal += 1
            segment_of[cid] = segment.name

            dates: list[date] = []
            day = 0
            while True:
                day += max(1, math.ceil(rng.exponential(segment.purchase_gap_mean_days)))
                if day > spec.horizon_days:
                    break
                dates.append(start + timedelta(days=day))

            events: list[ReturnEvent] = []
            for d in dates:
                if rng.next_float() < segment.return_prob_per_purchase:
                    complied = rng.next_float() < segment.compliance_prob
                    events.append(ReturnEvent(d, complied))

            if dates:
                purchases.append(PurchaseHistory(cid, tuple(dates)))
            if events:
                returns.append(ReturnHistory(cid, tuple(events)))
                ground_truth[cid] = rng.next_float() < segment.compliance_prob
            nserves[cid] = rng.next_below(NSERVES_MAX + 1)

    return SynthPopulation(
        purchases=tuple(purchases),
        returns=tuple(returns),
        nserves=nserves,
        ground_truth=ground_truth,
        segment_of=segment_of,
    )


def parse_population_spec(text: str, seed: int) -> PopulationSpec:
    """Parse the line-oriented population format.

    ::

        reference_date: 2020-10-02
        horizon_days: 365
        segment loyal: 5000 30 1.0 0.3
        segment churny: 5000 120 0.6 0.3

    Segment values are count, purchase_gap_mean_days, compliance_prob and
    return_prob_per_purchase. Blank lines and ``#`` comments are skipped;
    the seed always comes from the caller.
    """
    reference_date: date | None = None
    horizon_days: int | None = None
    segments: list[SegmentSpec] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if ":" not in line:
            raise ValueError(f"line {lineno}: expected 'key: value', got {line!r}")
        head, _, tail = line.partition(":")
        head_parts = head.split()
        tail = tail.strip()
        if head_parts == ["reference_date"]:
            try:
                reference_date = date.fromisoformat(tail)
            except ValueError:
                raise ValueError(f"line {lineno}: bad date {tail!r}") from None
        elif head_parts == ["horizon_days"]:
            try:
                horizon_days = int(tail)
            except ValueError:
                raise ValueError(f"line {lineno}: bad integer {tail!r}") from None
        elif len(head_parts) == 2 and head_parts[0] == "segment":
            values = tail.split()
            if len(values) != 4:
                raise ValueError(
                    f"line {lineno}: segment needs 4 values"
                    " (count gap_mean compliance_prob return_prob)"
                )
            try:
                segments.append(
                    SegmentSpec(
                        name=head_parts[1],
                        count=int(values[0]),
                        purchase_gap_mean_days=float(values[1]),
                        compliance_prob=float(values[2]),
                        return_prob_per_purchase=float(values[3]),
                    )
                )
            except ValueError as exc:
                raise ValueError(f"line {lineno}: {exc}") from None
        else:
            raise ValueError(f"line {lineno}: unknown directive {head_parts[0]!r}")

    if reference_date is None:
        raise ValueError("missing 'reference_date:' line")
    if horizon_days is None:
        raise ValueError("missing 'horizon_days:' line")
    return PopulationSpec(
        segments=tuple(segments),
        horizon_days=horizon_days,
        reference_date=reference_date,
        seed=seed,
    )


def load_population_spec(path, seed: int) -> PopulationSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_population_spec(fh.read(), seed)
