from datetime import date, timedelta

import numpy as np
import pytest

from elitegt.behavior import (
    EstimatorConfig,
    PurchaseHistory,
    ReturnEvent,
    ReturnHistory,
    compliance_all,
    estimate_delta,
    load_purchases,
    load_returns,
    write_purchases,
    write_returns,
)

REF = date(2020, 10, 2)
CONFIG = EstimatorConfig(reference_date=REF)
WINDOW_START = CONFIG.window_start


def history_at_days(*days: int) -> PurchaseHistory:
    return PurchaseHistory(
        "c1", tuple(WINDOW_START + timedelta(days=d) for d in days)
    )


def naive_delta(history: PurchaseHistory, config: EstimatorConfig) -> float:
    """Brute-force recount used as the estimator oracle."""
    in_window = sorted(
        d
        for d in history.purchase_dates
        if config.window_start <= d <= config.reference_date
    )
    if len(in_window) < 2:
        return 0.0
    hits = total = 0
    for a, b in zip(in_window, in_window[1:]):
        total += 1
        if (b - a).days <= config.gap_days:
            hits += 1
    return hits / total


def test_estimate_all_gaps_qualify():
    assert estimate_delta(history_at_days(0, 30, 100, 150), CONFIG) == 1.0


def test_estimate_no_gap_qualifies():
    assert estimate_delta(history_at_days(0, 100, 250), CONFIG) == 0.0


def test_estimate_partial_gaps():
    assert estimate_delta(history_at_days(0, 50, 200, 260), CONFIG) == pytest.approx(2 / 3)


def test_estimate_needs_two_purchases():
    assert estimate_delta(history_at_days(), CONFIG) == 0.0
    assert estimate_delta(history_at_days(12), CONFIG) == 0.0


def test_estimate_boundaries_inclusive():
    # both window endpoints count, and a gap of exactly gap_days qualifies
    assert estimate_delta(history_at_days(0, 90), CONFIG) == 1.0
    assert estimate_delta(history_at_days(0, 91), CONFIG) == 0.0
    assert estimate_delta(history_at_days(180, 270), CONFIG) == 1.0


def test_same_day_purchases_count_as_repetition():
    assert estimate_delta(history_at_days(5, 5), CONFIG) == 1.0


def test_estimate_random_histories_match_naive_recount():
    rng = np.random.default_rng(23)
    for _ in range(300):
        n = int(rng.integers(0, 12))
        days = rng.integers(-120, 340, size=n)  # includes out-of-window dates
        history = PurchaseHistory(
            "c", tuple(WINDOW_START + timedelta(days=int(d)) for d in days)
        )
        value = estimate_delta(history, CONFIG)
        assert value == naive_delta(history, CONFIG)
        assert 0.0 <= value <= 1.0


def test_estimate_invariant_to_input_order():
    dates = (
        WINDOW_START + timedelta(days=200),
        WINDOW_START + timedelta(days=10),
        WINDOW_START + timedelta(days=90),
    )
    forward = estimate_delta(PurchaseHistory("c", dates), CONFIG)
    backward = estimate_delta(PurchaseHistory("c", dates[::-1]), CONFIG)
    assert forward == backward


def test_out_of_window_purchases_never_affect_estimate():
    base = history_at_days(0, 40, 80)
    baseline = estimate_delta(base, CONFIG)
    for extra in (-400, -1, 271, 5000):
        padded = PurchaseHistory(
            "c", base.purchase_dates + (WINDOW_START + timedelta(days=extra),)
        )
        assert estimate_delta(padded, CONFIG) == baseline


def test_compliance_all_true():
    events = tuple(
        ReturnEvent(WINDOW_START + timedelta(days=d), True) for d in (10, 50, 200)
    )
    assert compliance_all(ReturnHistory("c", events), CONFIG) is True


def test_compliance_single_failure():
    events = [ReturnEvent(WINDOW_START + timedelta(days=10 * i), True) for i in range(5)]
    events[3] = events[3]._replace(complied=False)
    assert compliance_all(ReturnHistory("c", tuple(events)), CONFIG) is False


def test_compliance_vacuously_true_without_events():
    assert compliance_all(ReturnHistory("c"), CONFIG) is True
    # failures outside the window do not count
    old = ReturnEvent(WINDOW_START - timedelta(days=5), False)
    assert compliance_all(ReturnHistory("c", (old,)), CONFIG) is True


def test_estimator_config_validation():
    with pytest.raises(ValueError):
        EstimatorConfig(reference_date=REF, window_days=0)
    with pytest.raises(ValueError):
        EstimatorConfig(reference_date=REF, gap_days=0)
    with pytest.raises(ValueError):
        EstimatorConfig(reference_date=REF, window_days=30, gap_days=60)


# --- CSV round trips and errors --------------------------------------------


def test_purchases_round_trip(tmp_path):
    histories = [
        PurchaseHistory("a1", (date(2020, 1, 5), date(2020, 1, 5), date(2020, 3, 1))),
        PurchaseHistory("b2", (date(2019, 12, 31),)),
    ]
    path = tmp_path / "purchases.csv"
    write_purchases(path, histories)
    assert load_purchases(path) == histories


def test_returns_round_trip(tmp_path):
    histories = [
        ReturnHistory(
            "a1", (ReturnEvent(date(2020, 1, 5), True), ReturnEvent(date(2020, 2, 1), False))
        ),
        ReturnHistory("z9", (ReturnEvent(date(2020, 6, 6), True),)),
    ]
    path = tmp_path / "returns.csv"
    write_returns(path, histories)
    assert load_returns(path) == histories


def test_load_purchases_groups_unsorted_rows(tmp_path):
    path = tmp_path / "purchases.csv"
    path.write_text(
        "customer_id,purchase_date\n"
        "b,2020-05-01\n"
        "a,2020-02-02\n"
        "b,2020-01-01\n"
    )
    loaded = load_purchases(path)
    assert [h.customer_id for h in loaded] == ["a", "b"]
    assert loaded[1].purchase_dates == (date(2020, 1, 1), date(2020, 5, 1))


def test_load_purchases_empty_file(tmp_path):
    path = tmp_path / "purchases.csv"
    path.write_text("")
    assert load_purchases(path) == []


def test_load_purchases_rejects_unknown_column(tmp_path):
    path = tmp_path / "purchases.csv"
    path.write_text("customer_id,purchase_date,amount\nc,2020-01-01,9\n")
    with pytest.raises(ValueError, match="header"):
        load_purchases(path)


def test_load_purchases_reports_bad_row_line(tmp_path):
    path = tmp_path / "purchases.csv"
    path.write_text("customer_id,purchase_date\nc,2020-01-01\nc,not-a-date\n")
    with pytest.raises(ValueError, match="line 3"):
        load_purchases(path)


def test_load_returns_rejects_bad_flag(tmp_path):
    path = tmp_path / "returns.csv"
    path.write_text("customer_id,return_date,complied\nc,2020-01-01,yes\n")
    with pytest.raises(ValueError, match="0 or 1"):
        load_returns(path)
