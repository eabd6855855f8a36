"""Decision evaluation: confusion counts, precision/recall, logistic baseline.

Positives are elite classifications; the ground truth for each scored
customer is whether their next (held-out) return complied. A 0/0 ratio is
reported as None rather than a sentinel number so undefined metrics cannot
silently skew comparisons.

The logistic baseline is trained from scratch (full-batch gradient descent
on the mean log-loss) so its gradient can be verified against finite
differences; it is deliberately not delegated to a library.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .behavior import (
    EstimatorConfig,
    PurchaseHistory,
    ReturnHistory,
    estimate_delta,
    returns_in_window,
)

SERVES_HEADER = ["customer_id", "nserves"]
GROUND_TRUTH_HEADER = ["customer_id", "complied"]

FEATURE_COLUMNS = ("q2_failures", "q1_successes", "nserves", "delta_hat", "last_status")


@dataclass(frozen=True)
class LabeledOutcome:
    customer_id: str
    predicted_elite: bool
    complied: bool


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


def confusion(outcomes: Sequence[LabeledOutcome]) -> ConfusionMatrix:
    """Count outcomes: a positive is an elite call, a hit is compliance."""
    tp = fp = fn = tn = 0
    for o in outcomes:
        if o.predicted_elite:
            if o.complied:
                tp += 1
            else:
                fp += 1
        elif o.complied:
            fn += 1
        else:
            tn += 1
    return ConfusionMatrix(tp=tp, fp=fp, fn=fn, tn=tn)


def precision(m: ConfusionMatrix) -> float | None:
    """tp / (tp + fp); None when no positive calls were made."""
    denom = m.tp + m.fp
    return m.tp / denom if denom else None


def recall(m: ConfusionMatrix) -> float | None:
    """tp / (tp + fn); None when nothing complied."""
    denom = m.tp + m.fn
    return m.tp / denom if denom else None


@dataclass(frozen=True)
class FeatureVector:
    """Per-customer inputs to the baseline classifier.

    q2_failures / q1_successes count in-window returns by compliance flag;
    nserves is an opaque service count from an auxiliary file; last_status is
    the compliance flag of the latest in-window return (1 when there is none).
    """

    q2_failures: int
    q1_successes: int
    nserves: int
    delta_hat: float
    last_status: int

    def as_array(self) -> np.ndarray:
        return np.array(
            [self.q2_failures, self.q1_successes, self.nserves, self.delta_hat, self.last_status],
            dtype=np.float64,
        )


def build_features(
    purchases: Sequence[PurchaseHistory],
    returns: Sequence[ReturnHistory],
    config: EstimatorConfig,
    nserves: Mapping[str, int] | None = None,
) -> dict[str, FeatureVector]:
    """Feature vector per customer appearing in either event stream."""
    nserves = nserves or {}
    purchase_map = {h.customer_id: h for h in purchases}
    return_map = {h.customer_id: h for h in returns}
    features = {}
    for cid in sorted(set(purchase_map) | set(return_map)):
        events = returns_in_window(return_map.get(cid, ReturnHistory(cid)), config)
        successes = sum(1 for e in events if e.complied)
        features[cid] = FeatureVector(
            q2_failures=len(events) - successes,
            q1_successes=successes,
            nserves=int(nserves.get(cid, 0)),
            delta_hat=estimate_delta(purchase_map.get(cid, PurchaseHistory(cid)), config),
            last_status=int(events[-1].complied) if events else 1,
        )
    return features


@dataclass(frozen=True)
class LogisticModel:
    """Weights over z-scored features; constant columns are masked out.

    ``weights``/``means``/``stds`` always have one entry per feature column;
    masked (zero-variance) columns carry weight 0 and std 1 so scoring never
    divides by zero. ``loss_history`` holds the mean log-loss before training
    and after each epoch.
    """

    weights: tuple[float, ...]
    bias: float
    means: tuple[float, ...]
    stds: tuple[float, ...]
    active: tuple[bool, ...]
    loss_history: tuple[float, ...]

    @property
    def final_loss(self) -> float:
        return self.loss_history[-1]

    def score(self, fv: FeatureVector) -> float:
        """Probability that the customer's next return complies."""
        x = fv.as_array()
        z = (x - np.array(self.means)) / np.array(self.stds)
        z = z * np.array(self.active, dtype=np.float64)
        return float(_sigmoid(z @ np.array(self.weights) + self.bias))


def _sigmoid(z):
    return 1.0 / (1.0 + np.exp(-z))


def logistic_loss(weights: np.ndarray, bias: float, x: np.ndarray, y: np.ndarray) -> float:
    """Mean binary log-loss of sigmoid(x @ weights + bias) against y."""
    p = _sigmoid(x @ weights + bias)
    eps = 1e-12  # keeps the log finite for saturated predictions
    p = np.clip(p, eps, 1.0 - eps)
    return float(-np.mean(y * np.log(p) + (1.0 - y) * np.log(1.0 - p)))


def logistic_gradient(
    weights: np.ndarray, bias: float, x: np.ndarray, y: np.ndarray
) -> tuple[np.ndarray, float]:
    """Analytic gradient of `logistic_loss` in (weights, bias)."""
    residual = _sigmoid(x @ weights + bias) - y
    return x.T @ residual / len(y), float(np.mean(residual))


def train_logistic(
    features: Sequence[FeatureVector],
    labels: Sequence[bool],
    epochs: int = 500,
    learning_rate: float = 0.1,
    seed: int | None = None,
) -> LogisticModel:
    """Fit the baseline by full-batch gradient descent from zero weights.

    Features are z-scored with training-set statistics; zero-variance columns
    are dropped (mask recorded on the model). The run is fully deterministic;
    ``seed`` is accepted for interface parity with the rest of the pipeline
    but has no effect on this full-batch trainer.
    """
    del seed
    if len(features) != len(labels):
        raise ValueError("features and labels must align")
    if epochs < 0:
        raise ValueError("epochs must be >= 0")
    y = np.array([bool(v) for v in labels], dtype=np.float64)
    if len(y) == 0 or y.min() == y.max():
        raise ValueError("training needs at least one positive and one negative label")

    x_raw = np.stack([fv.as_array() for fv in features])
    means = x_raw.mean(axis=0)
    stds = x_raw.std(axis=0)
    active = stds > 0.0
    safe_stds = np.where(active, stds, 1.0)
    x = ((x_raw - means) / safe_stds)[:, active]

    w = np.zeros(x.shape[1])
    b = 0.0
    losses = [logistic_loss(w, b, x, y)]
    for _ in range(epochs):
        grad_w, grad_b = logistic_gradient(w, b, x, y)
        w -= learning_rate * grad_w
        b -= learning_rate * grad_b
        losses.append(logistic_loss(w, b, x, y))

    full_w = np.zeros(len(FEATURE_COLUMNS))
    full_w[active] = w
    return LogisticModel(
        weights=tuple(full_w),
        bias=b,
        means=tuple(means),
        stds=tuple(safe_stds),
        active=tuple(bool(a) for a in active),
        loss_history=tuple(losses),
    )


def predict(model: LogisticModel, fv: FeatureVector, threshold: float = 0.5) -> bool:
    return model.score(fv) >= threshold


def save_model(path, model: LogisticModel) -> None:
    payload = {
        "feature_columns": list(FEATURE_COLUMNS),
        "weights": list(model.weights),
        "bias": model.bias,
        "means": list(model.means),
        "stds": list(model.stds),
        "active": list(model.active),
        "final_loss": model.final_loss,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def load_model(path) -> LogisticModel:
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("feature_columns") != list(FEATURE_COLUMNS):
        raise ValueError(f"{path}: model was trained on different feature columns")
    return LogisticModel(
        weights=tuple(payload["weights"]),
        bias=float(payload["bias"]),
        means=tuple(payload["means"]),
        stds=tuple(payload["stds"]),
        active=tuple(bool(a) for a in payload["active"]),
        loss_history=(float(payload["final_loss"]),),
    )


def load_serves(path) -> dict[str, int]:
    serves: dict[str, int] = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            return serves
        if [c.strip() for c in header] != SERVES_HEADER:
            raise ValueError(f"{path}: unexpected header {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise ValueError(f"{path} line {lineno}: expected 2 fields")
            try:
                count = int(row[1])
            except ValueError:
                raise ValueError(f"{path} line {lineno}: nserves must be an integer") from None
            if count < 0:
                raise ValueError(f"{path} line {lineno}: nserves must be >= 0")
            serves[row[0].strip()] = count
    return serves


def write_serves(path, serves: Mapping[str, int]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SERVES_HEADER)
        for cid in sorted(serves):
            writer.writerow([cid, serves[cid]])


def load_ground_truth(path) -> dict[str, bool]:
    truth: dict[str, bool] = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            return truth
        if [c.strip() for c in header] != GROUND_TRUTH_HEADER:
            raise ValueError(f"{path}: unexpected header {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2 or row[1].strip() not in ("0", "1"):
                raise ValueError(f"{path} line {lineno}: expected customer_id,0/1")
            truth[row[0].strip()] = row[1].strip() == "1"
    return truth


def write_ground_truth(path, truth: Mapping[str, bool]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(GROUND_TRUTH_HEADER)
        for cid in sorted(truth):
            writer.writerow([cid, int(truth[cid])])
