"""Game-theoretic identification of elite customers.

Models the retailer-customer return-handling relationship as a repeated
2-player game, derives the continuation-probability threshold that sustains
cooperative play, estimates each customer's repetition probability from
purchase history, and classifies customers as elite accordingly, with a
synthetic-population generator and evaluation tools around the pipeline.
"""

from .behavior import (
    EstimatorConfig,
    PurchaseHistory,
    ReturnEvent,
    ReturnHistory,
    compliance_all,
    estimate_delta,
    load_purchases,
    load_returns,
)
from .classify import (
    Boundary,
    ClassifierConfig,
    EliteDecision,
    Reason,
    classify,
    classify_population,
)
from .evaluation import (
    ConfusionMatrix,
    FeatureVector,
    LabeledOutcome,
    LogisticModel,
    build_features,
    confusion,
    precision,
    predict,
    recall,
    train_logistic,
)
from .game import (
    StrategicGame,
    best_responses,
    find_pure_nash,
    load_game,
    parse_game,
    refund_game,
)
from .repeated import (
    EquilibriumReport,
    SimulationResult,
    StrategyAutomaton,
    analytic_payoff,
    available_backends,
    check_equilibrium,
    constant_strategy,
    default_backend,
    deviate_at,
    forgiving_strategy,
    grim_trigger,
    grim_trigger_threshold,
    play_stages,
    scalar_payoffs,
    simulate_payoff,
)
from .synth import PopulationSpec, SegmentSpec, SynthPopulation, generate

__version__ = "0.1.0"

__all__ = [
    "Boundary",
    "ClassifierConfig",
    "ConfusionMatrix",
    "EliteDecision",
    "EquilibriumReport",
    "EstimatorConfig",
    "FeatureVector",
    "LabeledOutcome",
    "LogisticModel",
    "PopulationSpec",
    "PurchaseHistory",
    "Reason",
    "ReturnEvent",
    "ReturnHistory",
    "SegmentSpec",
    "SimulationResult",
    "StrategicGame",
    "StrategyAutomaton",
    "SynthPopulation",
    "analytic_payoff",
    "available_backends",
    "best_responses",
    "build_features",
    "check_equilibrium",
    "classify",
    "classify_population",
    "compliance_all",
    "confusion",
    "constant_strategy",
    "default_backend",
    "deviate_at",
    "estimate_delta",
    "find_pure_nash",
    "forgiving_strategy",
    "generate",
    "grim_trigger",
    "grim_trigger_threshold",
    "load_game",
    "load_purchases",
    "load_returns",
    "parse_game",
    "play_stages",
    "precision",
    "predict",
    "recall",
    "refund_game",
    "scalar_payoffs",
    "simulate_payoff",
    "train_logistic",
]
