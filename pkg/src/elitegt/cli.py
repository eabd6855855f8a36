"""Command-line pipeline: game analysis, synthesis, classification, evaluation.

One binary with subcommands; every run is reproducible (all randomness comes
from explicit --seed flags). Human-readable reports go to stdout, machine
CSVs to --out paths. Input problems exit 1 with a one-line diagnostic;
internal invariant violations exit 2.
"""

from __future__ import annotations

import argparse
import os
import sys
from datetime import date

from . import behavior, evaluation, game, repeated, synth
from .classify import (
    Boundary,
    ClassifierConfig,
    Reason,
    classify_population,
    load_decisions,
    write_decisions,
)


class _Parser(argparse.ArgumentParser):
    """argparse parser that exits 1 (not 2) on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _iso_date(text: str) -> date:
    try:
        return date.fromisoformat(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad date {text!r} (expected YYYY-MM-DD)") from None


def _load_game(args) -> game.StrategicGame:
    if getattr(args, "game", None):
        return game.load_game(args.game)
    return game.refund_game()


def _parse_profile(g: game.StrategicGame, text: str) -> tuple[int, ...]:
    names = [part.strip() for part in text.split(",")]
    if len(names) != g.n_players:
        raise ValueError(f"profile {text!r} needs {g.n_players} comma-separated actions")
    return tuple(g.action_index(i, name) for i, name in enumerate(names))


def _resolve_profiles(g: game.StrategicGame, args) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Cooperative/punishment profiles from flags, with sensible defaults.

    Defaults: punishment is the unique pure Nash profile (ambiguous games
    must pass --punish), cooperation is the profile with the highest total
    payoff (lexicographic tiebreak).
    """
    if getattr(args, "coop", None):
        coop = _parse_profile(g, args.coop)
    else:
        coop = max(g.profiles(), key=lambda prof: (sum(g.payoff(prof)), tuple(-a for a in prof)))
    if getattr(args, "punish", None):
        punish = _parse_profile(g, args.punish)
    else:
        equilibria = game.find_pure_nash(g)
        if len(equilibria) != 1:
            raise ValueError(
                f"game has {len(equilibria)} pure equilibria; pass --punish explicitly"
            )
        punish = equilibria[0]
    return coop, punish


def _estimator_config(args) -> behavior.EstimatorConfig:
    return behavior.EstimatorConfig(
        reference_date=args.reference_date,
        window_days=args.window_days,
        gap_days=args.gap_days,
    )


def _fmt(value: float) -> str:
    return f"{value:g}"


def _fmt_ratio(value: float | None) -> str:
    return "undefined" if value is None else f"{value:.6f}"


def cmd_equilibria(args) -> int:
    g = _load_game(args)
    equilibria = game.find_pure_nash(g)
    print(f"game: {', '.join(g.players)}")
    if not equilibria:
        print("pure Nash equilibria: none")
        return 0
    print(f"pure Nash equilibria: {len(equilibria)}")
    for profile in equilibria:
        names = " / ".join(g.profile_names(profile))
        payoffs = ", ".join(_fmt(v) for v in g.payoff(profile))
        print(f"  ({names})  payoffs: ({payoffs})")
    return 0


def cmd_threshold(args) -> int:
    scalar_flags = [args.c, args.d, args.p]
    if any(v is not None for v in scalar_flags):
        if any(v is None for v in scalar_flags):
            raise ValueError("--c, --d and --p must be given together")
        c, d, p = args.c, args.d, args.p
    else:
        g = _load_game(args)
        coop, punish = _resolve_profiles(g, args)
        c, d, p = repeated.scalar_payoffs(g, coop, punish)
        print(
            f"profiles: cooperate=({'/'.join(g.profile_names(coop))})"
            f" punish=({'/'.join(g.profile_names(punish))})"
        )
    threshold = repeated.grim_trigger_threshold(c, d, p)
    print(f"c={_fmt(c)} d={_fmt(d)} p={_fmt(p)}")
    print(f"delta* = {_fmt(threshold)}")
    return 0


def cmd_simulate(args) -> int:
    g = _load_game(args)
    coop, punish = _resolve_profiles(g, args)
    grim_pair = repeated.grim_trigger(g, coop, punish)
    forgiving_pair = repeated.forgiving_strategy(g, coop, punish)

    def automaton(name: str, player: int) -> repeated.StrategyAutomaton:
        if name == "grim":
            return grim_pair[player]
        if name == "forgiving":
            return forgiving_pair[player]
        if name == "always-coop":
            return repeated.constant_strategy(g, player, coop[player])
        if name == "always-punish":
            return repeated.constant_strategy(g, player, punish[player])
        raise ValueError(f"unknown strategy {name!r}")

    aut_a = automaton(args.strategy_a, 0)
    aut_b = automaton(args.strategy_b, 1)

    if args.trace:
        print(f"first {args.trace} stages:")
        for stage, (profile, payoff) in enumerate(
            repeated.play_stages(g, aut_a, aut_b, args.trace)
        ):
            names = " / ".join(g.profile_names(profile))
            values = ", ".join(_fmt(v) for v in payoff)
            print(f"  stage {stage}: ({names})  payoffs: ({values})")

    result = repeated.simulate_payoff(
        g, aut_a, aut_b, args.delta, args.trials, args.seed, backend=args.backend
    )
    print(
        f"simulated ({args.trials} trials, delta={_fmt(args.delta)},"
        f" backend={repeated.default_backend() if args.backend == 'auto' else args.backend}):"
    )
    for player in (0, 1):
        print(
            f"  {g.players[player]}: {result.mean[player]:.6f}"
            f" +/- {result.stderr[player]:.6f} (stderr)"
        )
    analytic = repeated.analytic_payoff(g, aut_a, aut_b, args.delta)
    print(f"analytic: {g.players[0]}={analytic[0]:.6f} {g.players[1]}={analytic[1]:.6f}")
    return 0


def cmd_synth(args) -> int:
    spec = synth.load_population_spec(args.spec, args.seed)
    population = synth.generate(spec)
    os.makedirs(args.out, exist_ok=True)
    behavior.write_purchases(os.path.join(args.out, "purchases.csv"), population.purchases)
    behavior.write_returns(os.path.join(args.out, "returns.csv"), population.returns)
    evaluation.write_serves(os.path.join(args.out, "serves.csv"), population.nserves)
    evaluation.write_ground_truth(
        os.path.join(args.out, "ground_truth.csv"), population.ground_truth
    )
    n_purchases = sum(len(h.purchase_dates) for h in population.purchases)
    n_returns = sum(len(h.events) for h in population.returns)
    print(f"customers: {len(population.segment_of)}")
    print(f"purchases: {n_purchases}")
    print(f"returns: {n_returns}")
    print(f"ground-truth rows: {len(population.ground_truth)}")
    print(f"wrote purchases.csv, returns.csv, serves.csv, ground_truth.csv to {args.out}")
    return 0


def cmd_estimate(args) -> int:
    config = _estimator_config(args)
    histories = behavior.load_purchases(args.purchases)
    estimates = [(h.customer_id, behavior.estimate_delta(h, config)) for h in histories]
    print(f"customers: {len(estimates)}")
    if estimates:
        mean = sum(v for _, v in estimates) / len(estimates)
        print(f"mean delta_hat: {mean:.6f}")
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write("customer_id,delta_hat\n")
            for cid, value in estimates:
                fh.write(f"{cid},{value:.6f}\n")
        print(f"wrote {args.out}")
    return 0


def cmd_classify(args) -> int:
    estimator = _estimator_config(args)
    if args.game:
        g = game.load_game(args.game)
        coop, punish = _resolve_profiles(g, args)
        tau = repeated.grim_trigger_threshold(*repeated.scalar_payoffs(g, coop, punish))
        print(f"tau derived from game: {_fmt(tau)}")
    else:
        tau = args.tau
    config = ClassifierConfig(estimator=estimator, tau=tau, boundary=Boundary(args.boundary))

    purchases = behavior.load_purchases(args.purchases)
    returns = behavior.load_returns(args.returns)
    decisions = classify_population(purchases, returns, config)
    write_decisions(args.out, decisions)

    return_map = {h.customer_id: h for h in returns}
    vacuous = sum(
        1
        for d in decisions
        if not behavior.returns_in_window(
            return_map.get(d.customer_id, behavior.ReturnHistory(d.customer_id)), estimator
        )
    )
    counts = {reason: 0 for reason in Reason}
    for d in decisions:
        counts[d.reason] += 1
    print(f"customers: {len(decisions)}")
    for reason in Reason:
        print(f"  {reason.value}: {counts[reason]}")
    print(f"vacuously compliant (no returns in window): {vacuous}")
    print(f"wrote {args.out}")
    return 0


def _features_for(args, ids) -> dict[str, evaluation.FeatureVector]:
    config = _estimator_config(args)
    purchases = behavior.load_purchases(args.purchases)
    returns = behavior.load_returns(args.returns)
    serves = evaluation.load_serves(args.serves) if args.serves else {}
    features = evaluation.build_features(purchases, returns, config, serves)
    missing = [cid for cid in ids if cid not in features]
    if missing:
        raise ValueError(f"no event history for customers: {missing[:5]}")
    return features


def cmd_train_baseline(args) -> int:
    truth = evaluation.load_ground_truth(args.ground_truth)
    if not truth:
        raise ValueError(f"{args.ground_truth}: no labeled customers")
    ids = sorted(truth)
    features = _features_for(args, ids)
    model = evaluation.train_logistic(
        [features[cid] for cid in ids],
        [truth[cid] for cid in ids],
        epochs=args.epochs,
        learning_rate=args.learning_rate,
        seed=args.seed,
    )
    evaluation.save_model(args.out, model)
    correct = sum(
        1 for cid in ids if evaluation.predict(model, features[cid]) == truth[cid]
    )
    print(f"trained on {len(ids)} customers, {args.epochs} epochs")
    print(f"final loss: {model.final_loss:.6f}")
    print(f"training accuracy: {correct / len(ids):.6f}")
    print(f"wrote {args.out}")
    return 0


def cmd_evaluate(args) -> int:
    decisions = {d.customer_id: d for d in load_decisions(args.decisions)}
    truth = evaluation.load_ground_truth(args.ground_truth)
    if not truth:
        raise ValueError(f"{args.ground_truth}: no labeled customers")
    ids = sorted(truth)
    missing = [cid for cid in ids if cid not in decisions]
    if missing:
        raise ValueError(f"decisions missing for labeled customers: {missing[:5]}")

    methods: list[tuple[str, evaluation.ConfusionMatrix]] = []
    game_outcomes = [
        evaluation.LabeledOutcome(cid, decisions[cid].elite, truth[cid]) for cid in ids
    ]
    methods.append(("game", evaluation.confusion(game_outcomes)))

    if args.model:
        model = evaluation.load_model(args.model)
        features = _features_for(args, ids)
        logistic_outcomes = [
            evaluation.LabeledOutcome(
                cid, evaluation.predict(model, features[cid]), truth[cid]
            )
            for cid in ids
        ]
        methods.append(("logistic", evaluation.confusion(logistic_outcomes)))

    print(f"evaluated customers: {len(ids)}")
    for name, m in methods:
        print(
            f"{name}: tp={m.tp} fp={m.fp} fn={m.fn} tn={m.tn}"
            f" precision={_fmt_ratio(evaluation.precision(m))}"
            f" recall={_fmt_ratio(evaluation.recall(m))}"
        )
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write("method,tp,fp,fn,tn,precision,recall\n")
            for name, m in methods:
                prec = evaluation.precision(m)
                rec = evaluation.recall(m)
                fh.write(
                    f"{name},{m.tp},{m.fp},{m.fn},{m.tn},"
                    f"{'NA' if prec is None else f'{prec:.6f}'},"
                    f"{'NA' if rec is None else f'{rec:.6f}'}\n"
                )
        print(f"wrote {args.out}")
    return 0


def _add_game_profile_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--game", help="game description file (default: built-in refund game)")
    parser.add_argument(
        "--coop",
        help="cooperative profile as comma-separated action names"
        " (default: highest total payoff)",
    )
    parser.add_argument(
        "--punish",
        help="punishment profile as comma-separated action names"
        " (default: the unique pure Nash profile)",
    )


def _add_estimator_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--reference-date",
        type=_iso_date,
        required=True,
        help="estimation reference date (YYYY-MM-DD)",
    )
    parser.add_argument(
        "--window-days",
        type=int,
        default=behavior.DEFAULT_WINDOW_DAYS,
        help="look-back window length in days (default %(default)s)",
    )
    parser.add_argument(
        "--gap-days",
        type=int,
        default=behavior.DEFAULT_GAP_DAYS,
        help="max days between purchases to count as a repetition (default %(default)s)",
    )


def build_parser() -> _Parser:
    parser = _Parser(prog="elitegt", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("equilibria", help="list pure Nash equilibria of a game")
    p.add_argument("--game", help="game description file (default: built-in refund game)")
    p.set_defaults(func=cmd_equilibria)

    p = sub.add_parser(
        "threshold", help="minimum continuation probability for cooperative play"
    )
    _add_game_profile_flags(p)
    p.add_argument("--c", type=float, help="cooperative stage payoff")
    p.add_argument("--d", type=float, help="deviation stage payoff")
    p.add_argument("--p", type=float, help="punishment stage payoff")
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("simulate", help="Monte Carlo payoff of an automaton pair")
    _add_game_profile_flags(p)
    p.add_argument(
        "--strategy-a",
        default="grim",
        choices=["grim", "forgiving", "always-coop", "always-punish"],
        help="first player's strategy (default %(default)s)",
    )
    p.add_argument(
        "--strategy-b",
        default="grim",
        choices=["grim", "forgiving", "always-coop", "always-punish"],
        help="second player's strategy (default %(default)s)",
    )
    p.add_argument("--delta", type=float, required=True, help="continuation probability in [0,1)")
    p.add_argument("--trials", type=int, default=100_000, help="Monte Carlo trials (default %(default)s)")
    p.add_argument("--seed", type=int, required=True, help="64-bit simulation seed")
    p.add_argument(
        "--backend",
        default="auto",
        choices=["auto", "cython", "python"],
        help="trial kernel to use (default %(default)s)",
    )
    p.add_argument("--trace", type=int, default=0, help="also print the first N deterministic stages")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("synth", help="generate a synthetic customer population")
    p.add_argument("--spec", required=True, help="population description file")
    p.add_argument("--out", required=True, help="output directory for the four CSVs")
    p.add_argument("--seed", type=int, required=True, help="64-bit generation seed")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("estimate", help="estimate repetition probability per customer")
    p.add_argument("--purchases", required=True, help="purchases.csv")
    _add_estimator_flags(p)
    p.add_argument("--out", help="write customer_id,delta_hat CSV here")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("classify", help="classify customers as elite / not elite")
    p.add_argument("--purchases", required=True, help="purchases.csv")
    p.add_argument("--returns", required=True, help="returns.csv")
    _add_estimator_flags(p)
    p.add_argument("--tau", type=float, default=0.5, help="eliteness threshold (default %(default)s)")
    _add_game_profile_flags(p)
    p.add_argument(
        "--boundary",
        default=Boundary.STRICT.value,
        choices=[b.value for b in Boundary],
        help="treatment of delta_hat exactly equal to tau (default %(default)s)",
    )
    p.add_argument("--out", required=True, help="write decisions.csv here")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("train-baseline", help="train the logistic-regression baseline")
    p.add_argument("--purchases", required=True, help="purchases.csv")
    p.add_argument("--returns", required=True, help="returns.csv")
    p.add_argument("--ground-truth", required=True, help="ground_truth.csv with labels")
    p.add_argument("--serves", help="optional serves.csv with per-customer counts")
    _add_estimator_flags(p)
    p.add_argument("--epochs", type=int, default=500, help="training epochs (default %(default)s)")
    p.add_argument(
        "--learning-rate", type=float, default=0.1, help="gradient step size (default %(default)s)"
    )
    p.add_argument("--seed", type=int, default=0, help="accepted for reproducible pipelines")
    p.add_argument("--out", required=True, help="write model JSON here")
    p.set_defaults(func=cmd_train_baseline)

    p = sub.add_parser("evaluate", help="score decisions against held-out compliance")
    p.add_argument("--decisions", required=True, help="decisions.csv from classify")
    p.add_argument("--ground-truth", required=True, help="ground_truth.csv")
    p.add_argument("--model", help="optional model JSON to also score the logistic baseline")
    p.add_argument("--purchases", help="purchases.csv (needed with --model)")
    p.add_argument("--returns", help="returns.csv (needed with --model)")
    p.add_argument("--serves", help="optional serves.csv (used with --model)")
    p.add_argument(
        "--reference-date", type=_iso_date, help="estimation reference date (needed with --model)"
    )
    p.add_argument(
        "--window-days",
        type=int,
        default=behavior.DEFAULT_WINDOW_DAYS,
        help="look-back window length in days (default %(default)s)",
    )
    p.add_argument(
        "--gap-days",
        type=int,
        default=behavior.DEFAULT_GAP_DAYS,
        help="max days between purchases to count as a repetition (default %(default)s)",
    )
    p.add_argument("--out", help="write method metrics CSV here")
    p.set_defaults(func=cmd_evaluate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "command", None) == "evaluate" and args.model:
        for flag in ("purchases", "returns", "reference_date"):
            if getattr(args, flag) is None:
                print(f"error: --model requires --{flag.replace('_', '-')}", file=sys.stderr)
                return 1
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # invariant violation; distinct exit code
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
