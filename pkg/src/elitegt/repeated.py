"""Repeated play of a 2-player stage game under a continuation probability.

The stage game replays each round with probability ``delta``; a strategy is a
finite-state automaton reading the observed joint action each stage. Total
utility is the delta-discounted sum of stage payoffs, which equals the
expected undiscounted total under geometric stopping - that identity is the
bridge between the exact payoff computation (`analytic_payoff`) and the
Monte Carlo estimate (`simulate_payoff`), and the two are tested against
each other.

The Monte Carlo inner loop runs on a compiled kernel when the extension is
built, with a bit-identical pure-Python fallback selected at import.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, NamedTuple, Sequence

import numpy as np

from . import _mc_fallback
from .game import Profile, StrategicGame

try:
    from . import _mc as _mc_compiled
except ImportError:  # extension not built; fallback covers the contract
    _mc_compiled = None

DEVIATION_STAGE_CAP = 10**6
EQUILIBRIUM_TOLERANCE = 1e-12

COOPERATE = "Cooperate"
PUNISH = "Punish"


@dataclass(frozen=True)
class StrategyAutomaton:
    """Deterministic strategy: a state machine over observed joint actions.

    ``action_of`` gives the owner's action index in each state; ``transition``
    maps (state, observed joint profile) to the next state and must be total
    over the bound game's profiles (checked when the automaton is played).
    """

    states: tuple[str, ...]
    initial: str
    action_of: Mapping[str, int]
    transition: Mapping[tuple[str, Profile], str]

    def __post_init__(self):
        if not self.states:
            raise ValueError("automaton needs at least one state")
        if len(set(self.states)) != len(self.states):
            raise ValueError("duplicate state names")
        if self.initial not in self.states:
            raise ValueError(f"initial state {self.initial!r} not in state list")
        missing = [s for s in self.states if s not in self.action_of]
        if missing:
            raise ValueError(f"states without an action: {missing[:3]}")


class SimulationResult(NamedTuple):
    mean: tuple[float, float]
    stderr: tuple[float, float]


@dataclass(frozen=True)
class EquilibriumReport:
    """Outcome of a one-shot deviation scan from the cooperative path.

    ``worst_*`` describe the most profitable deviation found; when a game
    offers no alternative action at all they are (-1, -1, 0.0).
    """

    is_equilibrium: bool
    worst_player: int
    worst_stage: int
    worst_gain: float


def _require_two_players(game: StrategicGame) -> None:
    if game.n_players != 2:
        raise ValueError("repeated-game operations support exactly 2 players")


def _check_profile(game: StrategicGame, profile: Sequence[int]) -> Profile:
    profile = tuple(profile)
    if len(profile) != game.n_players:
        raise ValueError(f"profile {profile} has wrong length")
    for i, a in enumerate(profile):
        if not 0 <= a < game.n_actions(i):
            raise ValueError(
                f"action {a} out of range for player {game.players[i]!r}"
            )
    return profile


def grim_trigger(
    game: StrategicGame, coop_profile: Sequence[int], punish_profile: Sequence[int]
) -> tuple[StrategyAutomaton, StrategyAutomaton]:
    """Trigger-strategy pair: cooperate until any other joint action is seen,
    then punish forever."""
    _require_two_players(game)
    coop = _check_profile(game, coop_profile)
    punish = _check_profile(game, punish_profile)
    profiles = list(game.profiles())
    pair = []
    for player in (0, 1):
        transition: dict[tuple[str, Profile], str] = {}
        for prof in profiles:
            transition[(COOPERATE, prof)] = COOPERATE if prof == coop else PUNISH
            transition[(PUNISH, prof)] = PUNISH
        pair.append(
            StrategyAutomaton(
                states=(COOPERATE, PUNISH),
                initial=COOPERATE,
                action_of={COOPERATE: coop[player], PUNISH: punish[player]},
                transition=transition,
            )
        )
    return pair[0], pair[1]


def forgiving_strategy(
    game: StrategicGame, coop_profile: Sequence[int], punish_profile: Sequence[int]
) -> tuple[StrategyAutomaton, StrategyAutomaton]:
    """Trigger pair that returns to cooperation after a full punishment round.

    Cooperates after observing either the cooperative or the punishment joint
    action; punishes after anything else (one-sided deviations). Only an
    equilibrium in the no-discounting limit, so inspect it by simulation or
    `play_stages` rather than `analytic_payoff` at delta -> 1.
    """
    _require_two_players(game)
    coop = _check_profile(game, coop_profile)
    punish = _check_profile(game, punish_profile)
    profiles = list(game.profiles())
    pair = []
    for player in (0, 1):
        transition: dict[tuple[str, Profile], str] = {}
        for state in (COOPERATE, PUNISH):
            for prof in profiles:
                nxt = COOPERATE if prof in (coop, punish) else PUNISH
                transition[(state, prof)] = nxt
        pair.append(
            StrategyAutomaton(
                states=(COOPERATE, PUNISH),
                initial=COOPERATE,
                action_of={COOPERATE: coop[player], PUNISH: punish[player]},
                transition=transition,
            )
        )
    return pair[0], pair[1]


def constant_strategy(game: StrategicGame, player: int, action: int) -> StrategyAutomaton:
    """Single-state automaton that always plays ``action``."""
    _require_two_players(game)
    if not 0 <= action < game.n_actions(player):
        raise ValueError(f"action {action} out of range for player {game.players[player]!r}")
    transition = {("Fixed", prof): "Fixed" for prof in game.profiles()}
    return StrategyAutomaton(("Fixed",), "Fixed", {"Fixed": action}, transition)


def deviate_at(k: int, base: StrategyAutomaton, deviation_action: int) -> StrategyAutomaton:
    """Copy of ``base`` that plays ``deviation_action`` at stage k only.

    Stages 0..k-1 mimic ``base`` (including its state updates on what is
    observed); stage k plays the deviation; afterwards the automaton follows
    ``base``'s transition logic from its post-deviation state. State count
    grows linearly in k, hence the stage cap.
    """
    if k < 0:
        raise ValueError("deviation stage must be >= 0")
    if k > DEVIATION_STAGE_CAP:
        raise ValueError(f"deviation stage {k} exceeds cap {DEVIATION_STAGE_CAP}")
    if deviation_action < 0:
        raise ValueError("deviation action must be a valid action index")
    profiles = sorted({prof for (_state, prof) in base.transition})
    if not profiles:
        raise ValueError("base automaton has no transitions")

    staged = [f"dev{j}:{s}" for j in range(k + 1) for s in base.states]
    states = tuple(staged) + base.states
    if len(set(states)) != len(states):
        raise ValueError("base state names collide with staged names")

    action_of: dict[str, int] = dict(base.action_of)
    transition: dict[tuple[str, Profile], str] = {
        (s, prof): base.transition[(s, prof)] for s in base.states for prof in profiles
    }
    for j in range(k + 1):
        for s in base.states:
            name = f"dev{j}:{s}"
            action_of[name] = base.action_of[s] if j < k else deviation_action
            for prof in profiles:
                nxt = base.transition[(s, prof)]
                transition[(name, prof)] = f"dev{j + 1}:{nxt}" if j < k else nxt
    return StrategyAutomaton(
        states=states,
        initial=f"dev0:{base.initial}",
        action_of=action_of,
        transition=transition,
    )


def play_stages(
    game: StrategicGame,
    aut_a: StrategyAutomaton,
    aut_b: StrategyAutomaton,
    n_stages: int,
) -> list[tuple[Profile, tuple[float, ...]]]:
    """Deterministic trace of the first ``n_stages`` joint actions and payoffs."""
    _require_two_players(game)
    sa, sb = aut_a.initial, aut_b.initial
    trace = []
    for _ in range(n_stages):
        prof = (aut_a.action_of[sa], aut_b.action_of[sb])
        _check_profile(game, prof)
        trace.append((prof, game.payoff(prof)))
        try:
            sa = aut_a.transition[(sa, prof)]
            sb = aut_b.transition[(sb, prof)]
        except KeyError as exc:
            raise ValueError(f"automaton transition missing for {exc.args[0]}") from None
    return trace


def analytic_payoff(
    game: StrategicGame,
    aut_a: StrategyAutomaton,
    aut_b: StrategyAutomaton,
    delta: float,
) -> tuple[float, float]:
    """Exact discounted payoff pair for deterministic automaton play.

    The joint-state sequence is eventually periodic (it revisits a pair
    within |states_a| * |states_b| steps), so the walk records stage payoffs
    until the first revisit and closes the periodic tail with the geometric
    series formula. Exact up to floating-point rounding.
    """
    _require_two_players(game)
    if not 0.0 <= delta < 1.0:
        if delta == 1.0:
            raise ValueError(
                "discounted payoff diverges at delta = 1; "
                "use simulate_payoff with delta < 1 or play_stages for a finite trace"
            )
        raise ValueError(f"delta must be in [0, 1), got {delta}")

    seen: dict[tuple[str, str], int] = {}
    stage_payoffs: list[tuple[float, ...]] = []
    sa, sb = aut_a.initial, aut_b.initial
    while (sa, sb) not in seen:
        seen[(sa, sb)] = len(stage_payoffs)
        prof = (aut_a.action_of[sa], aut_b.action_of[sb])
        _check_profile(game, prof)
        stage_payoffs.append(game.payoff(prof))
        try:
            sa = aut_a.transition[(sa, prof)]
            sb = aut_b.transition[(sb, prof)]
        except KeyError as exc:
            raise ValueError(f"automaton transition missing for {exc.args[0]}") from None

    cycle_start = seen[(sa, sb)]
    total0 = total1 = 0.0
    weight = 1.0
    for u in stage_payoffs[:cycle_start]:
        total0 += weight * u[0]
        total1 += weight * u[1]
        weight *= delta
    cycle0 = cycle1 = 0.0
    cycle_weight = 1.0
    for u in stage_payoffs[cycle_start:]:
        cycle0 += cycle_weight * u[0]
        cycle1 += cycle_weight * u[1]
        cycle_weight *= delta
    cycle_len = len(stage_payoffs) - cycle_start
    closing = weight / (1.0 - delta**cycle_len)
    return (total0 + closing * cycle0, total1 + closing * cycle1)


def _lower(game: StrategicGame, aut: StrategyAutomaton):
    """Flatten an automaton to index arrays for the trial kernels."""
    n0, n1 = game.n_actions(0), game.n_actions(1)
    state_index = {s: i for i, s in enumerate(aut.states)}
    act = np.empty(len(aut.states), dtype=np.int64)
    tr = np.empty((len(aut.states), n0 * n1), dtype=np.int64)
    for s, i in state_index.items():
        act[i] = aut.action_of[s]
        for a0 in range(n0):
            for a1 in range(n1):
                try:
                    nxt = aut.transition[(s, (a0, a1))]
                except KeyError:
                    raise ValueError(
                        f"automaton transition missing for ({s!r}, {(a0, a1)})"
                    ) from None
                tr[i, a0 * n1 + a1] = state_index[nxt]
    return act, tr, state_index[aut.initial]


def available_backends() -> tuple[str, ...]:
    return ("cython", "python") if _mc_compiled is not None else ("python",)


def default_backend() -> str:
    return available_backends()[0]


def _trial_kernel(backend: str):
    if backend == "auto":
        backend = default_backend()
    if backend == "cython":
        if _mc_compiled is None:
            raise ValueError("compiled kernel not built; use backend='python'")
        return _mc_compiled.run_trials
    if backend == "python":
        return _mc_fallback.run_trials
    raise ValueError(f"unknown backend {backend!r}")


def simulate_payoff(
    game: StrategicGame,
    aut_a: StrategyAutomaton,
    aut_b: StrategyAutomaton,
    delta: float,
    trials: int,
    seed: int,
    backend: str = "auto",
) -> SimulationResult:
    """Monte Carlo estimate of the discounted payoff pair.

    Each trial plays stages until a Bernoulli(1 - delta) stop fires and sums
    the undiscounted stage payoffs; the expectation of that total equals the
    discounted sum, so the trial mean estimates `analytic_payoff`. Output is
    deterministic given ``seed`` (trial i draws from splitmix64 substream i,
    so any partition of the trial range would merge to the same result).
    """
    _require_two_players(game)
    if not 0.0 <= delta < 1.0:
        raise ValueError(f"delta must be in [0, 1) for geometric stopping, got {delta}")
    if trials <= 0:
        raise ValueError("trials must be positive")

    n1 = game.n_actions(1)
    pay0 = np.empty(game.n_actions(0) * n1, dtype=np.float64)
    pay1 = np.empty_like(pay0)
    for a0 in range(game.n_actions(0)):
        for a1 in range(n1):
            u = game.payoff((a0, a1))
            pay0[a0 * n1 + a1] = u[0]
            pay1[a0 * n1 + a1] = u[1]
    act_a, tr_a, init_a = _lower(game, aut_a)
    act_b, tr_b, init_b = _lower(game, aut_b)

    out0 = np.empty(trials, dtype=np.float64)
    out1 = np.empty_like(out0)
    _trial_kernel(backend)(
        pay0, pay1, act_a, tr_a, init_a, act_b, tr_b, init_b,
        n1, float(delta), trials, seed & ((1 << 64) - 1), out0, out1,
    )

    mean = (float(out0.mean()), float(out1.mean()))
    if trials > 1:
        stderr = (
            float(out0.std(ddof=1) / math.sqrt(trials)),
            float(out1.std(ddof=1) / math.sqrt(trials)),
        )
    else:
        stderr = (float("nan"), float("nan"))
    return SimulationResult(mean=mean, stderr=stderr)


def grim_trigger_threshold(c: float, d: float, p: float) -> float:
    """Smallest continuation probability sustaining cooperation by trigger play.

    ``c`` is the cooperative stage payoff, ``d`` the best one-stage deviation
    payoff, ``p`` the punishment stage payoff. Deviating at any stage trades
    the cooperative tail c/(1-delta) for d now plus the punishment tail, so
    cooperation survives exactly when delta >= (d - c) / (d - p).
    """
    if d <= c:
        raise ValueError(
            "no temptation (d <= c): cooperation is an equilibrium for every delta"
        )
    if c <= p:
        raise ValueError(
            "cooperation not sustainable (c <= p): punishment pays at least as much"
        )
    return (d - c) / (d - p)


def scalar_payoffs(
    game: StrategicGame, coop_profile: Sequence[int], punish_profile: Sequence[int]
) -> tuple[float, float, float]:
    """Extract (c, d, p) from a 2-player game symmetric in the given profiles.

    c and p are the common cooperative/punishment stage payoffs; d is the
    common best unilateral deviation payoff from the cooperative profile.
    Raises when the two players disagree on any of the three values.
    """
    _require_two_players(game)
    coop = _check_profile(game, coop_profile)
    punish = _check_profile(game, punish_profile)
    u_coop = game.payoff(coop)
    u_punish = game.payoff(punish)
    if u_coop[0] != u_coop[1]:
        raise ValueError(f"cooperative payoffs differ between players: {u_coop}")
    if u_punish[0] != u_punish[1]:
        raise ValueError(f"punishment payoffs differ between players: {u_punish}")
    best_dev = []
    for player in (0, 1):
        candidates = [
            game.payoff(coop[:player] + (a,) + coop[player + 1 :])[player]
            for a in range(game.n_actions(player))
            if a != coop[player]
        ]
        if not candidates:
            raise ValueError(f"player {game.players[player]!r} has no deviation")
        best_dev.append(max(candidates))
    if best_dev[0] != best_dev[1]:
        raise ValueError(f"deviation payoffs differ between players: {best_dev}")
    return (u_coop[0], best_dev[0], u_punish[0])


def check_equilibrium(
    game: StrategicGame,
    coop_profile: Sequence[int],
    punish_profile: Sequence[int],
    delta: float,
    max_k: int = 50,
) -> EquilibriumReport:
    """Scan one-shot deviations at stages 0..max_k against trigger play.

    For each player, each stage k and each alternative action, compares the
    deviator's discounted payoff with the cooperative baseline. Equilibrium
    holds when no deviation gains more than EQUILIBRIUM_TOLERANCE. Scans
    on-path deviations only; it does not certify behavior after histories
    that trigger play never reaches.
    """
    if max_k < 0:
        raise ValueError("max_k must be >= 0")
    aut_a, aut_b = grim_trigger(game, coop_profile, punish_profile)
    baseline = analytic_payoff(game, aut_a, aut_b, delta)

    worst_gain = -float("inf")
    worst_player = worst_stage = -1
    for player, own, opp in ((0, aut_a, aut_b), (1, aut_b, aut_a)):
        coop_action = tuple(coop_profile)[player]
        for k in range(max_k + 1):
            for alt in range(game.n_actions(player)):
                if alt == coop_action:
                    continue
                deviator = deviate_at(k, own, alt)
                if player == 0:
                    pay = analytic_payoff(game, deviator, opp, delta)
                else:
                    pay = analytic_payoff(game, opp, deviator, delta)
                gain = pay[player] - baseline[player]
                if gain > worst_gain:
                    worst_gain = gain
                    worst_player = player
                    worst_stage = k
    if worst_player < 0:
        return EquilibriumReport(True, -1, -1, 0.0)
    return EquilibriumReport(
        is_equilibrium=worst_gain <= EQUILIBRIUM_TOLERANCE,
        worst_player=worst_player,
        worst_stage=worst_stage,
        worst_gain=worst_gain,
    )
