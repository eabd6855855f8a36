"""Finite strategic-form games: payoff tables, best responses, pure Nash search.

Players and actions are addressed by index everywhere computation happens;
names are carried only for parsing and reporting. Games in scope are small
(a handful of players, short action lists), so equilibrium search is a plain
exhaustive scan over the profile product.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

Profile = tuple[int, ...]
Payoff = tuple[float, ...]


class GameFormatError(ValueError):
    """Raised when a game description file does not match the expected format."""


@dataclass(frozen=True)
class StrategicGame:
    """Immutable n-player game with a complete payoff table.

    ``payoffs`` maps every action profile (one action index per player, in
    player order) to a payoff vector (one float per player).
    """

    players: tuple[str, ...]
    actions: tuple[tuple[str, ...], ...]
    payoffs: Mapping[Profile, Payoff]

    def __post_init__(self):
        n = len(self.players)
        if n == 0:
            raise ValueError("game must have at least one player")
        if len(self.actions) != n:
            raise ValueError("one action list per player required")
        for i, acts in enumerate(self.actions):
            if not acts:
                raise ValueError(f"player {self.players[i]!r} has no actions")
        expected = set(itertools.product(*(range(len(a)) for a in self.actions)))
        got = set(self.payoffs)
        if got != expected:
            missing = sorted(expected - got)
            extra = sorted(got - expected)
            raise ValueError(
                f"payoff table incomplete or overfull (missing={missing[:3]}, extra={extra[:3]})"
            )
        for profile, vec in self.payoffs.items():
            if len(vec) != n:
                raise ValueError(f"payoff vector for {profile} has wrong length")

    @property
    def n_players(self) -> int:
        return len(self.players)

    def n_actions(self, player: int) -> int:
        return len(self.actions[player])

    def profiles(self) -> Iterable[Profile]:
        """All action profiles in lexicographic order."""
        return itertools.product(*(range(len(a)) for a in self.actions))

    def payoff(self, profile: Sequence[int]) -> Payoff:
        return self.payoffs[tuple(profile)]

    def profile_names(self, profile: Sequence[int]) -> tuple[str, ...]:
        return tuple(self.actions[i][a] for i, a in enumerate(profile))

    def action_index(self, player: int, name: str) -> int:
        try:
            return self.actions[player].index(name)
        except ValueError:
            raise ValueError(
                f"unknown action {name!r} for player {self.players[player]!r}"
            ) from None


def refund_game() -> StrategicGame:
    """Built-in 2x2 retailer/customer game over return-request handling.

    The retailer chooses whether to refund immediately (skipping the quality
    check); the customer chooses whether to comply with return requirements.
    """
    payoffs = {
        (0, 0): (1.0, 1.0),  # ImmediateRefund, Comply
        (0, 1): (-1.0, 2.0),  # ImmediateRefund, DontComply
        (1, 0): (2.0, -1.0),  # NoImmediateRefund, Comply
        (1, 1): (0.0, 0.0),  # NoImmediateRefund, DontComply
    }
    return StrategicGame(
        players=("Myntra", "Customer"),
        actions=(
            ("ImmediateRefund", "NoImmediateRefund"),
            ("Comply", "DontComply"),
        ),
        payoffs=payoffs,
    )


def best_responses(
    game: StrategicGame, player: int, others: Mapping[int, int]
) -> set[int]:
    """Argmax set of ``player``'s actions against fixed opponent actions.

    ``others`` must fix exactly the complement of ``player``. Ties return
    every maximizer; payoffs are compared exactly.
    """
    n = game.n_players
    if not 0 <= player < n:
        raise ValueError(f"player index {player} out of range")
    expected = set(range(n)) - {player}
    if set(others) != expected:
        raise ValueError(
            f"partial profile must fix exactly players {sorted(expected)}, got {sorted(others)}"
        )
    for i, a in others.items():
        if not 0 <= a < game.n_actions(i):
            raise ValueError(f"action {a} out of range for player {game.players[i]!r}")

    best: set[int] = set()
    best_value = -float("inf")
    for a in range(game.n_actions(player)):
        profile = tuple(a if i == player else others[i] for i in range(n))
        value = game.payoff(profile)[player]
        if value > best_value:
            best_value = value
            best = {a}
        elif value == best_value:
            best.add(a)
    return best


def find_pure_nash(game: StrategicGame) -> list[Profile]:
    """All pure-strategy Nash equilibria, in lexicographic profile order.

    A profile survives when no player has a unilateral deviation with a
    strictly greater payoff. Exhaustive over the full profile product.
    """
    equilibria = []
    for profile in game.profiles():
        payoff = game.payoff(profile)
        stable = True
        for player in range(game.n_players):
            for alt in range(game.n_actions(player)):
                if alt == profile[player]:
                    continue
                deviated = profile[:player] + (alt,) + profile[player + 1 :]
                if game.payoff(deviated)[player] > payoff[player]:
                    stable = False
                    break
            if not stable:
                break
        if stable:
            equilibria.append(profile)
    return equilibria


def parse_game(text: str) -> StrategicGame:
    """Parse the line-oriented game format.

    ::

        players: Myntra, Customer
        actions Myntra: ImmediateRefund, NoImmediateRefund
        actions Customer: Comply, DontComply
        payoff ImmediateRefund Comply: 1 1
        ...

    Whitespace around separators is ignored; blank lines and ``#`` comments
    are skipped. Every profile needs exactly one payoff line.
    """
    players: tuple[str, ...] | None = None
    action_lines: dict[str, tuple[str, ...]] = {}
    payoff_lines: list[tuple[int, tuple[str, ...], tuple[float, ...]]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if ":" not in line:
            raise GameFormatError(f"line {lineno}: expected 'key: value', got {line!r}")
        head, _, tail = line.partition(":")
        head_parts = head.split()
        if head_parts[0] == "players" and len(head_parts) == 1:
            if players is not None:
                raise GameFormatError(f"line {lineno}: duplicate players line")
            players = tuple(p.strip() for p in tail.split(",") if p.strip())
            if not players:
                raise GameFormatError(f"line {lineno}: empty player list")
        elif head_parts[0] == "actions" and len(head_parts) == 2:
            name = head_parts[1]
            if name in action_lines:
                raise GameFormatError(f"line {lineno}: duplicate actions for {name!r}")
            acts = tuple(a.strip() for a in tail.split(",") if a.strip())
            if not acts:
                raise GameFormatError(f"line {lineno}: empty action list for {name!r}")
            action_lines[name] = acts
        elif head_parts[0] == "payoff":
            action_names = tuple(head_parts[1:])
            try:
                values = tuple(float(v) for v in tail.split())
            except ValueError:
                raise GameFormatError(
                    f"line {lineno}: payoff values must be numbers: {tail!r}"
                ) from None
            payoff_lines.append((lineno, action_names, values))
        else:
            raise GameFormatError(f"line {lineno}: unknown directive {head_parts[0]!r}")

    if players is None:
        raise GameFormatError("missing 'players:' line")
    missing_players = [p for p in players if p not in action_lines]
    if missing_players:
        raise GameFormatError(f"missing actions for players: {missing_players}")
    unknown = sorted(set(action_lines) - set(players))
    if unknown:
        raise GameFormatError(f"actions given for unknown players: {unknown}")
    actions = tuple(action_lines[p] for p in players)

    payoffs: dict[Profile, Payoff] = {}
    for lineno, action_names, values in payoff_lines:
        if len(action_names) != len(players):
            raise GameFormatError(
                f"line {lineno}: payoff needs one action per player, got {action_names}"
            )
        profile = []
        for i, name in enumerate(action_names):
            if name not in actions[i]:
                raise GameFormatError(
                    f"line {lineno}: {name!r} is not an action of {players[i]!r}"
                )
            profile.append(actions[i].index(name))
        key = tuple(profile)
        if key in payoffs:
            raise GameFormatError(
                f"line {lineno}: duplicate payoff for profile {action_names}"
            )
        if len(values) != len(players):
            raise GameFormatError(
                f"line {lineno}: expected {len(players)} payoff values, got {len(values)}"
            )
        payoffs[key] = values

    for profile in itertools.product(*(range(len(a)) for a in actions)):
        if profile not in payoffs:
            names = tuple(actions[i][a] for i, a in enumerate(profile))
            raise GameFormatError(f"missing payoff line for profile {names}")

    return StrategicGame(players=players, actions=actions, payoffs=payoffs)


def load_game(path) -> StrategicGame:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_game(fh.read())
