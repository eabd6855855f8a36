"""Pure-Python Monte Carlo trial kernel.

Same contract and identical output (bit for bit) as the compiled kernel in
``_mc.pyx``; used automatically when the extension is not built. Automata and
payoffs arrive flattened: profile index = action_a * n_actions_b + action_b.
"""

from __future__ import annotations

from .rng import MASK64, PHI, mix64


def run_trials(
    pay0,
    pay1,
    act_a,
    tr_a,
    init_a,
    act_b,
    tr_b,
    init_b,
    n_actions_b,
    delta,
    trials,
    seed,
    out0,
    out1,
) -> None:
    """Fill out0/out1 with per-trial undiscounted payoff totals.

    Each trial plays the joint automaton from its initial states and stops
    after each stage with probability 1 - delta, so the expected total equals
    the delta-discounted payoff sum. Trial i uses splitmix64 substream i.
    """
    pay0 = list(pay0)
    pay1 = list(pay1)
    act_a = list(act_a)
    act_b = list(act_b)
    tr_a = [list(row) for row in tr_a]
    tr_b = [list(row) for row in tr_b]

    for i in range(trials):
        state = mix64((seed + (i + 1) * PHI) & MASK64)
        sa = init_a
        sb = init_b
        total0 = 0.0
        total1 = 0.0
        while True:
            prof = act_a[sa] * n_actions_b + act_b[sb]
            total0 += pay0[prof]
            total1 += pay1[prof]
            sa = tr_a[sa][prof]
            sb = tr_b[sb][prof]
            state = (state + PHI) & MASK64
            if (mix64(state) >> 11) * 2.0**-53 >= delta:
                break
        out0[i] = total0
        out1[i] = total1
