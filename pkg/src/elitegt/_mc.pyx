"""Compiled Monte Carlo trial kernel (hot loop of payoff simulation).

Mirrors _mc_fallback.run_trials exactly: same splitmix64 recurrence, same
accumulation order, so results are bit-identical between backends.
"""

ctypedef unsigned long long u64

cdef u64 PHI = 0x9E3779B97F4A7C15ULL


cdef inline u64 _mix64(u64 z) nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


def run_trials(
    double[::1] pay0,
    double[::1] pay1,
    long long[::1] act_a,
    long long[:, ::1] tr_a,
    Py_ssize_t init_a,
    long long[::1] act_b,
    long long[:, ::1] tr_b,
    Py_ssize_t init_b,
    Py_ssize_t n_actions_b,
    double delta,
    Py_ssize_t trials,
    u64 seed,
    double[::1] out0,
    double[::1] out1,
):
    """Fill out0/out1 with per-trial undiscounted payoff totals."""
    cdef Py_ssize_t i, sa, sb, prof
    cdef u64 state
    cdef double total0, total1

    with nogil:
        for i in range(trials):
            state = _mix64(seed + (<u64> (i + 1)) * PHI)
            sa = init_a
            sb = init_b
            total0 = 0.0
            total1 = 0.0
            while True:
                prof = act_a[sa] * n_actions_b + act_b[sb]
                total0 += pay0[prof]
                total1 += pay1[prof]
                sa = tr_a[sa, prof]
                sb = tr_b[sb, prof]
                state = state + PHI
                if (<double> (_mix64(state) >> 11)) * (2.0 ** -53) >= delta:
                    break
            out0[i] = total0
            out1[i] = total1
