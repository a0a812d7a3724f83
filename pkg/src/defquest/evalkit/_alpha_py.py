"""Pure-Python nominal-alpha kernel; the fallback twin of _alpha_fast.pyx.

Both kernels implement the identical computation in the identical
accumulation order, so their results agree bit for bit:

    per pairable unit u (m_u >= 2 values):
        d_u  = m_u * (m_u - 1) - sum_c n_uc * (n_uc - 1)
        obs += d_u / (m_u - 1)
        n_c += n_uc ; n += m_u
    alpha = 1 - (n - 1) * obs / (n^2 - sum_c n_c^2)

which is the coincidence-matrix nominal alpha with integer margins. Units
with fewer than two values contribute nothing. Returns NaN when nothing is
pairable; exact 1.0 when there is no observed disagreement.
"""

BACKEND_NAME = "python"


def alpha_one(values, starts, lengths, n_categories, unit_indices):
    values = list(values)
    starts = list(starts)
    lengths = list(lengths)
    n_c = [0] * n_categories
    counts = [0] * n_categories
    n = 0
    obs = 0.0
    for u in unit_indices:
        m = lengths[u]
        if m < 2:
            continue
        s = starts[u]
        for j in range(s, s + m):
            counts[values[j]] += 1
        same = 0
        for c in range(n_categories):
            cnt = counts[c]
            if cnt:
                same += cnt * (cnt - 1)
                n_c[c] += cnt
                counts[c] = 0
        d_u = m * (m - 1) - same
        obs = obs + d_u / (m - 1)
        n += m
    if n == 0:
        return float("nan")
    if obs == 0.0:
        return 1.0
    sum_sq = 0
    for c in range(n_categories):
        sum_sq += n_c[c] * n_c[c]
    expected = n * n - sum_sq
    if expected == 0:
        return float("nan")
    return 1.0 - ((n - 1.0) * obs) / expected


def alpha_batch(values, starts, lengths, n_categories, index_rows):
    values = list(values)
    starts = list(starts)
    lengths = list(lengths)
    return [
        alpha_one(values, starts, lengths, n_categories, list(row)) for row in index_rows
    ]
