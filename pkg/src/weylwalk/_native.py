"""Compiled Fincke-Pohst leaf search for the curve count.

The kernel walks the same integer recursion as ``_Plan.run`` (exact mode)
and keeps only vectors whose pairings with a given set of columns are all
non-negative.  All inputs must fit comfortably in int64; the caller checks.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _isqrt(q):
    r = np.int64(np.sqrt(np.float64(q)))
    while r * r > q:
        r -= 1
    while (r + 1) * (r + 1) <= q:
        r += 1
    return r


@njit(cache=True)
def _keep(v, pair):
    m = pair.shape[1]
    n = v.shape[0]
    for j in range(m):
        s = 0
        for k in range(n):
            s += v[k] * pair[k, j]
        if s < 0:
            return False
    return True


@njit(cache=True)
def filtered_slice(dens, coef, const, weights, budget, tk, base, pair, out):
    """Fill ``out`` with base + z tk over exact solutions z that pass the filter.

    Returns (kept, candidates).  If kept exceeds len(out) only the count is
    valid and the caller retries with a larger buffer.
    """
    n = dens.shape[0]
    dim = tk.shape[1]
    cap = out.shape[0]
    kept = 0
    seen = 0
    part = np.zeros((n, n), dtype=np.int64)
    rem = np.zeros(n, dtype=np.int64)
    x = np.zeros(n, dtype=np.int64)
    hi = np.zeros(n, dtype=np.int64)
    v = np.zeros(dim, dtype=np.int64)
    for i in range(n):
        part[n - 1, i] = const[i]
    level = n - 1
    rem[level] = budget
    # open the top level
    tmax = _isqrt(rem[level] // weights[level])
    p = part[level, level]
    x[level] = -((tmax + p) // dens[level]) - 1
    hi[level] = (tmax - p) // dens[level]
    while level < n:
        x[level] += 1
        if x[level] > hi[level]:
            level += 1
            continue
        den = dens[level]
        p = part[level, level]
        t = den * x[level] + p
        nr = rem[level] - weights[level] * t * t
        if nr < 0:
            continue
        if level == 1:
            # level 0 is solved directly
            w0 = weights[0]
            if nr % w0 != 0:
                continue
            q = nr // w0
            r = _isqrt(q)
            if r * r != q:
                continue
            p0 = part[1, 0] + coef[0, 1] * x[1]
            for sgn in range(2):
                if sgn == 1 and r == 0:
                    break
                tt = r if sgn == 0 else -r
                num = tt - p0
                if num % dens[0] != 0:
                    continue
                x[0] = num // dens[0]
                seen += 1
                for k in range(dim):
                    s = base[k]
                    for i in range(n):
                        s += x[i] * tk[i, k]
                    v[k] = s
                if _keep(v, pair):
                    if kept < cap:
                        out[kept, :] = v
                    kept += 1
            continue
        # descend
        nl = level - 1
        for i in range(level):
            part[nl, i] = part[level, i] + coef[i, level] * x[level]
        rem[nl] = nr
        tmax = _isqrt(nr // weights[nl])
        p = part[nl, nl]
        x[nl] = -((tmax + p) // dens[nl]) - 1
        hi[nl] = (tmax - p) // dens[nl]
        level = nl
    return kept, seen
