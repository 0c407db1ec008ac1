"""Hot loops, in two flavours each: a numba @njit version and a numpy fallback.

The active flavour is chosen by backends.USE_NUMBA; both stay importable so the
benchmark can compare them head to head.  All kernels are exact integer code.
"""

import math

import numpy as np

from .backends import njit, USE_NUMBA


@njit(cache=True)
def _isqrt(n):
    # floor sqrt for non-negative int64; math.isqrt is not numba-supported
    if n <= 0:
        return 0
    r = int(math.sqrt(float(n)))
    while r * r > n:
        r -= 1
    while (r + 1) * (r + 1) <= n:
        r += 1
    return r


# ---------------------------------------------------------------------------
# sphere / ball enumeration
# ---------------------------------------------------------------------------

@njit(cache=True)
def _fill_sphere_loop(d, lam, out):
    """DFS over coordinates with remaining-budget pruning; emits rows of squared
    norm exactly lam into `out` in lexicographic order.  Returns the row count."""
    cnt = 0
    val = np.zeros(d, np.int64)
    rem = np.zeros(d + 1, np.int64)
    rem[0] = lam
    i = 0
    val[0] = -_isqrt(lam) - 1
    while i >= 0:
        val[i] += 1
        a = val[i]
        r = rem[i] - a * a
        if r < 0:
            i -= 1
            continue
        if i == d - 1:
            if r == 0:
                for j in range(d):
                    out[cnt, j] = val[j]
                cnt += 1
            continue
        rem[i + 1] = r
        i += 1
        val[i] = -_isqrt(r) - 1
    return cnt


@njit(cache=True)
def _fill_ball_loop(d, r2, out):
    """Same DFS but emits every row with squared norm <= r2."""
    cnt = 0
    val = np.zeros(d, np.int64)
    rem = np.zeros(d + 1, np.int64)
    rem[0] = r2
    i = 0
    val[0] = -_isqrt(r2) - 1
    while i >= 0:
        val[i] += 1
        a = val[i]
        r = rem[i] - a * a
        if r < 0:
            i -= 1
            continue
        if i == d - 1:
            for j in range(d):
                out[cnt, j] = val[j]
            cnt += 1
            continue
        rem[i + 1] = r
        i += 1
        val[i] = -_isqrt(r) - 1
    return cnt


def _expand_levels(d, budget, keep_exact):
    """Vectorized level-by-level expansion of the prefix tree; lexicographic by
    construction (prefix-major, coordinate values ascending)."""
    pref = np.zeros((1, 0), dtype=np.int64)
    rem = np.array([budget], dtype=np.int64)
    for i in range(d):
        lmax = math.isqrt(int(rem.max())) if rem.size else 0
        a = np.arange(-lmax, lmax + 1, dtype=np.int64)
        new_rem = rem[:, None] - a[None, :] ** 2
        keep = new_rem >= 0
        reps = keep.sum(axis=1)
        pref = np.repeat(pref, reps, axis=0)
        col = np.broadcast_to(a, keep.shape)[keep]
        pref = np.concatenate([pref, col[:, None]], axis=1)
        rem = new_rem[keep]
    if keep_exact:
        pref = pref[rem == 0]
    return pref


def _fill_sphere_numpy(d, lam, out):
    pts = _expand_levels(d, lam, keep_exact=True)
    out[: len(pts)] = pts
    return len(pts)


def _fill_ball_numpy(d, r2, out):
    pts = _expand_levels(d, r2, keep_exact=False)
    out[: len(pts)] = pts
    return len(pts)


# ---------------------------------------------------------------------------
# two-sided budget DP: for z in Z^d, count s with |s|^2 = lam and |z-s|^2 = lam.
# Only the coordinate magnitudes of z matter (sign flips map s -> mirrored s).
# ---------------------------------------------------------------------------

@njit(cache=True)
def _pair_dp_loop(zabs, lam):
    d = zabs.shape[0]
    dp = np.zeros((lam + 1, lam + 1), np.int64)
    dp[0, 0] = 1
    big = _isqrt(lam)
    for j in range(d):
        zj = zabs[j]
        ndp = np.zeros((lam + 1, lam + 1), np.int64)
        for a in range(-big, big + 1):
            a2 = a * a
            b = zj - a
            b2 = b * b
            if b2 > lam:
                continue
            for n1 in range(0, lam + 1 - a2):
                row = dp[n1]
                for n2 in range(0, lam + 1 - b2):
                    v = row[n2]
                    if v != 0:
                        ndp[n1 + a2, n2 + b2] += v
        dp = ndp
    return dp[lam, lam]


def _pair_dp_numpy(zabs, lam):
    d = zabs.shape[0]
    dp = np.zeros((lam + 1, lam + 1), np.int64)
    dp[0, 0] = 1
    big = math.isqrt(lam)
    for j in range(d):
        zj = int(zabs[j])
        ndp = np.zeros((lam + 1, lam + 1), np.int64)
        for a in range(-big, big + 1):
            a2 = a * a
            b2 = (zj - a) ** 2
            if b2 > lam:
                continue
            ndp[a2:, b2:] += dp[: lam + 1 - a2, : lam + 1 - b2]
        dp = ndp
    return int(dp[lam, lam])


# ---------------------------------------------------------------------------
# counting points under two shifted-norm constraints (triangle fast path):
# given rows x of X with n2[i] = |x|^2, count i with
#   n2[i] + 2 <x, u> <= cu  and  n2[i] + 2 <x, v> <= cv
# (vectorized BLAS version lives in forms.py; this is the loop twin)
# ---------------------------------------------------------------------------

@njit(cache=True)
def _two_constraint_count_loop(X, n2, u, cu, v, cv):
    n, d = X.shape
    cnt = 0
    for i in range(n):
        su = 0
        sv = 0
        for j in range(d):
            su += X[i, j] * u[j]
            sv += X[i, j] * v[j]
        if n2[i] + 2 * su <= cu and n2[i] + 2 * sv <= cv:
            cnt += 1
    return cnt


def _two_constraint_count_numpy(X, n2, u, cu, v, cv):
    du = n2 + 2 * (X @ u)
    dv = n2 + 2 * (X @ v)
    return int(np.count_nonzero((du <= cu) & (dv <= cv)))


# selected flavours ---------------------------------------------------------

if USE_NUMBA:
    fill_sphere = _fill_sphere_loop
    fill_ball = _fill_ball_loop
    pair_dp = _pair_dp_loop
    two_constraint_count = _two_constraint_count_loop
else:
    fill_sphere = _fill_sphere_numpy
    fill_ball = _fill_ball_numpy
    pair_dp = _pair_dp_numpy
    two_constraint_count = _two_constraint_count_numpy
