"""First-kind Bessel values J_k(x) for integer order, to ~1e-12 absolute.

Power series for small arguments, Miller's backward recurrence with the
even-order normalization elsewhere.  Orders are integers and arguments stay
at desk scale, which keeps both branches simple and accurate.
"""

from __future__ import annotations

import math

_SERIES_CUTOFF = 9.0  # cancellation degrades the series beyond this


def _jn_series(k: int, x: float) -> float:
    half = 0.5 * x
    term = half ** k / math.factorial(k)
    total = term
    m = 0
    while abs(term) > 1e-17 * max(1.0, abs(total)) and m < 200:
        m += 1
        term *= -(half * half) / (m * (k + m))
        total += term
    return total


def _jn_miller(k: int, x: float) -> float:
    # Backward recurrence from well above the turning point; normalize with
    # J_0 + 2*sum J_{2m} = 1.
    start = int(k + 2 * math.sqrt(max(k, 1)) + int(2 * x) + 40)
    if start % 2 == 1:
        start += 1
    jp, jc = 0.0, 1e-300
    total = 0.0
    target = 0.0
    for n in range(start, 0, -1):
        jm = (2.0 * n / x) * jc - jp
        jp, jc = jc, jm
        if n - 1 == k:
            target = jc
        if (n - 1) % 2 == 0 and n - 1 > 0:
            total += 2.0 * jc
        if abs(jc) > 1e250:  # rescale to dodge overflow
            jp, jc, total, target = (v * 1e-250 for v in (jp, jc, total, target))
    norm = jc + total
    if k == 0:
        target = jc
    return target / norm


def jn(k: int, x: float) -> float:
    """J_k(x) for integer k (any sign) and real x."""
    k = int(k)
    x = float(x)
    if x < 0:
        return jn(k, -x) * (-1.0 if k % 2 else 1.0)
    if k < 0:
        return jn(-k, x) * (-1.0 if (-k) % 2 else 1.0)
    if x == 0.0:
        return 1.0 if k == 0 else 0.0
    if x <= _SERIES_CUTOFF or k > x + 30:
        return _jn_series(k, x)
    return _jn_miller(k, x)
