"""Pure Python fallbacks for the compiled accumulation kernels.

Same contracts as ``convclose._kernels``: dense 1-D convolution and the
reduction sums all use compensated (Kahan/Neumaier) accumulation so that
results do not drift when ~1e7 additions feed a 6-digit target.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def line_conv(a, b):
    """Dense convolution of two coefficient vectors.

    out[i+j] += a[i]*b[j], with per-bucket Neumaier compensation (the
    compensation is folded back in at the end, so a large late term
    cannot wipe an earlier small one).  Returns a float64 array of
    length len(a)+len(b)-1.  Iteration order matches the compiled
    kernel bit for bit.
    """
    la = list(map(float, a))
    lb = list(map(float, b))
    nout = len(la) + len(lb) - 1
    acc = [0.0] * nout
    comp = [0.0] * nout
    for j, y in enumerate(lb):
        if y == 0.0:
            continue
        for i, x in enumerate(la):
            if x == 0.0:
                continue
            k = i + j
            v = x * y
            s = acc[k]
            t = s + v
            if abs(s) >= abs(v):
                comp[k] += (s - t) + v
            else:
                comp[k] += (v - t) + s
            acc[k] = t
    return np.asarray([s + c for s, c in zip(acc, comp)], dtype=np.float64)


def abs_sum(values):
    """Compensated sum of |v| over a float vector."""
    s = 0.0
    c = 0.0
    for x in values:
        x = abs(float(x))
        t = s + x
        if abs(s) >= x:
            c += (s - t) + x
        else:
            c += (x - t) + s
        s = t
    return s + c


def total(values):
    """Compensated sum of a float vector (signed)."""
    s = 0.0
    c = 0.0
    for x in values:
        x = float(x)
        t = s + x
        if abs(s) >= abs(x):
            c += (s - t) + x
        else:
            c += (x - t) + s
        s = t
    return s + c
