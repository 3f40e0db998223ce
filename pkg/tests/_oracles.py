"""Independent numerical oracles used by the tests.

Everything here is implemented from the model equations directly, without
touching the package's quadrature or solver code paths, so agreement is a
genuine cross-check.
"""

from __future__ import annotations

import math

import numpy as np

SATURATION = 45.0


def logistic_benefit(k: float, m: float, s: float):
    def beta(l: float) -> float:
        if l == math.inf:
            return m + s
        if l == -math.inf:
            return m
        x = l - k
        if x >= 0:
            return m + s / (1.0 + math.exp(-x))
        z = math.exp(x)
        return m + s * z / (1.0 + z)

    return beta


def rk4_scrutiny_values(l1, l_over, lam, r, d_good, d_bad, c_good_full, k, m, s,
                        type_tag, n_steps=200_000):
    """Classic RK4 integration of the watch-region value ODE.

    The ODE is  flow * V'(z) = kappa * V(z) - a(z)  integrated downward
    from the top boundary (value matching beta(l_over)/r, or the
    stationary limit when the region is unbounded).  Returns (zs, Vs)
    on the integration grid, ascending.
    """
    beta = logistic_benefit(k, m, s)
    flow = lam - d_good + d_bad
    if type_tag == "G":
        kappa = r + d_good
    else:
        kappa = r + lam + d_bad
    shift = -math.inf if d_good == 0.0 else math.log(d_good / (lam + d_bad))

    def a(z: float) -> float:
        bj = m if shift == -math.inf else beta(z + shift)
        if type_tag == "G":
            return beta(z) - c_good_full + d_good * bj / r
        return beta(z) + (lam + d_bad) * bj / r

    if math.isfinite(l_over):
        hi = l_over
        v_hi = beta(l_over) / r
    else:
        hi = max(l1, k + SATURATION)
        if shift != -math.inf:
            hi = max(hi, k - shift + SATURATION)
        hi = max(hi, l1 + 30.0)
        beta_inf_jump = m if shift == -math.inf else m + s
        if type_tag == "G":
            v_hi = (m + s - c_good_full + d_good * beta_inf_jump / r) / kappa
        else:
            v_hi = (m + s + (lam + d_bad) * beta_inf_jump / r) / kappa

    n = n_steps
    zs = np.linspace(l1, hi, n + 1)
    h = (hi - l1) / n
    # g arrays at nodes and half nodes, for the linear ODE V' = c V + g
    c = kappa / flow
    halves = np.linspace(l1, hi, 2 * n + 1)
    g = np.array([-a(float(z)) / flow for z in halves])
    vs = np.empty(n + 1)
    vs[n] = v_hi
    v = v_hi
    delta = -h
    g_list = g.tolist()
    for i in range(n, 0, -1):
        g_hi = g_list[2 * i]
        g_mid = g_list[2 * i - 1]
        g_lo = g_list[2 * i - 2]
        k1 = c * v + g_hi
        k2 = c * (v + 0.5 * delta * k1) + g_mid
        k3 = c * (v + 0.5 * delta * k2) + g_mid
        k4 = c * (v + delta * k3) + g_lo
        v = v + (delta / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        vs[i - 1] = v
    return zs, vs
