"""Brute-force evaluators for testing and acceptance runs.

These discretize the defining integrals directly on fixed grids in plain
double precision.  They are deliberately independent of the extended
precision chain machinery and are never used in the main computation path;
they validate the regimes (small order, small photon number) where
cancellation is mild and fixed grids are affordable.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import cumulative_simpson

from .pulses import PulseShape


def fp_bruteforce(
    p: int,
    t: float,
    pulse: PulseShape,
    gamma: float,
    grid_points: int = 4001,
) -> float:
    """Ordered-simplex Simpson evaluation of the odd chain coefficient.

    Discretizes the nested integral over t_1 < t_2 < ... < t_{2p+1} < t with
    the alternating emission/absorption weights by chaining cumulative
    Simpson rules, one per integration variable.

    Limited to p <= 2: the cost and conditioning of the direct product-grid
    sum grow too fast beyond that.
    """
    if p not in (0, 1, 2):
        raise ValueError(f"fp_bruteforce supports p in {{0, 1, 2}}, got p={p}")
    if t <= 0:
        raise ValueError("t must be positive")
    if grid_points < 5:
        raise ValueError("need at least 5 grid points")
    if not pulse.is_real():
        raise ValueError("fp_bruteforce requires a real-valued pulse")
    n = grid_points + (grid_points % 2 == 0)  # odd point count for Simpson
    s = np.linspace(0.0, t, n)
    xi = np.array([pulse.evaluate(v) for v in s], dtype=float)
    em = xi * np.exp(-0.5 * gamma * s)
    ab = xi * np.exp(+0.5 * gamma * s)

    acc = np.ones_like(s)
    for slot in range(1, 2 * p + 2):
        w = em if slot % 2 == 1 else ab
        acc = cumulative_simpson(w * acc, x=s, initial=0.0)
    return float(acc[-1])


def _simpson_weights(n: int, h: float) -> np.ndarray:
    w = np.ones(n)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * (h / 3.0)


def projection_bruteforce(
    tau_prime: float,
    gamma: float = 1.0,
    grid_points: int = 2001,
) -> float:
    """Fixed-grid 2-D Simpson evaluation of the two-photon mode overlap.

    Integrates psi_Fock*(s1,s2) [Psi(s1,s2) + Psi(s2,s1)] literally over
    [0, 60/gamma]^2 and squares the result.
    """
    if grid_points < 100:
        raise ValueError("projection_bruteforce needs at least 100 grid points")
    if tau_prime <= 0 or gamma <= 0:
        raise ValueError("tau_prime and gamma must be positive")
    from .scatter import QUAD_DOMAIN

    n = grid_points + (grid_points % 2 == 0)
    limit = QUAD_DOMAIN / gamma
    s = np.linspace(0.0, limit, n)
    h = s[1] - s[0]
    s1 = s[:, None]
    s2 = s[None, :]

    psi = np.exp(-(s1 + s2) / (2.0 * tau_prime)) / (tau_prime * math.sqrt(2.0))
    root3 = math.sqrt(3.0)
    lower = gamma * root3 * np.exp(-0.5 * gamma * (3.0 * s1 + s2))
    upper = gamma * root3 * np.exp(-0.5 * gamma * (3.0 * s2 + s1))
    kernel = np.where(s2 <= s1, lower, upper)
    kernel_swapped = np.where(s1 <= s2, upper, lower)

    w = _simpson_weights(n, h)
    overlap = float(w @ (psi * (kernel + kernel_swapped)) @ w)
    return overlap**2
