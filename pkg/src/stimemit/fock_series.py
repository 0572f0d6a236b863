"""Time-ordered coefficient families for the stimulated-emission series.

Two families appear in the photon-number expansion of the scattering
amplitudes: an odd one (2p+1 alternating emission/absorption events ending
on an emission, projecting the atom onto its ground state) and an even one
(2p events, atom returning excited).  Counting from the earliest event,
odd-numbered slots carry the emission weight ``xi(s) exp(-gamma s / 2)``
and even-numbered slots the absorption weight ``xi(s) exp(+gamma s / 2)``.

For the exponential mode the asymptotic odd coefficients have a closed
form; short-pulse limits exist for both families.  Everything else goes
through :func:`fp_general`, which reduces the (2p+1)-dimensional ordered
integral to a triangular chain of cumulative 1-D integrals

    u_0 = 1,   u_j(t) = integral_0^t w_j(s) u_{j-1}(s) ds,

evaluated once forward for all orders simultaneously.  The chain is
integrated panel-by-panel with Chebyshev (Clenshaw-Curtis) cumulative
quadrature in extended precision: on each panel the integrand is sampled
at Chebyshev-Lobatto nodes, interpolated, and its antiderivative evaluated
in closed form.  Panel widths are tied to the fastest local decay/growth
rate, which keeps the interpolation spectrally convergent for every chain
component at once; a nested half-resolution pass supplies the error
estimate.  (A classic adaptive Runge-Kutta stepper was tried first and
rejected: with fixed order it cannot control the relative error of the
high-order components near t = 0, where u_j ~ t^j.)
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence

from mpmath.libmp import (
    from_float,
    from_int,
    fzero,
    fone,
    mpf_abs,
    mpf_add,
    mpf_cmp,
    mpf_cos,
    mpf_div,
    mpf_exp,
    mpf_mul,
    mpf_neg,
    mpf_pi,
    mpf_pos,
    mpf_sqrt,
    mpf_sub,
    round_nearest,
    to_float,
)

from .extended import DEFAULT_BITS, ExtendedReal
from .pulses import ExponentialPulse, PulseShape, SampledPulse, SquarePulse

_RN = round_nearest

#: Maximum admissible chain order; beyond this the factorial-scale
#: prefactors stop being meaningful and the request is almost surely a bug.
MAX_ORDER = 10**6

#: Minimum Chebyshev-Lobatto panel order (kept a multiple of 4 so the
#: nested half grid is itself a Lobatto grid).
_MIN_PANEL_ORDER = 24

#: Panel width in units of 1/(local rate); 1.0 keeps even the nested
#: half-resolution interpolant comfortably below the refinement tolerance.
_PANEL_RATE_WIDTH = 1.0

_MAX_REFINE_DEPTH = 14


def _panel_order(n_slots: int) -> int:
    # Near t = 0 component j behaves like t^j, so the panel degree must
    # cover the whole chain: full-grid exactness needs m > n_slots, and the
    # nested half grid stays a clean error estimator down to end-value
    # noise ~1e-13 once m/2 >= 0.62 n_slots + 6 (measured).
    m = 2 * (math.ceil(0.62 * n_slots) + 6)
    m += (-m) % 4
    return max(_MIN_PANEL_ORDER, m)

Parity = Literal["odd", "even"]


class SeriesOrderError(ValueError):
    """Requested coefficient order is out of the supported range."""


class QuadratureError(ArithmeticError):
    """Adaptive refinement could not reach the requested tolerance."""

    def __init__(self, message: str, achieved: float):
        super().__init__(message)
        self.achieved = achieved


def _check_order(p: int) -> None:
    if p < 0:
        raise SeriesOrderError(f"coefficient order must be >= 0, got p={p}")
    if p > MAX_ORDER:
        raise SeriesOrderError(f"series order out of range: p={p} > {MAX_ORDER}")


@dataclass(frozen=True)
class CoefficientTable:
    """Coefficients F_p or G_p for p = 0..p_max at one evaluation time.

    ``t`` is the evaluation time, or None for the asymptotic (post-pulse)
    limit.  Values are extended-precision reals in index order.
    """

    p_max: int
    values: tuple[ExtendedReal, ...]
    kind: Literal["F", "G"]
    t: float | None
    pulse: str
    gamma: float

    def __post_init__(self):
        if len(self.values) != self.p_max + 1:
            raise ValueError("coefficient table length must be p_max + 1")
        if not all(v.is_finite() for v in self.values):
            raise ValueError("coefficient table contains non-finite entries")

    def __getitem__(self, p: int) -> ExtendedReal:
        return self.values[p]


# ---------------------------------------------------------------------------
# closed forms (exponential mode)
# ---------------------------------------------------------------------------


def fp_exponential_limit(
    p: int, tau: float, gamma: float = 1.0, bits: int = DEFAULT_BITS
) -> ExtendedReal:
    """Asymptotic odd coefficient for the exponential mode.

    F_p(infinity) = 2^(p+1)/p! * tau^(p+1/2) / prod_{k=0..p} (2k+1+gamma*tau).
    """
    _check_order(p)
    if tau <= 0 or gamma <= 0:
        raise ValueError("tau and gamma must be positive")
    from . import extended as xr

    t = ExtendedReal(tau, bits)
    g = ExtendedReal(gamma, bits)
    num = ExtendedReal(1, bits).scaled_by_pow2(p + 1) * t**p * xr.sqrt(t)
    den = xr.factorial(p, bits)
    for k in range(p + 1):
        den = den * (g * t + (2 * k + 1))
    return num / den


def fp_short_pulse_limit(p: int, tau: float, bits: int = DEFAULT_BITS) -> ExtendedReal:
    """Short-pulse asymptotic odd coefficient: (sqrt(4 tau))^(2p+1) / (2p+1)!."""
    _check_order(p)
    if tau <= 0:
        raise ValueError("tau must be positive")
    from . import extended as xr

    m = 2 * p + 1
    root = xr.sqrt(ExtendedReal(4.0 * tau, bits))
    return root**m / xr.factorial(m, bits)


def _short_pulse_time_resolved(m: int, t: float, tau: float, bits: int) -> ExtendedReal:
    # (sqrt(4 tau))^m * (1 - exp(-t/2tau))^m / m!, the overflow-safe
    # rearrangement of exp(-m t/2tau) (exp(t/2tau) - 1)^m.
    from . import extended as xr

    if t < 0:
        raise ValueError("time must be >= 0")
    root = xr.sqrt(ExtendedReal(4.0 * tau, bits))
    x = ExtendedReal(1, bits) - xr.exp(ExtendedReal(-t / (2.0 * tau), bits))
    return root**m * x**m / xr.factorial(m, bits)


def fp_time_resolved_short(
    p: int, t: float, tau: float, bits: int = DEFAULT_BITS
) -> ExtendedReal:
    """Short-pulse odd coefficient at finite time (exponential mode)."""
    _check_order(p)
    return _short_pulse_time_resolved(2 * p + 1, t, tau, bits)


def gp_time_resolved_short(
    p: int, t: float, tau: float, bits: int = DEFAULT_BITS
) -> ExtendedReal:
    """Short-pulse even coefficient at finite time; G_0 is identically 1."""
    _check_order(p)
    return _short_pulse_time_resolved(2 * p, t, tau, bits)


# ---------------------------------------------------------------------------
# Chebyshev cumulative-quadrature machinery (extended precision, raw mpf)
# ---------------------------------------------------------------------------

_matrix_cache: dict[tuple[int, int], tuple] = {}


def _cheb_setup(m: int, prec: int):
    """Nodes and cumulative-integration matrix for an m+1 point Lobatto grid.

    Returns (nodes, Q) where nodes are ascending on [-1, 1] and Q maps
    integrand values at the nodes to values of the running integral
    from -1 at the same nodes (exact for the degree-m interpolant).
    """
    key = (m, prec)
    cached = _matrix_cache.get(key)
    if cached is not None:
        return cached
    wp = prec + 30
    pi = mpf_pi(wp, _RN)
    mr = from_int(m)

    def cosf(num: int) -> tuple:
        # cos(num * pi / m)
        return mpf_cos(mpf_div(mpf_mul(pi, from_int(num), wp, _RN), mr, wp, _RN), wp, _RN)

    # ascending nodes x_i = -cos(i pi / m)
    nodes = [mpf_neg(cosf(i)) for i in range(m + 1)]

    # D: Chebyshev coefficients c_j (j = 0..m) from ascending node values u_i.
    # Standard Clenshaw-Curtis DCT with endpoint halving, reindexed so that
    # the standard-order value v_k equals u_{m-k}.
    two_over_m = mpf_div(from_int(2), mr, wp, _RN)
    half = from_float(0.5)
    D = [[fzero] * (m + 1) for _ in range(m + 1)]
    for j in range(m + 1):
        row_scale = mpf_mul(two_over_m, half, wp, _RN) if j in (0, m) else two_over_m
        for k in range(m + 1):
            w = cosf(j * k)
            if k in (0, m):
                w = mpf_mul(w, half, wp, _RN)
            D[j][m - k] = mpf_mul(w, row_scale, wp, _RN)

    # A: antiderivative coefficients b_k (k = 0..m+1) from c_j, with the
    # constant chosen so the antiderivative vanishes at x = -1.
    A = [[fzero] * (m + 1) for _ in range(m + 2)]
    A[1][0] = fone
    if m >= 2:
        A[1][2] = from_float(-0.5)
    for k in range(2, m + 2):
        inv2k = mpf_div(fone, from_int(2 * k), wp, _RN)
        A[k][k - 1] = inv2k
        if k + 1 <= m:
            A[k][k + 1] = mpf_neg(inv2k)
    for col in range(m + 1):
        s = fzero
        for k in range(1, m + 2):
            if A[k][col] != fzero:
                term = A[k][col] if k % 2 == 0 else mpf_neg(A[k][col])
                s = mpf_add(s, term, wp, _RN)
        A[0][col] = mpf_neg(s)

    # E: evaluation of sum b_j T_j at the ascending nodes;
    # T_j(-cos(i pi/m)) = (-1)^j cos(i j pi / m).
    E = [[fzero] * (m + 2) for _ in range(m + 1)]
    for i in range(m + 1):
        for j in range(m + 2):
            w = cosf(i * j)
            E[i][j] = mpf_neg(w) if j % 2 else w

    def matmul(X, Y):
        rows, inner, cols = len(X), len(Y), len(Y[0])
        out = [[fzero] * cols for _ in range(rows)]
        for r in range(rows):
            Xr = X[r]
            for c in range(cols):
                s = fzero
                for t in range(inner):
                    x = Xr[t]
                    if x != fzero:
                        s = mpf_add(s, mpf_mul(x, Y[t][c], wp, _RN), wp, _RN)
                out[r][c] = s
        return out

    Q = matmul(E, matmul(A, D))
    Q = [[mpf_pos(v, prec, _RN) for v in row] for row in Q]
    nodes = [mpf_pos(v, prec, _RN) for v in nodes]
    result = (nodes, Q)
    _matrix_cache[key] = result
    return result


def _raw_amplitudes(pulse: PulseShape, times: list, prec: int) -> list:
    """Pulse amplitude at raw mpf times, evaluated inside one smooth panel."""
    if isinstance(pulse, ExponentialPulse):
        inv2tau = mpf_div(fone, from_float(2.0 * pulse.tau), prec, _RN)
        root = mpf_sqrt(from_float(pulse.tau), prec, _RN)
        out = []
        for s in times:
            e = mpf_exp(mpf_neg(mpf_mul(s, inv2tau, prec, _RN)), prec, _RN)
            out.append(mpf_div(e, root, prec, _RN))
        return out
    if isinstance(pulse, SquarePulse):
        amp = mpf_div(fone, mpf_sqrt(from_float(pulse.width), prec, _RN), prec, _RN)
        return [amp] * len(times)
    if isinstance(pulse, SampledPulse):
        if not pulse.is_real():
            raise ValueError("coefficient chains require a real-valued pulse")
        out = []
        for s in times:
            out.append(from_float(pulse.evaluate(to_float(s))))
        return out
    raise TypeError(f"unsupported pulse type {type(pulse).__name__}")


def _pulse_rate(pulse: PulseShape, gamma: float) -> float:
    # fastest exponential rate in the panel integrands
    if isinstance(pulse, ExponentialPulse):
        return 0.5 * gamma + 0.5 / pulse.tau
    return 0.5 * gamma if gamma > 0 else 1.0


def _panel_edges(pulse: PulseShape, gamma: float, t_grid: Sequence[float]) -> list[float]:
    t_end = min(max(t_grid), pulse.support_end())
    cuts = {0.0, t_end}
    for b in pulse.breakpoints():
        if 0.0 < b < t_end:
            cuts.add(float(b))
    for t in t_grid:
        if 0.0 < t < t_end:
            cuts.add(float(t))
    cuts = sorted(cuts)
    width = _PANEL_RATE_WIDTH / _pulse_rate(pulse, gamma)
    edges = [cuts[0]]
    for a, b in zip(cuts[:-1], cuts[1:]):
        n = max(1, math.ceil((b - a) / width))
        for k in range(1, n + 1):
            edges.append(a + (b - a) * k / n)
    return edges


def _chain_on_grid(
    n_slots: int,
    t_grid: Sequence[float],
    pulse: PulseShape,
    gamma: float,
    bits: int,
    rel_tol: float,
) -> list[list[ExtendedReal]]:
    """Integrate the alternating-weight chain; returns u_j at each grid time.

    Result[g][j] is u_j(t_grid[g]) for j = 0..n_slots.  Odd slots carry the
    emission weight, even slots the absorption weight, so u_{2p+1} = F_p and
    u_{2p} = G_p come out of the same pass.
    """
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    if any(t < 0 for t in t_grid):
        raise ValueError("grid times must be >= 0")
    if list(t_grid) != sorted(t_grid):
        raise ValueError("grid times must be ascending")
    if not pulse.is_real():
        raise ValueError("coefficient chains require a real-valued pulse")

    prec = bits + 20
    m = _panel_order(n_slots)
    nodes, Q = _cheb_setup(m, prec)
    nodes_h, Q_h = _cheb_setup(m // 2, prec)
    q_end = Q[m]
    qh_end = Q_h[m // 2]

    half_gamma = from_float(0.5 * gamma)
    rtol = from_float(rel_tol)

    u_end = [fone] + [fzero] * n_slots
    runmax = [fzero] * (n_slots + 1)
    results: dict[float, list] = {}
    if t_grid and t_grid[0] == 0.0:
        results[0.0] = list(u_end)

    support = pulse.support_end()
    edges = _panel_edges(pulse, gamma, t_grid)
    grid_remaining = [t for t in t_grid if t > 0.0]

    # panels as a stack of (a, b, depth); refined panels push halves back
    stack = [(edges[i], edges[i + 1], 0) for i in range(len(edges) - 1)]
    stack.reverse()
    while stack:
        a, b, depth = stack.pop()
        if b <= a:
            pass
        elif a >= support:
            pass  # weights vanish beyond the support; u is frozen
        else:
            mid = from_float(0.5 * (a + b))
            hw = from_float(0.5 * (b - a))
            width = from_float(b - a)
            times = [mpf_add(mid, mpf_mul(hw, x, prec, _RN), prec, _RN) for x in nodes]
            xi = _raw_amplitudes(pulse, times, prec)
            w_em, w_ab = [], []
            for s, amp in zip(times, xi):
                gs = mpf_mul(half_gamma, s, prec, _RN)
                w_em.append(mpf_mul(amp, mpf_exp(mpf_neg(gs), prec, _RN), prec, _RN))
                w_ab.append(mpf_mul(amp, mpf_exp(gs, prec, _RN), prec, _RN))
            w_max = (fzero, fzero)  # (odd/emission, even/absorption) magnitudes
            for w, idx in ((w_em, 0), (w_ab, 1)):
                mx = fzero
                for v in w:
                    av = mpf_abs(v)
                    if mpf_cmp(av, mx) > 0:
                        mx = av
                w_max = (mx, w_max[1]) if idx == 0 else (w_max[0], mx)

            u_nodes_prev = [fone] * (m + 1)
            prev_scale = fone
            new_end = [fone]
            errs = []
            ok = True
            for j in range(1, n_slots + 1):
                w = w_em if j % 2 == 1 else w_ab
                g = [mpf_mul(w[i], u_nodes_prev[i], prec, _RN) for i in range(m + 1)]
                u0 = u_end[j]
                u_nodes = []
                for i in range(m + 1):
                    s = fzero
                    Qi = Q[i]
                    for k in range(m + 1):
                        s = mpf_add(s, mpf_mul(Qi[k], g[k], prec, _RN), prec, _RN)
                    u_nodes.append(mpf_add(u0, mpf_mul(s, hw, prec, _RN), prec, _RN))
                # nested half-grid estimate of the same end increment
                sh = fzero
                for k in range(m // 2 + 1):
                    sh = mpf_add(sh, mpf_mul(qh_end[k], g[2 * k], prec, _RN), prec, _RN)
                end_h = mpf_add(u0, mpf_mul(sh, hw, prec, _RN), prec, _RN)
                err = mpf_abs(mpf_sub(u_nodes[m], end_h, prec, _RN))
                # Error yardstick: the component's own scale, but never below
                # the single-slot inflow w_max * width * |u_{j-1}| — for chain
                # orders above the panel degree the nested estimate measures
                # the irreducible polynomial-representation gap, which is
                # bounded by that inflow and cannot (and need not) be refined
                # away.
                scale = runmax[j]
                if mpf_cmp(mpf_abs(u_nodes[m]), scale) > 0:
                    scale = mpf_abs(u_nodes[m])
                inflow = mpf_mul(
                    w_max[0] if j % 2 == 1 else w_max[1],
                    mpf_mul(width, prev_scale, prec, _RN),
                    prec,
                    _RN,
                )
                if mpf_cmp(inflow, scale) > 0:
                    scale = inflow
                if scale != fzero and mpf_cmp(err, mpf_mul(rtol, scale, prec, _RN)) > 0:
                    errs.append(to_float(mpf_div(err, scale, 53, _RN)))
                    ok = False
                    break
                new_end.append(u_nodes[m])
                prev_scale = runmax[j]
                if mpf_cmp(mpf_abs(u_nodes[m]), prev_scale) > 0:
                    prev_scale = mpf_abs(u_nodes[m])
                u_nodes_prev = u_nodes
            if not ok:
                if depth >= _MAX_REFINE_DEPTH:
                    raise QuadratureError(
                        f"quadrature tolerance {rel_tol:g} not reached on panel "
                        f"[{a:g}, {b:g}] after {depth} refinements "
                        f"(achieved relative error estimate {max(errs):.3e})",
                        achieved=max(errs),
                    )
                c = 0.5 * (a + b)
                stack.append((c, b, depth + 1))
                stack.append((a, c, depth + 1))
                continue
            u_end = new_end
            for j in range(1, n_slots + 1):
                absu = mpf_abs(u_end[j])
                if mpf_cmp(absu, runmax[j]) > 0:
                    runmax[j] = absu
        while grid_remaining and grid_remaining[0] <= b * (1 + 1e-15):
            results[grid_remaining.pop(0)] = list(u_end)

    # grid times beyond the last panel (frozen chain)
    for t in grid_remaining:
        results[t] = list(u_end)

    out = []
    for t in t_grid:
        out.append(
            [ExtendedReal._wrap(mpf_pos(v, bits, _RN), bits) for v in results[float(t)]]
        )
    return out


# ---------------------------------------------------------------------------
# public chain API
# ---------------------------------------------------------------------------


def fp_general(
    p: int,
    t_grid: Sequence[float],
    pulse: PulseShape,
    gamma: float,
    event_parity: Parity = "odd",
    bits: int = DEFAULT_BITS,
    rel_tol: float = 1e-10,
) -> list[ExtendedReal]:
    """Ordered-integral coefficient on a time grid for an arbitrary pulse.

    Parameters
    ----------
    p : int
        Number of absorption/emission exchange pairs.
    t_grid : sequence of float
        Ascending evaluation times covering [0, t_max].
    event_parity : {'odd', 'even'}
        'odd' evaluates the 2p+1 slot chain (F_p, final emission); 'even'
        the 2p slot chain (G_p).

    Returns
    -------
    list of ExtendedReal
        Coefficient value at each grid time.
    """
    _check_order(p)
    if event_parity not in ("odd", "even"):
        raise ValueError(f"event_parity must be 'odd' or 'even', got {event_parity!r}")
    n_slots = 2 * p + 1 if event_parity == "odd" else 2 * p
    rows = _chain_on_grid(n_slots, t_grid, pulse, gamma, bits, rel_tol)
    return [row[n_slots] for row in rows]


def coefficient_tables(
    p_max: int,
    t: float,
    pulse: PulseShape,
    gamma: float,
    bits: int = DEFAULT_BITS,
    rel_tol: float = 1e-10,
) -> tuple[CoefficientTable, CoefficientTable]:
    """F and G tables for p = 0..p_max at time t, from a single chain pass."""
    _check_order(p_max)
    rows = _chain_on_grid(2 * p_max + 1, [float(t)], pulse, gamma, bits, rel_tol)
    u = rows[0]
    f_vals = tuple(u[2 * p + 1] for p in range(p_max + 1))
    g_vals = tuple(u[2 * p] for p in range(p_max + 1))
    desc = pulse.describe()
    return (
        CoefficientTable(p_max, f_vals, "F", float(t), desc, gamma),
        CoefficientTable(p_max, g_vals, "G", float(t), desc, gamma),
    )


def asymptotic_exponential_table(
    p_max: int, tau: float, gamma: float, bits: int = DEFAULT_BITS
) -> CoefficientTable:
    """Closed-form asymptotic F table for the exponential mode.

    The entries are built iteratively through the term ratio
    F_{p+1}/F_p = 2 tau / ((p+1)(2p+3+gamma tau)), which is algebraically
    identical to :func:`fp_exponential_limit` but O(1) per order.
    """
    _check_order(p_max)
    from . import extended as xr

    t = ExtendedReal(tau, bits)
    g = ExtendedReal(gamma, bits)
    vals = [ExtendedReal(2, bits) * xr.sqrt(t) / (g * t + 1)]
    for p in range(p_max):
        ratio = (t + t) / ((g * t + (2 * p + 3)) * (p + 1))
        vals.append(vals[-1] * ratio)
    return CoefficientTable(
        p_max, tuple(vals), "F", None, f"exponential(tau={tau:g})", gamma
    )
