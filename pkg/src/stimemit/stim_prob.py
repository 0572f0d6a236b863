"""Stimulated-emission and no-stimulation probabilities from coefficient tables.

The photon-number expansion gives the amplitude onto |n+1 photons in the
drive mode, atom in g> as an alternating sum over exchange orders p:

    A_stim = sum_p (-1)^p sqrt(n+1) n!/(n-p)!  F_p  gamma^(p + 1/2),

and the amplitude back onto |n photons, atom still excited> as

    A_0 = exp(-gamma t / 2) sum_p (-1)^p n!/(n-p)!  G_p  gamma^p,

where the leading exponential is the free decay of the surviving excited
amplitude (it is exact; the short-pulse G_p forms simply neglect it inside
the pulse).  Terms can dwarf the sum by tens of binary orders of magnitude,
so the summation runs in extended precision with an escalation ladder.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Literal, NamedTuple, Sequence

from . import extended as xr
from .extended import DEFAULT_BITS, ExtendedReal, falling_product, magnitude_exponent
from .fock_series import (
    asymptotic_exponential_table,
    coefficient_tables,
    fp_time_resolved_short,
    gp_time_resolved_short,
)
from .pulses import ExponentialPulse, PulseShape

#: Photon-number guard; the series has n+1 terms and the falling products
#: grow like n^p, so far larger requests are almost certainly mistakes.
MAX_PHOTON_NUMBER = 10**4

#: Hard ceiling of the precision-escalation ladder.
MAX_SUM_BITS = 8192

#: gamma*tau beyond which the short-pulse closed forms are flagged.
SHORT_PULSE_VALIDITY = 0.05

TermSource = Callable[[int], Sequence[ExtendedReal]]


class PrecisionCeilingError(ArithmeticError):
    """The alternating sum cancelled beyond the maximum working precision."""


@dataclass(frozen=True)
class DriveSpec:
    """A Fock-state drive: n photons in ``pulse``, coupling rate ``gamma``."""

    n: int
    pulse: PulseShape
    gamma: float = 1.0

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 0:
            raise ValueError(f"photon number must be a non-negative integer, got {self.n}")
        if self.n > MAX_PHOTON_NUMBER:
            raise ValueError(f"photon number {self.n} exceeds guard {MAX_PHOTON_NUMBER}")
        if not (self.gamma > 0 and math.isfinite(self.gamma)):
            raise ValueError(f"gamma must be positive, got {self.gamma}")


@dataclass(frozen=True)
class StimResult:
    """Probabilities at one parameter point, with summation diagnostics.

    ``t`` is None for the asymptotic (post-pulse) limit; ``p0`` is only
    populated on time-resolved evaluations.
    """

    p_stim: float
    p0: float | None
    amplitude_sign_series: tuple[float, ...]
    max_term_magnitude: ExtendedReal
    precision_bits_used: int
    t: float | None
    warnings: tuple[str, ...] = field(default=())

    def __post_init__(self):
        eps = 1e-9
        if not (-eps <= self.p_stim <= 1.0 + eps):
            raise ValueError(f"p_stim out of [0, 1]: {self.p_stim!r}")
        if self.p0 is not None:
            if not (-eps <= self.p0 <= 1.0 + eps):
                raise ValueError(f"p0 out of [0, 1]: {self.p0!r}")
            if self.p_stim + self.p0 > 1.0 + 1e-6:
                raise ValueError(
                    f"p_stim + p0 = {self.p_stim + self.p0!r} exceeds 1"
                )


class SquareRabiPoint(NamedTuple):
    p_stim: float
    p0: float
    rabi_frequency: float


# ---------------------------------------------------------------------------
# series building blocks
# ---------------------------------------------------------------------------


def prefactor(
    n: int, p: int, kind: Literal["stim", "p0"], bits: int = DEFAULT_BITS
) -> ExtendedReal:
    """Combinatorial prefactor of order p: sqrt(n+1) n!/(n-p)! or n!/(n-p)!.

    Evaluated as an explicit falling product, never through full factorials.
    """
    if p > n:
        raise ValueError(f"term order exceeds photon number: p={p} > n={n}")
    if kind not in ("stim", "p0"):
        raise ValueError(f"kind must be 'stim' or 'p0', got {kind!r}")
    prod = falling_product(n, p, bits)
    if kind == "stim":
        return xr.sqrt(ExtendedReal(n + 1, bits)) * prod
    return prod


def sum_alternating(
    terms: Sequence[ExtendedReal] | TermSource,
    target_rel_tol: float = 1e-12,
    bits: int = DEFAULT_BITS,
) -> tuple[ExtendedReal, ExtendedReal, int]:
    """Cancellation-guarded compensated sum of signed extended terms.

    Parameters
    ----------
    terms
        Either the term list itself or a factory ``bits -> terms`` that
        recomputes the whole term pipeline at a given precision.  A plain
        list is re-rounded to the working width on each escalation pass.
    target_rel_tol
        Escalate until the summation noise floor (len * max_term * ulp) is
        below this fraction of the result.

    Returns
    -------
    (value, max_term_magnitude, precision_bits_used)

    Raises
    ------
    PrecisionCeilingError
        If the guard is still violated at ``MAX_SUM_BITS``: the result is
        smaller than ``max_term * 2**-(precision - 64)``, i.e. fewer than
        64 trustworthy bits survive the cancellation.
    """
    if bits > MAX_SUM_BITS:
        raise ValueError(f"starting precision {bits} exceeds ceiling {MAX_SUM_BITS}")
    factory: TermSource
    if callable(terms):
        factory = terms
    else:
        fixed = list(terms)
        factory = lambda b: [t.rounded_to(b) for t in fixed]

    work = bits
    while True:
        term_list = [t.rounded_to(work) for t in factory(work)]
        total = ExtendedReal(0, work)
        comp = ExtendedReal(0, work)
        max_term = ExtendedReal(0, work)
        for t in term_list:
            if abs(t) > max_term:
                max_term = abs(t)
            # Neumaier update
            s = total + t
            if abs(total) >= abs(t):
                comp = comp + ((total - s) + t)
            else:
                comp = comp + ((t - s) + total)
            total = s
        total = total + comp

        if max_term.is_zero:
            return total, max_term, work
        guard_ok = abs(total) >= max_term.scaled_by_pow2(-(work - 64))
        tol_ok = False
        if not total.is_zero:
            noise = max_term.scaled_by_pow2(-work) * (len(term_list) + 1)
            tol_ok = noise <= abs(total) * target_rel_tol
        if guard_ok and tol_ok:
            return total, max_term, work
        if work >= MAX_SUM_BITS:
            raise PrecisionCeilingError(
                "cancellation beyond precision ceiling: "
                f"|sum| = {float(total):.3e} vs max term {float(max_term):.3e} "
                f"at {work} bits"
            )
        work = min(2 * work, MAX_SUM_BITS)


def _to_float_saturating(x: ExtendedReal) -> float:
    try:
        return float(x)
    except OverflowError:
        return math.inf if x.sign >= 0 else -math.inf


def _sum_bounded_amplitude(
    factory: TermSource, bits: int, target_rel_tol: float
) -> tuple[ExtendedReal, ExtendedReal, int, tuple[float, ...]]:
    """Sum an amplitude series known to satisfy |sum| <= 1.

    Any term above unit magnitude therefore guarantees that many binary
    orders of cancellation, so the working precision is raised up front to
    keep the requested width's worth of accuracy; the sum_alternating guard
    still applies on top.
    """
    probe = factory(bits)
    excess = 0
    for t in probe:
        e = magnitude_exponent(t)
        if e is not None and e - 1 > excess:
            excess = e - 1  # floor(log2 |term|): guaranteed cancelled bits
    start = bits
    while start < bits + excess and start < MAX_SUM_BITS:
        start *= 2
    value, max_term, used = sum_alternating(factory, target_rel_tol, start)
    diag = tuple(_to_float_saturating(t) for t in probe)
    return value, max_term, used, diag


# ---------------------------------------------------------------------------
# exact probabilities
# ---------------------------------------------------------------------------


def _stim_terms(n: int, gamma: float, f_table) -> list[ExtendedReal]:
    bits = f_table[0].bits
    g = ExtendedReal(gamma, bits)
    root_g = xr.sqrt(g)
    terms = []
    gp = ExtendedReal(1, bits)
    for p in range(n + 1):
        t = prefactor(n, p, "stim", bits) * f_table[p] * gp * root_g
        terms.append(-t if p % 2 else t)
        gp = gp * g
    return terms


def _p0_terms(n: int, gamma: float, g_table) -> list[ExtendedReal]:
    bits = g_table[0].bits
    g = ExtendedReal(gamma, bits)
    terms = []
    gp = ExtendedReal(1, bits)
    for p in range(n + 1):
        t = prefactor(n, p, "p0", bits) * g_table[p] * gp
        terms.append(-t if p % 2 else t)
        gp = gp * g
    return terms


def pstim_exact(
    drive: DriveSpec,
    when: float | None = None,
    bits: int = DEFAULT_BITS,
    target_rel_tol: float = 1e-12,
    chain_rel_tol: float = 1e-10,
) -> StimResult:
    """Exact stimulated-emission probability for a Fock-state drive.

    Parameters
    ----------
    drive : DriveSpec
        Photon number, pulse shape and coupling rate.
    when : float or None
        None evaluates the asymptotic (post-pulse) probability; a time
        evaluates P_stim(t) and additionally P_0(t) from the even-parity
        chain of the same integration pass.
    bits : int
        Requested working precision; the pipeline escalates automatically
        when the series cancellation demands it.
    """
    n, pulse, gamma = drive.n, drive.pulse, drive.gamma

    if when is None:
        if isinstance(pulse, ExponentialPulse):
            def f_factory(b: int) -> Sequence[ExtendedReal]:
                table = asymptotic_exponential_table(n, pulse.tau, gamma, b)
                return _stim_terms(n, gamma, table.values)
        else:
            # The chain freezes once the pulse support ends, so evaluating
            # at the end of support is already the asymptotic value.
            t_eval = pulse.support_end()

            def f_factory(b: int) -> Sequence[ExtendedReal]:
                f_tab, _ = coefficient_tables(n, t_eval, pulse, gamma, b, chain_rel_tol)
                return _stim_terms(n, gamma, f_tab.values)

        amp, max_term, used, diag = _sum_bounded_amplitude(f_factory, bits, target_rel_tol)
        return StimResult(
            p_stim=float(amp * amp),
            p0=None,
            amplitude_sign_series=diag,
            max_term_magnitude=max_term,
            precision_bits_used=used,
            t=None,
        )

    t = float(when)
    if t < 0:
        raise ValueError("evaluation time must be >= 0")

    tables: dict[int, tuple] = {}

    def tables_at(b: int):
        if b not in tables:
            tables[b] = coefficient_tables(n, t, pulse, gamma, b, chain_rel_tol)
        return tables[b]

    amp_s, max_term, used_s, diag = _sum_bounded_amplitude(
        lambda b: _stim_terms(n, gamma, tables_at(b)[0].values), bits, target_rel_tol
    )
    amp_0, _, used_0, _ = _sum_bounded_amplitude(
        lambda b: _p0_terms(n, gamma, tables_at(b)[1].values), bits, target_rel_tol
    )
    decay = math.exp(-gamma * t)
    return StimResult(
        p_stim=float(amp_s * amp_s),
        p0=decay * float(amp_0 * amp_0),
        amplitude_sign_series=diag,
        max_term_magnitude=max_term,
        precision_bits_used=max(used_s, used_0),
        t=t,
    )


# ---------------------------------------------------------------------------
# closed-form limits
# ---------------------------------------------------------------------------


def pstim_sin2(n: int, tau: float, gamma: float = 1.0) -> float:
    """Large-n short-pulse limit sin^2(sqrt(4 gamma tau n))."""
    if n < 0:
        raise ValueError("photon number must be >= 0")
    return math.sin(math.sqrt(4.0 * gamma * tau * n)) ** 2


def p0_cos2(n: int, tau: float, gamma: float = 1.0) -> float:
    """Complement of :func:`pstim_sin2`: cos^2(sqrt(4 gamma tau n))."""
    if n < 0:
        raise ValueError("photon number must be >= 0")
    return math.cos(math.sqrt(4.0 * gamma * tau * n)) ** 2


def rabi_timeseries_short(
    n: int,
    tau: float,
    gamma: float,
    t_grid: Sequence[float],
    bits: int = DEFAULT_BITS,
    target_rel_tol: float = 1e-12,
) -> list[StimResult]:
    """Short-pulse Rabi oscillation between the Fock mode and the atom.

    Uses the finite-time exponential-mode closed forms for both families.
    ``p0`` carries the exact free-decay factor exp(-gamma t) of the
    surviving excited amplitude so that p_stim + p0 stays a physical
    decomposition; inside the validity regime the factor is near 1.
    """
    if n < 0 or n > MAX_PHOTON_NUMBER:
        raise ValueError(f"photon number out of range: {n}")
    warnings: tuple[str, ...] = ()
    if gamma * tau > SHORT_PULSE_VALIDITY:
        warnings = (
            f"gamma*tau = {gamma * tau:g} exceeds the short-pulse validity "
            f"threshold {SHORT_PULSE_VALIDITY}; treat results as qualitative",
        )

    out = []
    for t in t_grid:
        t = float(t)

        def stim_factory(b: int, _t=t) -> Sequence[ExtendedReal]:
            table = [fp_time_resolved_short(p, _t, tau, b) for p in range(n + 1)]
            return _stim_terms(n, gamma, table)

        def p0_factory(b: int, _t=t) -> Sequence[ExtendedReal]:
            table = [gp_time_resolved_short(p, _t, tau, b) for p in range(n + 1)]
            return _p0_terms(n, gamma, table)

        amp_s, max_term, used_s, diag = _sum_bounded_amplitude(
            stim_factory, bits, target_rel_tol
        )
        amp_0, _, used_0, _ = _sum_bounded_amplitude(p0_factory, bits, target_rel_tol)
        out.append(
            StimResult(
                p_stim=float(amp_s * amp_s),
                p0=math.exp(-gamma * t) * float(amp_0 * amp_0),
                amplitude_sign_series=diag,
                max_term_magnitude=max_term,
                precision_bits_used=max(used_s, used_0),
                t=t,
                warnings=warnings,
            )
        )
    return out


def square_rabi(n: int, width: float, gamma: float, t: float) -> SquareRabiPoint:
    """Jaynes-Cummings-like Rabi flopping against a square mode of width T.

    During the pulse the oscillation runs at the effective Rabi frequency
    sqrt(gamma n / T); after the pulse the probabilities freeze at their
    t = T values.
    """
    if t < 0:
        raise ValueError("time must be >= 0")
    if width <= 0:
        raise ValueError("pulse width must be positive")
    if n < 0:
        raise ValueError("photon number must be >= 0")
    omega_r = math.sqrt(gamma / width) * math.sqrt(n)
    phase = omega_r * min(t, width)
    return SquareRabiPoint(
        p_stim=math.sin(phase) ** 2,
        p0=math.cos(phase) ** 2,
        rabi_frequency=omega_r,
    )
