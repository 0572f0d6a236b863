"""Two-level amplitudes under coherent drive, projected on a reference state.

Projecting the evolution onto a coherent state reduces the dynamics to a
linear two-component system for the atomic amplitudes,

    d c_g / dt =  sqrt(gamma) beta*(t) c_e,
    d c_e / dt = -sqrt(gamma) alpha(t) c_g - (gamma / 2) c_e,

starting from (c_e, c_g) = (1, 0), times an overall coherent-state overlap
<beta|alpha> that never mixes with the atom part.  alpha(t) is an amplitude
density (|alpha(t)|^2 is the photon flux); with a constant amplitude a over
a short square window this reproduces plain Rabi oscillations
|c_e(t)|^2 = cos^2(sqrt(gamma) a t).

The overlap is kept in log form, log<beta|alpha> = int beta* alpha
- (int |alpha|^2 + int |beta|^2) / 2, to survive large mean photon numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

_RTOL = 1e-10
_ATOL = 1e-12


@dataclass(frozen=True)
class CoherentDrive:
    """Drive waveform alpha and reference waveform beta on a shared grid.

    Both waveforms are amplitude densities (units sqrt(rate)) and are
    treated as zero outside the grid.
    """

    t_grid: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    gamma: float = 1.0

    def __post_init__(self):
        t = np.asarray(self.t_grid, dtype=float)
        a = np.asarray(self.alpha, dtype=complex)
        b = np.asarray(self.beta, dtype=complex)
        if t.ndim != 1 or t.size < 2:
            raise ValueError("time grid needs at least two points")
        if np.any(np.diff(t) <= 0):
            raise ValueError("time grid must be strictly increasing")
        if a.shape != t.shape or b.shape != t.shape:
            raise ValueError("alpha and beta must be aligned with the time grid")
        if not (self.gamma > 0 and math.isfinite(self.gamma)):
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        object.__setattr__(self, "t_grid", t)
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)

    @classmethod
    def square(
        cls,
        amplitude: complex,
        duration: float,
        gamma: float = 1.0,
        beta_amplitude: complex | None = None,
        points: int = 501,
    ) -> "CoherentDrive":
        """Constant-amplitude drive on [0, duration]."""
        if duration <= 0:
            raise ValueError("duration must be positive")
        t = np.linspace(0.0, duration, points)
        a = np.full(points, complex(amplitude))
        b = a.copy() if beta_amplitude is None else np.full(points, complex(beta_amplitude))
        return cls(t_grid=t, alpha=a, beta=b, gamma=gamma)


@dataclass(frozen=True)
class AmplitudePair:
    """Atomic amplitudes at one time, with the field overlap attached."""

    t: float
    c_e: complex
    c_g: complex
    overlap_log: complex

    def p_e(self) -> float:
        """|<beta, e | psi(t)>|^2 including the coherent overlap."""
        return abs(self.c_e) ** 2 * math.exp(2.0 * self.overlap_log.real)

    def p_g(self) -> float:
        return abs(self.c_g) ** 2 * math.exp(2.0 * self.overlap_log.real)


def coherent_overlap_log(t_grid, alpha, beta) -> complex:
    """log <beta|alpha> by the trapezoid rule on the shared grid.

    The real part is always <= 0 (Cauchy-Schwarz).
    """
    t = np.asarray(t_grid, dtype=float)
    a = np.asarray(alpha, dtype=complex)
    b = np.asarray(beta, dtype=complex)
    if a.shape != t.shape or b.shape != t.shape:
        raise ValueError("waveforms must be aligned with the time grid")
    cross = np.trapezoid(np.conj(b) * a, t)
    na = np.trapezoid(np.abs(a) ** 2, t).real
    nb = np.trapezoid(np.abs(b) ** 2, t).real
    return cross - 0.5 * (na + nb)


def evolve_two_level(drive: CoherentDrive, t_eval=None) -> list[AmplitudePair]:
    """Integrate the projected amplitudes over the drive window.

    Parameters
    ----------
    drive : CoherentDrive
    t_eval : array_like or None
        Output times (defaults to the drive grid).  Times beyond the grid
        are allowed; the waveforms are zero there and only free decay acts.

    Returns
    -------
    list of AmplitudePair
        (c_e, c_g) at each output time, all carrying the constant
        waveform overlap log<beta|alpha>.
    """
    t_eval = drive.t_grid if t_eval is None else np.asarray(t_eval, dtype=float)
    if np.any(np.diff(t_eval) < 0):
        raise ValueError("output times must be ascending")
    t0, t1 = float(drive.t_grid[0]), float(drive.t_grid[-1])
    gamma = drive.gamma
    root_g = math.sqrt(gamma)
    tg = drive.t_grid

    def interp(waveform, t):
        if t < t0 or t > t1:
            return 0.0j
        re = np.interp(t, tg, waveform.real)
        im = np.interp(t, tg, waveform.imag)
        return re + 1j * im

    def rhs(t, y):
        c_e, c_g = y
        a = interp(drive.alpha, t)
        b = interp(drive.beta, t)
        d_e = -root_g * a * c_g - 0.5 * gamma * c_e
        d_g = root_g * np.conj(b) * c_e
        return [d_e, d_g]

    overlap = coherent_overlap_log(drive.t_grid, drive.alpha, drive.beta)

    out: list[AmplitudePair] = []
    y = np.array([1.0 + 0.0j, 0.0j])
    t_from = min(0.0, float(t_eval[0]) if len(t_eval) else 0.0)
    # split the integration at the waveform window edges so the solver
    # never steps across a discontinuity
    cuts = sorted({t0, t1} | {float(t) for t in t_eval})
    cuts = [c for c in cuts if c >= t_from]
    wanted = {float(t) for t in t_eval}
    current = t_from
    if current in wanted:
        out.append(AmplitudePair(current, complex(y[0]), complex(y[1]), overlap))
        wanted.discard(current)
    for c in cuts:
        if c <= current:
            continue
        sol = solve_ivp(
            rhs,
            (current, c),
            y,
            method="RK45",
            rtol=_RTOL,
            atol=_ATOL,
            dense_output=False,
        )
        if not sol.success:
            raise ArithmeticError(
                f"two-level integration failed near t = {sol.t[-1]:g}: {sol.message}"
            )
        y = sol.y[:, -1]
        current = c
        if c in wanted:
            out.append(AmplitudePair(c, complex(y[0]), complex(y[1]), overlap))
            wanted.discard(c)
    return out
