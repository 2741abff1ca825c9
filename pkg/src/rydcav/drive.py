"""Pulse envelopes, effective two-photon Rabi frequencies and the Rydberg-detuning chirp."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate


class SingularDenominatorError(ArithmeticError):
    """2 + Delta(t)/Delta_s vanished in the second-excitation Rabi frequency."""


@dataclass(frozen=True)
class SechPulse:
    amplitude: float  # rad/us
    t0: float  # us
    tau: float  # us

    def __post_init__(self):
        if self.tau <= 0:
            raise ValueError("pulse width tau must be positive")
        if self.amplitude < 0:
            raise ValueError("pulse amplitude must be non-negative")

    def __call__(self, t):
        return evaluate_pulse(self, t)

    @property
    def area(self) -> float:
        return self.amplitude * self.tau * math.pi

    def scaled(self, factor: float) -> "SechPulse":
        return SechPulse(self.amplitude * factor, self.t0, self.tau)


def evaluate_pulse(p: SechPulse, t):
    x = (np.asarray(t, dtype=float) - p.t0) / p.tau
    # 1/cosh overflows gracefully to 0 far from the centre
    with np.errstate(over="ignore"):
        out = p.amplitude / np.cosh(x)
    return out if np.ndim(out) else float(out)


def envelope(pulses, t):
    """Sum of sech pulses (0 for an empty sequence)."""
    t = np.asarray(t, dtype=float)
    total = np.zeros_like(t)
    for p in pulses:
        total = total + evaluate_pulse(p, t)
    return total if total.ndim else float(total)


def effective_rabi(p1, p2, delta_s, delta_t, n_atoms):
    """Two-photon Rabi frequencies (S, S1, S2) after eliminating the intermediate level.

    S = P1 P2 / Delta_s, S1 = sqrt(N) S / 2 and
    S2 = sqrt(N-1) S / (sqrt(2) (2 + Delta/Delta_s)).  Works elementwise on arrays.
    """
    if delta_s == 0:
        raise ValueError("Delta_s must be non-zero")
    if n_atoms < 1:
        raise ValueError("n_atoms must be >= 1")
    s = np.asarray(p1, dtype=float) * np.asarray(p2, dtype=float) / delta_s
    return _split_s(s, delta_s, delta_t, n_atoms)


def _split_s(s, delta_s, delta_t, n_atoms):
    s = np.asarray(s, dtype=float)
    s1 = math.sqrt(n_atoms) * s / 2.0
    if n_atoms == 1:
        s2 = np.zeros_like(s1)
    else:
        denom = 2.0 + np.asarray(delta_t, dtype=float) / delta_s
        if np.any(np.abs(denom) < 1e-12):
            raise SingularDenominatorError("2 + Delta(t)/Delta_s = 0: S2 is singular")
        s2 = math.sqrt(n_atoms - 1) * s / (math.sqrt(2.0) * denom)
    if s.ndim == 0:
        return float(s), float(s1), float(s2)
    return s, s1, s2


def collective_factor(stage: int, n_atoms: int, delta_ratio: float = -1.0) -> float:
    """Ratio S_stage / S for the first (G<->R) or second (R<->RR) excitation stage."""
    if stage == 1:
        return math.sqrt(n_atoms) / 2.0
    if stage == 2:
        if n_atoms < 2:
            return 0.0
        return math.sqrt(n_atoms - 1) / (math.sqrt(2.0) * (2.0 + delta_ratio))
    raise ValueError("stage must be 1 or 2")


def solve_pi_amplitude(tau, target_area, n_atoms, stage=1, delta_ratio=-1.0):
    """Peak amplitude of a sech S(t) envelope whose stage Rabi frequency has ``target_area``.

    ``delta_ratio`` is Delta/Delta_s held fixed over the pulse (only used for stage 2).
    For a chirped second stage use :func:`scale_to_area` instead.
    """
    if tau <= 0 or target_area <= 0:
        raise ValueError("tau and target_area must be positive")
    factor = collective_factor(stage, n_atoms, delta_ratio)
    if factor == 0:
        raise ValueError("stage has no coupling for this atom number")
    # integral of sech over the real line is pi
    return target_area / (factor * tau * math.pi)


def scale_to_area(rate, t_lo, t_hi, target_area, points=None):
    """Factor k such that the integral of k * rate(t) over [t_lo, t_hi] equals target_area."""
    area, _ = integrate.quad(rate, t_lo, t_hi, limit=400, points=points)
    if area <= 0:
        raise ValueError("envelope has no area on the requested interval")
    return target_area / area


CHIRP_SHAPES = ("constant", "tanh-ramp", "tanh-return")


@dataclass(frozen=True)
class ChirpSchedule:
    """Rydberg detuning Delta(t).

    ``tanh-ramp`` goes monotonically from ``start`` to ``end`` around ``t_c``.
    ``tanh-return`` first ramps to ``peak`` around ``t_c`` and then to ``end`` around ``t_c2``.
    """

    start: float  # rad/us
    end: float | None = None
    t_c: float = 0.0
    w: float = 1.0
    shape: str = "constant"
    peak: float | None = None
    t_c2: float | None = None

    def __post_init__(self):
        if self.shape not in CHIRP_SHAPES:
            raise ValueError(f"unknown chirp shape {self.shape!r}")
        if self.shape != "constant":
            if self.end is None:
                raise ValueError(f"{self.shape} chirp needs an end value")
            if self.w <= 0:
                raise ValueError("ramp width must be positive")
        if self.shape == "tanh-return":
            if self.peak is None or self.t_c2 is None:
                raise ValueError("tanh-return chirp needs peak and t_c2")
            if self.t_c2 <= self.t_c:
                raise ValueError("t_c2 must come after t_c")

    def __call__(self, t):
        return evaluate_chirp(self, t)


def _step(t, t_c, w):
    return 0.5 * (1.0 + np.tanh((t - t_c) / w))


def evaluate_chirp(c: ChirpSchedule, t):
    t = np.asarray(t, dtype=float)
    if c.shape == "constant":
        out = np.full_like(t, c.start)
    elif c.shape == "tanh-ramp":
        out = c.start + (c.end - c.start) * _step(t, c.t_c, c.w)
    else:
        out = (c.start + (c.peak - c.start) * _step(t, c.t_c, c.w)
               + (c.end - c.peak) * _step(t, c.t_c2, c.w))
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class PulseSchedule:
    """Drive envelopes for one protocol.

    ``mode="raw"`` takes the one-photon envelopes P1 (pump) and P2 (Stokes) and forms
    S = P1 P2 / Delta_s; ``mode="effective"`` sums the sech pulses in ``s`` directly.
    """

    chirp: ChirpSchedule
    mode: str = "effective"
    p1: tuple[SechPulse, ...] = ()
    p2: tuple[SechPulse, ...] = ()
    s: tuple[SechPulse, ...] = ()
    omega: tuple[SechPulse, ...] = ()
    style: str = "simultaneous"

    def __post_init__(self):
        if self.mode not in ("raw", "effective"):
            raise ValueError(f"unknown pulse mode {self.mode!r}")
        if self.style not in ("simultaneous", "stirap"):
            raise ValueError(f"unknown preparation style {self.style!r}")
        if self.mode == "raw" and self.s:
            raise ValueError("raw mode takes p1/p2, not s pulses")
        if self.mode == "effective" and (self.p1 or self.p2):
            raise ValueError("effective mode takes s pulses, not p1/p2")
        if self.style == "stirap" and self.mode == "raw":
            if not (self.p1 and self.p2):
                raise ValueError("STIRAP needs both pump and Stokes pulses")
            # counter-intuitive order: Stokes (P2) peaks first
            if max(p.t0 for p in self.p2) >= min(p.t0 for p in self.p1):
                raise ValueError("STIRAP requires the Stokes pulse P2 to precede the pump P1")

    def p1_at(self, t):
        return envelope(self.p1, t)

    def p2_at(self, t):
        return envelope(self.p2, t)

    def s_at(self, t, delta_s):
        if self.mode == "raw":
            return np.asarray(self.p1_at(t)) * np.asarray(self.p2_at(t)) / delta_s
        return envelope(self.s, t)

    def omega_at(self, t):
        return envelope(self.omega, t)

    def delta_at(self, t):
        return evaluate_chirp(self.chirp, t)

    def rabi_at(self, t, delta_s, n_atoms):
        """(S, S1, S2) at time(s) t."""
        return _split_s(self.s_at(t, delta_s), delta_s, self.delta_at(t), n_atoms)

    def one_photon_at(self, t, delta_s):
        """(P1, P2) at t; effective schedules assume P1 = P2 = sqrt(S * Delta_s)."""
        if self.mode == "raw":
            return np.asarray(self.p1_at(t)), np.asarray(self.p2_at(t))
        p = np.sqrt(np.abs(np.asarray(self.s_at(t, delta_s)) * delta_s))
        return p, p

    def pulse_centres(self) -> list[float]:
        return [p.t0 for p in (*self.p1, *self.p2, *self.s, *self.omega)]
