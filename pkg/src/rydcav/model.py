"""Hamiltonians of the N-atom diamond system in the 11-state collective basis.

hbar = 1 and the matrices are written in the frame rotating with the laser and cavity
frequencies, so the free-field term omega_c C^dagger C does not appear; only the cavity
detuning Delta_c survives on states carrying an |e> excitation.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from . import basis as b
from .drive import PulseSchedule
from .units import GAMMA_0

COUPLING_MODES = ("coherent", "purcell")
LINDBLAD_FORMS = ("sum", "split")
LADDERS = ("literal", "bosonic")


class ConfigurationError(ValueError):
    pass


class BlockadeWarning(UserWarning):
    pass


@dataclass(frozen=True)
class SystemParams:
    n_atoms: int = 1
    g: float = 0.0
    kappa: float = 0.0
    gamma_r: float = 0.0
    gamma_perp: float = 0.0
    gamma_0: float = GAMMA_0
    delta_c: float = 0.0
    delta_s: float = 1.0
    delta_r: float = 0.0
    gamma_deph_r: float = 0.0
    gamma_deph_rr: float = 0.0
    coupling_mode: str = "coherent"
    gamma_p: float = 0.0
    lindblad_form: str = "sum"
    ladder: str = "literal"
    # intermediate-state decay, only used by the blockade diagnostic
    gamma_s: float = GAMMA_0

    def __post_init__(self):
        if self.n_atoms < 1:
            raise ConfigurationError("n_atoms must be >= 1")
        for name in ("kappa", "gamma_r", "gamma_perp", "gamma_0", "gamma_deph_r",
                     "gamma_deph_rr", "gamma_p", "gamma_s"):
            if getattr(self, name) < 0:
                raise ConfigurationError(f"{name} must be non-negative")
        if self.coupling_mode not in COUPLING_MODES:
            raise ConfigurationError(f"coupling_mode must be one of {COUPLING_MODES}")
        if self.lindblad_form not in LINDBLAD_FORMS:
            raise ConfigurationError(f"lindblad_form must be one of {LINDBLAD_FORMS}")
        if self.ladder not in LADDERS:
            raise ConfigurationError(f"ladder must be one of {LADDERS}")
        if self.delta_s == 0:
            raise ConfigurationError("delta_s must be non-zero")

    def with_(self, **changes) -> "SystemParams":
        return replace(self, **changes)


def _sym(m: np.ndarray) -> np.ndarray:
    return m + m.conj().T


def _op(pairs) -> np.ndarray:
    m = np.zeros((b.DIM, b.DIM), dtype=complex)
    for coef, to, frm in pairs:
        m[b.index_of(to), b.index_of(frm)] += coef
    return m


def photon_factor(ladder: str, n_upper: int) -> float:
    """Matrix element of the photon lowering step n_upper -> n_upper - 1."""
    return math.sqrt(n_upper) if ladder == "bosonic" else 1.0


# Unit building blocks.  Coefficients that depend on the schedule multiply these.
DETUNING_R = np.diag([0, 0, 0, 1, 0, 2, 0, 0, 0, 0, 0]).astype(complex)  # R0: 1, RR0: 2
HOP_G_R = _sym(_op([(1.0, "G0", "R0")]))
HOP_R_RR = _sym(_op([(1.0, "R0", "RR0")]))
HOP_OMEGA = _sym(_op([
    (1.0, "R0", "E0"),
    (1.0, "R1", "E1"),
    (math.sqrt(2.0), "EE0", "ER0"),
    (math.sqrt(2.0), "ER0", "RR0"),
]))
DETUNING_C = np.diag([0, 0, 0, 0, 0, 0, 1, 1, 2, 1, 0]).astype(complex)  # E0, E1, ER0: 1; EE0: 2


def cavity_coupling(n_atoms: int, ladder: str = "literal") -> np.ndarray:
    """Hermitian g-coupling pattern (without the g/2 prefactor)."""
    n = n_atoms
    return _sym(_op([
        (math.sqrt(n), "G1", "E0"),
        (math.sqrt(n) * photon_factor(ladder, 2), "G2", "E1"),
        (math.sqrt(n - 1), "R1", "ER0"),
        (math.sqrt(2 * (n - 1)), "E1", "EE0"),
    ]))


def restrict(m: np.ndarray, n_atoms: int) -> np.ndarray:
    """Zero the rows/columns of doubly excited states, which do not exist for one atom."""
    if n_atoms >= 2:
        return m
    keep = np.ones(b.DIM)
    keep[[b.RR0, b.EE0, b.ER0]] = 0.0
    return m * keep[:, None] * keep[None, :]


def build_h1(params: SystemParams, schedule: PulseSchedule, t: float) -> np.ndarray:
    """Excitation-side Hamiltonian on the {G0, R0, RR0} block."""
    _, s1, s2 = schedule.rabi_at(t, params.delta_s, params.n_atoms)
    x = schedule.delta_at(t) + params.delta_s
    h = -x * DETUNING_R + 0.5 * s1 * HOP_G_R + 0.5 * s2 * HOP_R_RR
    return restrict(h, params.n_atoms)


def build_h2(params: SystemParams, schedule: PulseSchedule, t: float) -> np.ndarray:
    """Emission-side Hamiltonian (control laser, cavity detuning and, if coherent, g)."""
    h = -params.delta_c * DETUNING_C + 0.5 * schedule.omega_at(t) * HOP_OMEGA
    if params.coupling_mode == "coherent":
        h = h + 0.5 * params.g * cavity_coupling(params.n_atoms, params.ladder)
    return restrict(h, params.n_atoms)


def build_haa(params: SystemParams) -> np.ndarray:
    """Blockade shift: one Rydberg pair inside the volume shifts |RR,0> by Delta_R / 2."""
    h = np.zeros((b.DIM, b.DIM), dtype=complex)
    if params.n_atoms >= 2:
        h[b.RR0, b.RR0] = 0.5 * params.delta_r
    return h


def build_total(params: SystemParams, schedule: PulseSchedule, t: float) -> np.ndarray:
    return build_h1(params, schedule, t) + build_h2(params, schedule, t) + build_haa(params)


@dataclass(frozen=True)
class HamiltonianTerms:
    """H_T(t) = static + sum_k coef_k(t) * matrices[k], for fast repeated evaluation."""

    static: np.ndarray
    matrices: np.ndarray  # (4, 11, 11): detuning, G-R hop, R-RR hop, Omega hop

    def coefficients(self, params: SystemParams, schedule: PulseSchedule, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        _, s1, s2 = schedule.rabi_at(t, params.delta_s, params.n_atoms)
        x = np.asarray(schedule.delta_at(t)) + params.delta_s
        om = np.asarray(schedule.omega_at(t))
        return np.stack([-x, 0.5 * s1, 0.5 * s2, 0.5 * om], axis=-1)

    def at(self, coef: np.ndarray) -> np.ndarray:
        return self.static + np.tensordot(coef, self.matrices, axes=(-1, 0))


def hamiltonian_terms(params: SystemParams) -> HamiltonianTerms:
    n = params.n_atoms
    static = restrict(-params.delta_c * DETUNING_C, n) + build_haa(params)
    if params.coupling_mode == "coherent":
        static = static + 0.5 * params.g * cavity_coupling(n, params.ladder)
    mats = np.stack([restrict(m, n) for m in (DETUNING_R, HOP_G_R, HOP_R_RR, HOP_OMEGA)])
    return HamiltonianTerms(static, mats)


def blockade_margin(params: SystemParams, schedule: PulseSchedule, times, warn_below=10.0):
    """Delta_R divided by the worst-case excitation bandwidth over ``times``.

    Returns inf when no excitation light is present.  Emits a BlockadeWarning below
    ``warn_below``.
    """
    p1, p2 = schedule.one_photon_at(np.asarray(times, dtype=float), params.delta_s)
    p1, p2 = np.abs(p1), np.abs(p2)
    num = p1**2 + p2**2
    den = np.sqrt(2.0 * p1**2 + params.gamma_s**2 / 4.0)
    if np.all(num == 0):
        return math.inf
    if np.any((den == 0) & (num > 0)):
        raise ConfigurationError("blockade condition is degenerate: P1 = Gamma_s = 0 while P2 > 0")
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio_terms = np.where(num > 0, num / np.where(den > 0, den, 1.0), 0.0)
    worst = float(np.max(ratio_terms))
    margin = params.delta_r / worst
    if margin < warn_below:
        warnings.warn(f"blockade margin {margin:.2f} < {warn_below:g}", BlockadeWarning, stacklevel=2)
    return margin
