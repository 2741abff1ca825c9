"""Collapse channels and the Lindblad dissipator.

Each channel contributes  rate * (2 L rho L^+ - L^+ L rho - rho L^+ L).  The operators
are stored in lowering form L, i.e. the adjoint of the raising sums quoted for the model.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import basis as b
from .model import ConfigurationError, SystemParams, photon_factor


@dataclass(frozen=True)
class CollapseChannel:
    name: str
    rate: float
    operator: np.ndarray

    def __post_init__(self):
        if self.rate < 0:
            raise ValueError("channel rate must be non-negative")


# (coefficient, lowered-to, lowered-from) triples, i.e. terms coef |to><from| of L
def _rydberg_terms(n):
    return [
        (1.0, "E0", "R0"),
        (1.0, "E1", "R1"),
        (math.sqrt(2.0), "ER0", "RR0"),
        (math.sqrt(2.0), "EE0", "ER0"),
        (math.sqrt(2.0 * (n - 1)), "R0", "RR0"),
    ]


def _transverse_terms(n):
    return [
        (math.sqrt(n * (n - 1)), "L0", "ER0"),
        (math.sqrt(n * (n - 1) / 2.0), "L0", "EE0"),
        (math.sqrt(n), "L0", "E1"),
        (math.sqrt(n), "L0", "E0"),
    ]


def _cavity_terms(ladder):
    return [
        (photon_factor(ladder, 2), "G1", "G2"),
        (1.0, "G0", "G1"),
        (1.0, "E0", "E1"),
        (1.0, "R0", "R1"),
    ]


def _purcell_terms(n, ladder):
    return [
        (math.sqrt(n), "G1", "E0"),
        (math.sqrt(n) * photon_factor(ladder, 2), "G2", "E1"),
        (math.sqrt(n - 1), "R1", "ER0"),
        (math.sqrt(2.0 * (n - 1)), "E1", "EE0"),
    ]


def _matrix(terms):
    m = np.zeros((b.DIM, b.DIM), dtype=complex)
    for coef, to, frm in terms:
        m[b.index_of(to), b.index_of(frm)] += coef
    return m


def _channels(name, rate, terms, split):
    terms = [t for t in terms if t[0] != 0.0]
    if not split:
        return [CollapseChannel(name, rate, _matrix(terms))]
    return [CollapseChannel(f"{name}:{frm}->{to}", rate, _matrix([(c, to, frm)]))
            for c, to, frm in terms]


def make_channels(params: SystemParams) -> list[CollapseChannel]:
    n = params.n_atoms
    split = params.lindblad_form == "split"
    if params.coupling_mode == "purcell" and params.g != 0:
        raise ConfigurationError("purcell mode replaces the coherent coupling; set g = 0")
    chans = []
    chans += _channels("gamma_r", params.gamma_r, _rydberg_terms(n), split)
    chans += _channels("gamma_perp", params.gamma_perp, _transverse_terms(n), split)
    chans += _channels("kappa", params.kappa, _cavity_terms(params.ladder), split)
    if params.coupling_mode == "purcell":
        chans += _channels("gamma_p", params.gamma_p, _purcell_terms(n, params.ladder), split)
    if params.gamma_deph_r > 0:
        chans.append(CollapseChannel("deph_r", params.gamma_deph_r, _matrix([(1.0, "L0", "R0")])))
    if params.gamma_deph_rr > 0 and n >= 2:
        chans.append(CollapseChannel("deph_rr", params.gamma_deph_rr, _matrix([(1.0, "L0", "RR0")])))
    return chans


def apply_dissipator(channels, rho: np.ndarray) -> np.ndarray:
    out = np.zeros_like(rho, dtype=complex)
    for ch in channels:
        if ch.rate == 0:
            continue
        L = ch.operator
        Ld = L.conj().T
        LdL = Ld @ L
        out += ch.rate * (2.0 * L @ rho @ Ld - LdL @ rho - rho @ LdL)
    return out


def _is_cavity(ch):
    return ch.name == "kappa" or ch.name.startswith("kappa:")


def has_cavity_channel(channels) -> bool:
    return any(_is_cavity(ch) for ch in channels)


def emission_projector(channels) -> np.ndarray:
    """L_kappa^+ L_kappa summed over the cavity-loss channel(s)."""
    kap = [ch for ch in channels if _is_cavity(ch)]
    if not kap:
        raise ConfigurationError("no cavity-loss channel present")
    return sum(ch.operator.conj().T @ ch.operator for ch in kap)


def kappa_of(channels) -> float:
    for ch in channels:
        if _is_cavity(ch):
            return ch.rate
    raise ConfigurationError("no cavity-loss channel present")


@dataclass(frozen=True)
class CompiledDissipator:
    """Dissipator split as -(A rho + rho A) + sum_k J_k rho J_k^+ for fast evaluation.

    A = sum rate L^+ L and J_k = sqrt(2 rate) L_k.
    """

    anti: np.ndarray
    jumps: np.ndarray  # (k, d, d)

    @classmethod
    def from_channels(cls, channels, dim=b.DIM):
        active = [ch for ch in channels if ch.rate > 0]
        anti = np.zeros((dim, dim), dtype=complex)
        jumps = []
        for ch in active:
            L = ch.operator
            anti += ch.rate * (L.conj().T @ L)
            jumps.append(math.sqrt(2.0 * ch.rate) * L)
        jumps = np.array(jumps) if jumps else np.zeros((0, dim, dim), dtype=complex)
        return cls(anti, jumps)
