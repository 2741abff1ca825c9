"""Brute-force reference in the full per-atom product space (N <= 3).

Each atom has levels {g, e, r}; the cavity register holds 0-2 photons.  Per-atom couplings are
chosen so that, restricted to the symmetric subspace, they reproduce the collective matrix
elements exactly:

* g <-> r drive with amplitude S/4 from kets without a Rydberg atom.  A symmetric sum over N
  atoms gives <R|H|G> = sqrt(N) S/4 = S1/2.
* g <-> r drive with amplitude S/(4 (2 + Delta/Delta_s)) from kets with one Rydberg atom.
  Summed over the N(N-1)/2 pairs this gives <RR|H|R> = sqrt(2(N-1)) S/(4 d) = S2/2.
* The Rydberg detuning -(Delta + Delta_s) per Rydberg atom and both drives act only on
  "excitation-side" kets (no e atom, no photon), mirroring the G0/R0/RR0 block.
* Omega/2 on each r <-> e, g/2 on e (x) n <-> g (x) n+1 (ladder factor on 2 <-> 1),
  -Delta_c per e atom, and Delta_R/2 per Rydberg pair.

Dissipation is per atom (Gamma_r: e<-r, Gamma_perp: g<-e) plus the cavity loss C (x) 1.  There
is no dummy state here, so agreement with the collective model is exact only for Gamma_perp =
Gamma_r = 0.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import basis as b
from .dissipation import CollapseChannel, CompiledDissipator
from .drive import PulseSchedule, SingularDenominatorError
from .model import SystemParams, photon_factor
from .propagate import Generator, IntegratorConfig, integrate

G, E, R = 0, 1, 2


class UnsupportedSizeError(ValueError):
    pass


@dataclass(frozen=True)
class ProductSpace:
    n_atoms: int

    def __post_init__(self):
        if not 1 <= self.n_atoms <= 3:
            raise UnsupportedSizeError("the product-space oracle supports 1 <= n_atoms <= 3")

    @property
    def dim(self) -> int:
        return b.product_dim(self.n_atoms)

    def labels(self):
        return b.product_labels(self.n_atoms)

    def index(self, levels, photons) -> int:
        return b.product_index(tuple(levels), photons)


def _add_sym(m, i, j, val):
    m[i, j] += val
    m[j, i] += np.conj(val)


def _build(params: SystemParams):
    sp = ProductSpace(params.n_atoms)
    n, d = params.n_atoms, sp.dim
    static = np.zeros((d, d), dtype=complex)
    det = np.zeros((d, d), dtype=complex)
    drive0 = np.zeros((d, d), dtype=complex)
    drive1 = np.zeros((d, d), dtype=complex)
    omega = np.zeros((d, d), dtype=complex)
    for levels, ph in sp.labels():
        i = sp.index(levels, ph)
        n_e, n_r = levels.count(E), levels.count(R)
        static[i, i] += -params.delta_c * n_e + 0.5 * params.delta_r * math.comb(n_r, 2)
        exc_side = n_e == 0 and ph == 0
        if exc_side:
            det[i, i] = n_r
        for a, lv in enumerate(levels):
            if lv == G and exc_side and n_r <= 1:
                up = list(levels)
                up[a] = R
                target = drive0 if n_r == 0 else drive1
                _add_sym(target, sp.index(up, 0), i, 1.0)
            if lv == R:
                up = list(levels)
                up[a] = E
                _add_sym(omega, sp.index(up, ph), i, 1.0)
            if lv == E and ph + 1 < b.N_PHOTON and params.coupling_mode == "coherent":
                dn = list(levels)
                dn[a] = G
                _add_sym(static, sp.index(dn, ph + 1), i,
                         0.5 * params.g * photon_factor(params.ladder, ph + 1))
    return sp, static, np.stack([det, drive0, drive1, omega])


def _coef_fn(params: SystemParams, schedule: PulseSchedule):
    ds = params.delta_s

    def fn(t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        s = np.asarray(schedule.s_at(t, ds), dtype=float) * np.ones_like(t)
        delta = np.asarray(schedule.delta_at(t), dtype=float) * np.ones_like(t)
        om = np.asarray(schedule.omega_at(t), dtype=float) * np.ones_like(t)
        if params.n_atoms >= 2:
            den = 2.0 + delta / ds
            if np.any(np.abs(den) < 1e-12):
                raise SingularDenominatorError("2 + Delta(t)/Delta_s = 0: S2 is singular")
            s2 = s / (4.0 * den)
        else:
            s2 = np.zeros_like(s)
        return np.stack([-(delta + ds), s / 4.0, s2, 0.5 * om], axis=-1)

    return fn


def _atom_op(n, atom, to, frm):
    m3 = np.zeros((3, 3))
    m3[to, frm] = 1.0
    mats = [np.eye(3)] * n
    mats[atom] = m3
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return np.kron(out, np.eye(b.N_PHOTON))


def product_channels(params: SystemParams):
    n = params.n_atoms
    c = np.zeros((b.N_PHOTON, b.N_PHOTON))
    for k in range(1, b.N_PHOTON):
        c[k - 1, k] = photon_factor(params.ladder, k)
    chans = [CollapseChannel("kappa", params.kappa, np.kron(np.eye(3**n), c).astype(complex))]
    for a in range(n):
        chans.append(CollapseChannel(f"gamma_r:{a}", params.gamma_r, _atom_op(n, a, E, R).astype(complex)))
        chans.append(CollapseChannel(f"gamma_perp:{a}", params.gamma_perp, _atom_op(n, a, G, E).astype(complex)))
    return chans


def oracle_generator(params: SystemParams, schedule: PulseSchedule) -> Generator:
    _, static, mats = _build(params)
    diss = CompiledDissipator.from_channels(product_channels(params), dim=static.shape[0])
    return Generator(static, mats, _coef_fn(params, schedule), diss, tuple(schedule.pulse_centres()))


def oracle_hamiltonian(params: SystemParams, schedule: PulseSchedule, t: float) -> np.ndarray:
    gen = oracle_generator(params, schedule)
    return gen.hamiltonian(gen.coef_fn(t)[0])


def ground_state(n_atoms: int) -> np.ndarray:
    v = b.expand_to_product("G0", n_atoms)
    return np.outer(v, v.conj())


def oracle_run(params: SystemParams, schedule: PulseSchedule, config: IntegratorConfig, t_span,
               rho0=None, check=True):
    """Evolve the product-space master equation; rho0 defaults to |g...g, 0>."""
    ProductSpace(params.n_atoms)
    if rho0 is None:
        rho0 = ground_state(params.n_atoms)
    return integrate(oracle_generator(params, schedule), config, rho0, t_span, check)


def project_to_collective(rho_product, n_atoms=None):
    """(11x11 collective rho, leakage) with leakage = 1 - trace of the symmetric projection.

    Works on a single matrix or a stack.  The dummy-state row/column is zero.
    """
    rho_product = np.asarray(rho_product)
    dim = rho_product.shape[-1]
    if n_atoms is None:
        n_atoms = {9: 1, 27: 2, 81: 3}.get(dim)
        if n_atoms is None:
            raise UnsupportedSizeError(f"no product space of dimension {dim}")
    v = b.isometry(n_atoms)
    small = np.einsum("ka,...kl,lb->...ab", v.conj(), rho_product, v)
    out = np.zeros(rho_product.shape[:-2] + (b.DIM, b.DIM), dtype=complex)
    out[..., :-1, :-1] = small
    leak = 1.0 - np.real(np.trace(small, axis1=-2, axis2=-1))
    return out, (float(leak) if np.ndim(leak) == 0 else leak)


def double_rydberg_population(rho_product, n_atoms):
    """Total population of product kets with two or more Rydberg atoms."""
    sp = ProductSpace(n_atoms)
    idx = [sp.index(lv, ph) for lv, ph in sp.labels() if lv.count(R) >= 2]
    return np.real(np.diagonal(rho_product, axis1=-2, axis2=-1)[..., idx].sum(axis=-1))


def double_excitation_population(rho_product, n_atoms):
    """Population of product kets with two or more atomic (r or e) excitations."""
    sp = ProductSpace(n_atoms)
    idx = [sp.index(lv, ph) for lv, ph in sp.labels() if lv.count(R) + lv.count(E) >= 2]
    return np.real(np.diagonal(rho_product, axis1=-2, axis2=-1)[..., idx].sum(axis=-1))
