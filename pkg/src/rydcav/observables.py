"""Observables derived from density matrices and trajectories."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.signal import find_peaks

from . import basis as b
from .dissipation import emission_projector, kappa_of

EIG_FLOOR = 1e-14
G2_DEN_FLOOR = 1e-15
UNDEFINED = math.nan  # g2 denominator vanished; distinct from the -inf anti-bunching sentinel


class UnsupportedAtomNumber(ValueError):
    pass


def populations(rho) -> np.ndarray:
    """Diagonal of rho (works on a single matrix or a stack)."""
    return np.real(np.diagonal(rho, axis1=-2, axis2=-1))


def photon_rate(rho, channels) -> np.ndarray:
    """Cavity output flux 2 kappa <L_k^+ L_k> in photons per us."""
    proj = emission_projector(channels)
    kappa = kappa_of(channels)
    return 2.0 * kappa * np.real(np.einsum("ij,...ji->...", proj, rho))


def emission_efficiency(traj, channels, cumulative=False, quadrature="auto"):
    """Time integral of the photon rate.

    ``quadrature="trapezoid"`` integrates the sampled rate.  ``"auto"`` prefers the in-step
    accumulator recorded by the integrator (``traj.monitors["emission"]``), which does not
    depend on the sampling stride, and falls back to the trapezoid rule.
    """
    mon = getattr(traj, "monitors", None) or {}
    if quadrature == "auto" and "emission" in mon:
        cum = 2.0 * kappa_of(channels) * np.asarray(mon["emission"])
    elif quadrature in ("auto", "trapezoid"):
        cum = cumulative_trapezoid(photon_rate(traj.states, channels), traj.times, initial=0.0)
    else:
        raise ValueError("quadrature must be 'auto' or 'trapezoid'")
    return cum if cumulative else float(cum[-1])


# ---------------------------------------------------------------------------
# two-atom operators, defined per atom in the product space


def _atom_op(n_atoms, atom, op3):
    """op3 (3x3 on {g,e,r}) acting on ``atom``, tensored with identity elsewhere and on photons."""
    mats = [np.eye(3)] * n_atoms
    mats[atom] = op3
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return np.kron(out, np.eye(b.N_PHOTON))


_RAISE = np.zeros((3, 3))
_RAISE[1, 0] = 1.0  # D+ |g> = |e>
_LOWER = _RAISE.T.copy()


@lru_cache(maxsize=None)
def _pair_operators(n_atoms):
    """Collective-basis images V^+ O V of the pair operators, averaged over ordered pairs i != j."""
    if n_atoms not in (2, 3):
        raise UnsupportedAtomNumber("two-atom correlations need n_atoms in {2, 3}")
    v = b.isometry(n_atoms)
    up = [_atom_op(n_atoms, i, _RAISE) for i in range(n_atoms)]
    dn = [_atom_op(n_atoms, i, _LOWER) for i in range(n_atoms)]
    num = [u @ d for u, d in zip(up, dn)]  # D+_i D-_i, the e-population of atom i
    pairs = list(itertools.permutations(range(n_atoms), 2))

    def proj(o):
        m = v.conj().T @ o @ v
        m.setflags(write=False)
        return m

    return {
        "pairs": pairs,
        "mu": [proj(up[i] @ dn[j]) for i, j in pairs],
        "n": [proj(num[i]) for i in range(n_atoms)],
        "nn": [proj(num[i] @ num[j]) for i, j in pairs],
    }


def _expect(m, rho):
    """tr(rho_product O) computed as tr(rho[:10,:10] V^+ O V); the dummy state has no expansion."""
    r = np.asarray(rho)[..., :-1, :-1]
    return np.einsum("ij,...ji->...", m, r)


def dipole_correlation(rho, n_atoms, normalized=False):
    """<D+_i D-_j> averaged over ordered pairs i != j.

    With ``normalized`` each pair is divided by sqrt(<D+_i D-_i><D+_j D-_j>); pairs with a
    vanishing denominator give nan.
    """
    ops = _pair_operators(n_atoms)
    vals = []
    for (i, j), m in zip(ops["pairs"], ops["mu"]):
        x = _expect(m, rho)
        if normalized:
            den = np.sqrt(np.real(_expect(ops["n"][i], rho)) * np.real(_expect(ops["n"][j], rho)))
            with np.errstate(invalid="ignore", divide="ignore"):
                x = np.where(den > 0, x / np.where(den > 0, den, 1.0), np.nan + 0j)
        vals.append(x)
    out = np.mean(vals, axis=0)
    return complex(out) if np.ndim(out) == 0 else out


def g2(rho, n_atoms):
    """(numerator, denominator) of the equal-time g2, averaged over ordered pairs."""
    ops = _pair_operators(n_atoms)
    num = np.mean([np.real(_expect(m, rho)) for m in ops["nn"]], axis=0)
    ns = [np.real(_expect(m, rho)) for m in ops["n"]]
    den = np.mean([ns[i] * ns[j] for i, j in ops["pairs"]], axis=0)
    return num, den


def log_g2(rho, n_atoms):
    """ln g2_ij.  -inf when the numerator is zero, nan (UNDEFINED) when the denominator <= 1e-15."""
    num, den = g2(rho, n_atoms)
    num, den = np.asarray(num), np.asarray(den)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = np.where(num > 0, np.log(np.where(num > 0, num, 1.0) / np.where(den > 0, den, 1.0)), -np.inf)
    val = np.where(den <= G2_DEN_FLOOR, UNDEFINED, val)
    return float(val) if val.ndim == 0 else val


# ---------------------------------------------------------------------------
# entropies


def _embedding():
    """21 x 11 map from the collective basis into (atomic label) x (photon) = 7 x 3."""
    m = np.zeros((len(b.ATOMIC_LABELS) * b.N_PHOTON, b.DIM))
    for i in range(b.DIM):
        a, n = b.tensor_factors(i)
        m[a * b.N_PHOTON + n, i] = 1.0
    return m


_EMBED = _embedding()


def von_neumann(rho) -> np.ndarray:
    rho = np.asarray(rho)
    herm = 0.5 * (rho + np.swapaxes(rho.conj(), -1, -2))
    eta = np.linalg.eigvalsh(herm)
    eta = np.where(eta < EIG_FLOOR, 0.0, eta)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(eta > 0, -eta * np.log(np.where(eta > 0, eta, 1.0)), 0.0)
    return terms.sum(axis=-1)


def reduced_states(rho):
    """(rho_atoms 7x7, rho_photons 3x3) via the label x photon factorisation."""
    big = np.einsum("ai,...ij,bj->...ab", _EMBED, rho, _EMBED)
    na, npn = len(b.ATOMIC_LABELS), b.N_PHOTON
    big = big.reshape(big.shape[:-2] + (na, npn, na, npn))
    rho_a = np.einsum("...anbn->...ab", big)
    rho_p = np.einsum("...anam->...nm", big)
    return rho_a, rho_p


def entropies(rho, tol=1e-9):
    """(S_total, S_atoms, S_photons, araki_lieb_ok)."""
    s = von_neumann(rho)
    rho_a, rho_p = reduced_states(rho)
    sa, sp = von_neumann(rho_a), von_neumann(rho_p)
    ok = (np.abs(sa - sp) <= s + tol) & (s <= sa + sp + tol)
    if np.ndim(s) == 0:
        return float(s), float(sa), float(sp), bool(ok)
    return s, sa, sp, ok


# ---------------------------------------------------------------------------
# frequency fitting


def fit_oscillation(times, signal, t_min=None, t_max=None, min_peaks=3):
    """Angular frequency from the spacing of signal maxima (parabolic peak refinement).

    Peak times are refined with a three-point parabola and a straight line is fitted through
    them; returns 2 pi / slope, or nan when fewer than ``min_peaks`` maxima are found.
    """
    t = np.asarray(times, dtype=float)
    y = np.asarray(signal, dtype=float)
    mask = np.ones_like(t, dtype=bool)
    if t_min is not None:
        mask &= t >= t_min
    if t_max is not None:
        mask &= t <= t_max
    t, y = t[mask], y[mask]
    if len(t) < 5:
        return math.nan
    span = float(np.ptp(y))
    peaks, _ = find_peaks(y, prominence=0.05 * span if span > 0 else None)
    peaks = peaks[(peaks > 0) & (peaks < len(y) - 1)]
    if len(peaks) < min_peaks:
        return math.nan
    refined = []
    for i in peaks:
        a, c0, c = y[i - 1], y[i], y[i + 1]
        den = a - 2 * c0 + c
        off = 0.5 * (a - c) / den if den != 0 else 0.0
        refined.append(t[i] + off * (t[i + 1] - t[i]))
    slope = np.polyfit(np.arange(len(refined)), refined, 1)[0]
    return 2 * math.pi / slope


# ---------------------------------------------------------------------------
# bundled series for output


@dataclass
class ObservableSeries:
    times: np.ndarray
    populations: np.ndarray
    photon_rate: np.ndarray
    cumulative_efficiency: np.ndarray
    dipole_corr: np.ndarray  # normalized, complex; nan when undefined
    log_g2: np.ndarray
    entropy_total: np.ndarray
    entropy_atoms: np.ndarray
    entropy_photons: np.ndarray
    araki_lieb_ok: np.ndarray
    dipole_corr_raw: np.ndarray = field(default=None)

    @property
    def efficiency(self) -> float:
        return float(self.cumulative_efficiency[-1])


def compute_series(traj, channels, n_atoms) -> ObservableSeries:
    rho = traj.states
    rate = photon_rate(rho, channels)
    cum = emission_efficiency(traj, channels, cumulative=True)
    nan = np.full(len(traj.times), np.nan)
    if n_atoms in (2, 3):
        mu = dipole_correlation(rho, n_atoms, normalized=True)
        mu_raw = dipole_correlation(rho, n_atoms)
        lg = log_g2(rho, n_atoms)
    else:
        mu, mu_raw, lg = nan + 0j, nan + 0j, nan
    s, sa, sp, ok = entropies(rho)
    return ObservableSeries(traj.times, populations(rho), rate, cum, mu, lg, s, sa, sp, ok, mu_raw)
