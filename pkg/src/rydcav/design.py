"""Cavity and interaction parameter calculator (SI inputs, angular-frequency outputs in rad/us)."""
from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import constants as sc

from .units import GAMMA_0

# Effective 87Rb D2 dipole moment for the cycling transition, ~3.0 e a0 (C m).
# With the 50 um / 25 mm geometry it gives g ~ 2 pi x 52 MHz.
MU_RB_D2 = 2.534e-29


class GeometryError(ValueError):
    pass


class DivergentFinesseError(GeometryError):
    pass


@dataclass(frozen=True)
class CavityGeometry:
    length: float  # L_c, m
    radius: float  # R_c, m
    wavelength: float = 780e-9
    r1: float = 0.999985
    r2: float = 0.99985
    mu: float = MU_RB_D2

    def __post_init__(self):
        if not 0 < self.length < 2 * self.radius:
            raise GeometryError("need 0 < L_c < 2 R_c for a stable cavity")
        if self.wavelength <= 0 or self.mu <= 0:
            raise GeometryError("wavelength and dipole moment must be positive")
        if self.r1 == 1 and self.r2 == 1:
            raise DivergentFinesseError("lossless mirrors give a divergent finesse")
        for r in (self.r1, self.r2):
            if not 0 < r < 1:
                raise GeometryError("mirror reflectivities must lie in (0, 1)")


@dataclass(frozen=True)
class InteractionSpec:
    c_p: float  # rad/s * m^p
    p: int
    distance: float  # m

    def __post_init__(self):
        if self.p not in (3, 6):
            raise ValueError("p must be 3 or 6")
        if self.distance <= 0:
            raise ZeroDivisionError("pair distance must be positive")


@dataclass(frozen=True)
class CavityDerived:
    w0: float  # m
    volume: float  # m^3
    g: float  # rad/us
    finesse: float
    purcell: float
    gamma_p: float  # rad/us
    cooperativity: float
    kappa: float  # rad/us

    def as_dict(self):
        two_pi = 2 * math.pi
        return {
            "w0_um": self.w0 * 1e6,
            "mode_volume_m3": self.volume,
            "g_2pi_mhz": self.g / two_pi,
            "finesse": self.finesse,
            "purcell_factor": self.purcell,
            "gamma_p_2pi_mhz": self.gamma_p / two_pi,
            "cooperativity": self.cooperativity,
            "kappa_2pi_mhz": self.kappa / two_pi,
        }


def finesse(geom: CavityGeometry) -> float:
    return 2 * math.pi / ((1 - geom.r1) + (1 - geom.r2))


def beam_waist(geom: CavityGeometry) -> float:
    L, R, lam = geom.length, geom.radius, geom.wavelength
    return math.sqrt((lam / math.pi) * math.sqrt(L / 2 * (R - L / 2)))


def mode_volume(geom: CavityGeometry) -> float:
    return math.pi / 4 * beam_waist(geom) ** 2 * geom.length


def coupling_g(geom: CavityGeometry) -> float:
    """Single-atom g = mu sqrt(omega / (2 hbar eps0 V)), in rad/us."""
    omega = 2 * math.pi * sc.c / geom.wavelength
    g_si = geom.mu * math.sqrt(omega / (2 * sc.hbar * sc.epsilon_0 * mode_volume(geom)))
    return g_si * 1e-6


def kappa_from_finesse(geom: CavityGeometry) -> float:
    """kappa = pi c / (F L_c) in rad/us: the full linewidth, i.e. the free spectral range
    2 pi c / 2L divided by F."""
    return math.pi * sc.c / (finesse(geom) * geom.length) * 1e-6


def purcell_factor(geom: CavityGeometry) -> float:
    lam, L = geom.wavelength, geom.length
    return 3 * lam**2 * L * finesse(geom) / (2 * math.pi**2 * mode_volume(geom))


def cavity_derived(geom: CavityGeometry, gamma_0: float = GAMMA_0) -> CavityDerived:
    fp = purcell_factor(geom)
    return CavityDerived(
        w0=beam_waist(geom),
        volume=mode_volume(geom),
        g=coupling_g(geom),
        finesse=finesse(geom),
        purcell=fp,
        gamma_p=fp * gamma_0,
        cooperativity=fp / 2,
        kappa=kappa_from_finesse(geom),
    )


def rate_cooperativity(g: float, kappa: float, gamma_perp: float) -> float:
    """g^2 / (kappa Gamma_perp): the cooperativity implied by the rates themselves."""
    return g**2 / (kappa * gamma_perp)


def blockade_shift(spec: InteractionSpec) -> float:
    """Delta_R = C_p / r^p in the units of c_p (rad/s when c_p is in rad/s m^p)."""
    return spec.c_p / spec.distance**spec.p


def calibrate_c6(shift: float, distance: float, p: int = 6) -> float:
    """C_p reproducing a given shift at a given distance."""
    return shift * distance**p


def sweep_length(geom: CavityGeometry, lengths, gamma_0: float = GAMMA_0):
    """cavity_derived for each L_c in ``lengths`` (other geometry fixed)."""
    rows = []
    for L in lengths:
        g = CavityGeometry(L, geom.radius, geom.wavelength, geom.r1, geom.r2, geom.mu)
        rows.append((L, cavity_derived(g, gamma_0)))
    return rows
