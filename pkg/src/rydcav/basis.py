"""Truncated collective basis: 11 atoms-photon kets and their product-space expansion.

Canonical order (fixed, used by every matrix and CSV column)::

    G0 G1 G2 R0 R1 RR0 E0 E1 EE0 ER0 L0
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

ATOMIC_LABELS = ("G", "R", "RR", "E", "EE", "ER", "L")
_RYDBERG_COUNT = {"G": 0, "R": 1, "RR": 2, "E": 0, "EE": 0, "ER": 1, "L": 0}
_E_COUNT = {"G": 0, "R": 0, "RR": 0, "E": 1, "EE": 2, "ER": 1, "L": 0}

# per-atom levels of the product space; |s> is adiabatically eliminated
LEVELS = ("g", "e", "r")
N_PHOTON = 3


class UnsupportedStateError(ValueError):
    pass


@dataclass(frozen=True)
class AtomicLabel:
    label: str

    def __post_init__(self):
        if self.label not in ATOMIC_LABELS:
            raise ValueError(f"unknown atomic label {self.label!r}")

    @property
    def rydberg_count(self) -> int:
        return _RYDBERG_COUNT[self.label]

    @property
    def e_count(self) -> int:
        return _E_COUNT[self.label]


@dataclass(frozen=True)
class BasisState:
    atomic: AtomicLabel
    photons: int

    def __post_init__(self):
        if not 0 <= self.photons <= 2:
            raise ValueError("photon number must be 0, 1 or 2")
        if self.name not in _ADMITTED:
            raise ValueError(f"|{self.atomic.label},{self.photons}> is outside the truncated basis")

    @property
    def name(self) -> str:
        return f"{self.atomic.label}{self.photons}"

    @property
    def excitations(self) -> int:
        """Rydberg + e + photon count (0 for the dummy state)."""
        if self.atomic.label == "L":
            return 0
        return self.atomic.rydberg_count + self.atomic.e_count + self.photons

    def __str__(self):
        return f"|{self.atomic.label},{self.photons}>"


_ADMITTED = ("G0", "G1", "G2", "R0", "R1", "RR0", "E0", "E1", "EE0", "ER0", "L0")


def _make(name: str) -> BasisState:
    return BasisState(AtomicLabel(name[:-1]), int(name[-1]))


STATES: tuple[BasisState, ...] = tuple(_make(n) for n in _ADMITTED)
NAMES: tuple[str, ...] = _ADMITTED
DIM = len(STATES)
_INDEX = {s.name: i for i, s in enumerate(STATES)}

# convenient integer indices
G0, G1, G2, R0, R1, RR0, E0, E1, EE0, ER0, L0 = range(DIM)


def enumerate_basis() -> list[BasisState]:
    return list(STATES)


def index_of(state: BasisState | str) -> int:
    name = state if isinstance(state, str) else state.name
    return _INDEX[name]


def state_of(index: int) -> BasisState:
    return STATES[index]


def ket(name: str) -> np.ndarray:
    v = np.zeros(DIM, dtype=complex)
    v[index_of(name)] = 1.0
    return v


def projector(name: str) -> np.ndarray:
    v = ket(name)
    return np.outer(v, v.conj())


def outer(bra_to: str, ket_from: str) -> np.ndarray:
    """|bra_to><ket_from| in the collective basis."""
    m = np.zeros((DIM, DIM), dtype=complex)
    m[index_of(bra_to), index_of(ket_from)] = 1.0
    return m


def tensor_factors(index: int) -> tuple[int, int]:
    """(atomic-label index, photon number) of a collective basis index."""
    s = STATES[index]
    return ATOMIC_LABELS.index(s.atomic.label), s.photons


# ---------------------------------------------------------------------------
# product space expansion


def product_dim(n_atoms: int) -> int:
    return 3**n_atoms * N_PHOTON


def product_index(levels: tuple[int, ...], photons: int) -> int:
    """Index of |levels[0] ... levels[N-1]> (x) |photons>; atom 0 is most significant."""
    idx = 0
    for lvl in levels:
        idx = idx * 3 + lvl
    return idx * N_PHOTON + photons


def product_labels(n_atoms: int) -> list[tuple[tuple[int, ...], int]]:
    return [(lv, n) for lv in itertools.product(range(3), repeat=n_atoms) for n in range(N_PHOTON)]


def expand_to_product(state: BasisState | str, n_atoms: int) -> np.ndarray:
    """Symmetric superposition in the per-atom {g,e,r}^N (x) {0,1,2} product space."""
    if isinstance(state, str):
        state = STATES[index_of(state)]
    if state.atomic.label == "L":
        raise UnsupportedStateError("the dummy state |L,0> has no product-space expansion")
    if not 1 <= n_atoms <= 3:
        raise ValueError("product expansion is limited to 1 <= n_atoms <= 3")
    n_r, n_e = state.atomic.rydberg_count, state.atomic.e_count
    if n_r + n_e > n_atoms:
        raise ValueError(f"{state} needs at least {n_r + n_e} atoms, got {n_atoms}")

    g, e, r = 0, 1, 2
    vec = np.zeros(product_dim(n_atoms), dtype=complex)
    # every assignment with the right number of e's and r's, all with equal weight
    for levels in itertools.product(range(3), repeat=n_atoms):
        if levels.count(r) == n_r and levels.count(e) == n_e:
            vec[product_index(levels, state.photons)] = 1.0
    return vec / np.linalg.norm(vec)


@lru_cache(maxsize=None)
def _isometry(n_atoms: int) -> np.ndarray:
    cols = []
    for s in STATES[:-1]:
        try:
            cols.append(expand_to_product(s, n_atoms))
        except ValueError:
            cols.append(np.zeros(product_dim(n_atoms), dtype=complex))
    v = np.array(cols).T
    v.setflags(write=False)
    return v


def isometry(n_atoms: int) -> np.ndarray:
    """Product-dim x 10 matrix whose columns are the non-dummy collective states.

    States that cannot exist for ``n_atoms`` (e.g. |RR,0> for N=1) give zero columns.
    """
    return _isometry(n_atoms)
