import itertools

import numpy as np
import pytest

from rydcav import basis as b


def atom_ket(level):
    v = np.zeros(3)
    v["ger".index(level)] = 1.0
    return v


def product_ket(levels, photons):
    """Hand-built |levels> (x) |photons> via explicit Kronecker products."""
    out = np.array([1.0])
    for lv in levels:
        out = np.kron(out, atom_ket(lv))
    ph = np.zeros(3)
    ph[photons] = 1.0
    return np.kron(out, ph)


def test_eleven_states_in_canonical_order():
    states = b.enumerate_basis()
    assert len(states) == 11
    assert [s.name for s in states] == ["G0", "G1", "G2", "R0", "R1", "RR0", "E0", "E1", "EE0", "ER0", "L0"]
    assert b.index_of("G0") == 0
    assert b.enumerate_basis() == states


def test_label_counts():
    ryd = {"G": 0, "R": 1, "RR": 2, "E": 0, "EE": 0, "ER": 1, "L": 0}
    exc = {"G": 0, "R": 0, "RR": 0, "E": 1, "EE": 2, "ER": 1, "L": 0}
    for lab in b.ATOMIC_LABELS:
        a = b.AtomicLabel(lab)
        assert a.rydberg_count == ryd[lab]
        assert a.e_count == exc[lab]


def test_excitation_number_at_most_two():
    for s in b.enumerate_basis():
        assert s.excitations <= 2


@pytest.mark.parametrize("label,photons", [("G", 3), ("RR", 1), ("L", 1), ("EE", 1), ("Q", 0)])
def test_states_outside_truncation_rejected(label, photons):
    with pytest.raises(ValueError):
        b.BasisState(b.AtomicLabel(label), photons)


def test_index_round_trip():
    for s in b.enumerate_basis():
        assert b.state_of(b.index_of(s)) == s


def test_expand_r0_two_atoms():
    want = (product_ket("rg", 0) + product_ket("gr", 0)) / np.sqrt(2)
    assert np.allclose(b.expand_to_product("R0", 2), want, atol=1e-15)


def test_expand_er0_two_atoms():
    want = (product_ket("er", 0) + product_ket("re", 0)) / np.sqrt(2)
    assert np.allclose(b.expand_to_product("ER0", 2), want, atol=1e-15)


def test_expand_ee0_three_atoms():
    want = (product_ket("eeg", 0) + product_ket("ege", 0) + product_ket("gee", 0)) / np.sqrt(3)
    assert np.allclose(b.expand_to_product("EE0", 3), want, atol=1e-15)


def test_rr0_two_atoms_is_rr():
    v = b.expand_to_product("RR0", 2)
    assert abs(abs(np.vdot(product_ket("rr", 0), v)) - 1.0) < 1e-12


@pytest.mark.parametrize("n", [1, 2, 3])
def test_expansions_normalized(n):
    for s in b.enumerate_basis()[:-1]:
        if s.atomic.rydberg_count + s.atomic.e_count > n:
            continue
        assert abs(np.linalg.norm(b.expand_to_product(s, n)) - 1.0) < 1e-12


@pytest.mark.parametrize("n", [2, 3])
def test_expansions_orthogonal(n):
    vecs = [b.expand_to_product(s, n) for s in b.enumerate_basis()[:-1]]
    for u, v in itertools.combinations(vecs, 2):
        assert abs(np.vdot(u, v)) < 1e-12


def test_dummy_state_has_no_expansion():
    with pytest.raises(b.UnsupportedStateError):
        b.expand_to_product("L0", 2)


def test_too_few_atoms():
    with pytest.raises(ValueError):
        b.expand_to_product("RR0", 1)
    with pytest.raises(ValueError):
        b.expand_to_product("G0", 4)


def test_isometry_columns():
    v = b.isometry(2)
    assert v.shape == (27, 10)
    assert np.allclose(v.conj().T @ v, np.eye(10), atol=1e-12)
    # RR0, EE0, ER0 do not exist for one atom
    v1 = b.isometry(1)
    assert np.allclose(np.linalg.norm(v1, axis=0), [1, 1, 1, 1, 1, 0, 1, 1, 0, 0])


def test_tensor_factors():
    assert b.tensor_factors(b.index_of("ER0")) == (b.ATOMIC_LABELS.index("ER"), 0)
    assert b.tensor_factors(b.index_of("G2")) == (0, 2)
