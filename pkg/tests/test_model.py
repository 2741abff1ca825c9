import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rydcav import basis as b
from rydcav.drive import ChirpSchedule, PulseSchedule, SechPulse, effective_rabi
from rydcav.model import (BlockadeWarning, ConfigurationError, SystemParams, blockade_margin, build_h1, build_h2,
                          build_haa, build_total, hamiltonian_terms)
from rydcav.oracle import oracle_hamiltonian
from rydcav.units import mhz

I = b.index_of


def fig2_params(n=1, **kw):
    base = dict(n_atoms=n, g=mhz(14), kappa=mhz(1.4), gamma_r=mhz(1.4e-3), delta_s=mhz(110), delta_r=mhz(220))
    base.update(kw)
    return SystemParams(**base)


def schedule(s_amp=mhz(8.18), omega_amp=mhz(20), chirp=None):
    chirp = chirp or ChirpSchedule(-mhz(110))
    return PulseSchedule(chirp, s=(SechPulse(s_amp, 0.25, 0.05),), omega=(SechPulse(omega_amp, 0.5, 0.01),))


def chirped_schedule():
    chirp = ChirpSchedule(-mhz(110), -mhz(55), t_c=0.05, w=0.0025, shape="tanh-return", peak=0.0, t_c2=0.09)
    return PulseSchedule(chirp, s=(SechPulse(mhz(40), 0.03, 0.005), SechPulse(mhz(60), 0.07, 0.005)),
                         omega=(SechPulse(mhz(100), 0.09, 0.002),))


def test_h1_detuning_cancels():
    h = build_h1(fig2_params(2), schedule(), 0.25)
    assert h[I("R0"), I("R0")] == 0 and h[I("RR0"), I("RR0")] == 0


def test_h1_no_drive():
    h = build_h1(fig2_params(2), schedule(s_amp=0.0), 0.25)
    assert np.count_nonzero(h) == 0


def test_h1_collective_element():
    # S at the pulse peak is the amplitude: <G0|H1|R0> = S1/2 = sqrt(2) S / 4
    h = build_h1(fig2_params(2), schedule(), 0.25)
    assert h[I("G0"), I("R0")] == pytest.approx(math.sqrt(2) * mhz(8.18) / 4, rel=1e-14)
    assert h[I("G0"), I("R0")] / (2 * math.pi) == pytest.approx(5.7842 / 2, rel=1e-4)


def test_h1_only_excitation_block():
    h = build_h1(fig2_params(3), chirped_schedule(), 0.05)
    mask = np.zeros_like(h, dtype=bool)
    blk = [I("G0"), I("R0"), I("RR0")]
    mask[np.ix_(blk, blk)] = True
    assert np.all(h[~mask] == 0)


def test_h1_raw_mode_matches_effective_rabi():
    p = fig2_params(2)
    sch = PulseSchedule(ChirpSchedule(-mhz(100)), "raw", p1=(SechPulse(mhz(30), 0.5, 0.1),),
                        p2=(SechPulse(mhz(25), 0.52, 0.08),))
    for t in (0.3, 0.5, 0.61):
        _, s1, s2 = effective_rabi(sch.p1_at(t), sch.p2_at(t), p.delta_s, -mhz(100), 2)
        x = -mhz(100) + p.delta_s
        want = np.zeros((11, 11), dtype=complex)
        want[I("R0"), I("R0")] = -x
        want[I("RR0"), I("RR0")] = -2 * x
        want[I("G0"), I("R0")] = want[I("R0"), I("G0")] = s1 / 2
        want[I("R0"), I("RR0")] = want[I("RR0"), I("R0")] = s2 / 2
        assert np.array_equal(build_h1(p, sch, t), want)


def test_h2_only_g_couplings():
    h = build_h2(fig2_params(2), schedule(omega_amp=0.0), 0.0)
    g = mhz(14)
    want = {("G1", "E0"): math.sqrt(2) * g / 2, ("G2", "E1"): math.sqrt(2) * g / 2,
            ("R1", "ER0"): g / 2, ("E1", "EE0"): math.sqrt(2) * g / 2}
    expected = np.zeros((11, 11), dtype=complex)
    for (a, c), v in want.items():
        expected[I(a), I(c)] = expected[I(c), I(a)] = v
    assert np.allclose(h, expected, atol=1e-12)


def test_h2_single_atom_has_no_double_states():
    h = build_h2(fig2_params(1, delta_c=mhz(4)), schedule(), 0.5)
    for s in ("RR0", "EE0", "ER0"):
        assert np.all(h[I(s)] == 0) and np.all(h[:, I(s)] == 0)


def test_h2_three_atom_element():
    h = build_h2(fig2_params(3), schedule(), 0.0)
    assert h[I("E1"), I("EE0")] == pytest.approx(mhz(14), rel=1e-14)


def test_h2_omega_and_detuning():
    p = fig2_params(2, delta_c=mhz(4.3))
    h = build_h2(p, schedule(omega_amp=mhz(20)), 0.5)
    assert h[I("R0"), I("E0")] == pytest.approx(mhz(20) / 2)
    assert h[I("ER0"), I("RR0")] == pytest.approx(math.sqrt(2) * mhz(20) / 2)
    assert h[I("EE0"), I("EE0")] == pytest.approx(-2 * mhz(4.3))
    assert h[I("ER0"), I("ER0")] == pytest.approx(-mhz(4.3))


def test_haa():
    assert build_haa(fig2_params(2))[I("RR0"), I("RR0")] == pytest.approx(mhz(110))
    assert np.count_nonzero(build_haa(fig2_params(2, delta_r=0.0))) == 0
    assert np.count_nonzero(build_haa(fig2_params(1))) == 0


def test_total_is_sum_and_hermitian():
    p, sch = fig2_params(2), schedule()
    h = build_total(p, sch, 0.25)
    assert np.array_equal(h, build_h1(p, sch, 0.25) + build_h2(p, sch, 0.25) + build_haa(p))
    assert np.max(np.abs(h - h.conj().T)) < 1e-14
    assert h[I("G0"), I("R0")] != 0


def test_total_all_off():
    p = fig2_params(2, g=0.0)
    h = build_total(p, schedule(s_amp=0.0, omega_amp=0.0), 0.3)
    nz = np.argwhere(h != 0)
    assert nz.tolist() == [[I("RR0"), I("RR0")]]


@pytest.mark.parametrize("n", [1, 2, 3])
def test_hermitian_at_many_times(n):
    p, sch = fig2_params(n, delta_c=mhz(3)), chirped_schedule()
    terms = hamiltonian_terms(p)
    ts = np.random.default_rng(n).uniform(0, 0.15, 1000)
    hs = terms.at(terms.coefficients(p, sch, ts))
    assert np.max(np.abs(hs - np.swapaxes(hs.conj(), 1, 2))) < 1e-14
    # the fast path agrees with the direct builders
    assert np.allclose(hs[7], build_total(p, sch, ts[7]), atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.floats(0, 0.5), st.integers(1, 5), st.floats(-20, 20))
def test_h2_conserves_excitation_number(t, n, dc):
    h = build_h2(fig2_params(n, delta_c=mhz(dc)), schedule(), t)
    exc = [s.excitations for s in b.enumerate_basis()]
    for i, j in np.argwhere(np.abs(h) > 0):
        assert exc[i] == exc[j]


@pytest.mark.parametrize("n", [2, 3])
def test_collective_matches_per_atom_hamiltonian(n):
    p, sch = fig2_params(n, delta_c=mhz(2)), chirped_schedule()
    v = b.isometry(n)
    for t in (0.02, 0.03, 0.05, 0.07, 0.09, 0.12):
        ho = v.conj().T @ oracle_hamiltonian(p, sch, t) @ v
        hc = build_total(p, sch, t)[:10, :10]
        assert np.max(np.abs(ho - hc)) < 1e-12


def test_blockade_margin_no_light():
    assert blockade_margin(fig2_params(2), schedule(s_amp=0.0), np.linspace(0, 1, 11)) == math.inf


def test_blockade_margin_constant_drive():
    p = fig2_params(2, gamma_s=0.0)
    pp = mhz(30)
    sch = schedule(s_amp=pp * pp / p.delta_s)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BlockadeWarning)
        r = blockade_margin(p, sch, [0.25])
    assert r == pytest.approx(p.delta_r / (math.sqrt(2) * pp), rel=1e-12)


def test_blockade_margin_typical_values_warn():
    p = fig2_params(2, gamma_s=mhz(6))
    pp = mhz(30)
    with pytest.warns(BlockadeWarning):
        r = blockade_margin(p, schedule(s_amp=pp * pp / p.delta_s), [0.25])
    # 220 / (1800 / sqrt(1809))
    assert r == pytest.approx(220 / (1800 / math.sqrt(1809)), rel=1e-12)
    assert r == pytest.approx(5.2, abs=0.05)


def test_blockade_margin_degenerate():
    p = fig2_params(2, gamma_s=0.0)
    sch = PulseSchedule(ChirpSchedule(-mhz(110)), "raw", p2=(SechPulse(mhz(10), 0.0, 1.0),))
    with pytest.raises(ConfigurationError):
        blockade_margin(p, sch, [0.0])


def test_params_validation():
    with pytest.raises(ConfigurationError):
        SystemParams(n_atoms=0)
    with pytest.raises(ConfigurationError):
        SystemParams(kappa=-1.0)
    with pytest.raises(ConfigurationError):
        SystemParams(lindblad_form="mixed")
    with pytest.raises(ConfigurationError):
        SystemParams(delta_s=0.0)
