"""Fixed-step RK4 integration of the Lindblad master equation.

The right-hand side is evaluated with plain matrix products on the d x d density matrix:

    drho/dt = -i (K rho - rho K^+) + sum_k J_k rho J_k^+,    K = H - i A,

with A = sum rate L^+ L and J_k = sqrt(2 rate) L_k, which is the same generator as
-i[H, rho] + sum rate (2 L rho L^+ - {L^+ L, rho}).  No renormalisation is applied.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import basis as b
from .dissipation import CompiledDissipator, emission_projector, has_cavity_channel, make_channels
from .model import ConfigurationError, SystemParams, hamiltonian_terms
from .drive import PulseSchedule

TRACE_TOL = 1e-9
HERMITIAN_TOL = 1e-10
EIGEN_TOL = -1e-8


class DivergenceError(ArithmeticError):
    def __init__(self, t):
        super().__init__(f"non-finite density matrix at t = {t:.6g} us")
        self.t = t


@dataclass(frozen=True)
class IntegratorConfig:
    dt: float = 1e-4  # us
    stride: int = 10
    method: str = "rk4"
    max_phase: float = 0.1  # bound on dt * max ||H||

    def __post_init__(self):
        if not self.dt > 0:
            raise ConfigurationError("dt must be positive")
        if self.stride < 1:
            raise ConfigurationError("stride must be >= 1")
        if self.method != "rk4":
            raise ConfigurationError("only the rk4 method is available")


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # (n, d, d)
    health: dict
    # cumulative integrals of tr(M rho) for each monitored operator M, at the sample times
    monitors: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.times)

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


@dataclass(frozen=True)
class Generator:
    """Everything the stepper needs: H(t) = static + coef(t) . matrices, plus the dissipator."""

    static: np.ndarray
    matrices: np.ndarray
    coef_fn: object  # t array -> (n, k) coefficients
    dissipator: CompiledDissipator
    centres: tuple = ()

    def hamiltonian(self, coef):
        return self.static + np.tensordot(coef, self.matrices, axes=(-1, 0))


def collective_generator(params: SystemParams, schedule: PulseSchedule) -> Generator:
    terms = hamiltonian_terms(params)
    diss = CompiledDissipator.from_channels(make_channels(params))
    return Generator(terms.static, terms.matrices,
                     lambda t: terms.coefficients(params, schedule, t), diss,
                     tuple(schedule.pulse_centres()))


def max_norm(gen: Generator, t_span, samples=2001) -> float:
    t0, t1 = t_span
    ts = np.concatenate([np.linspace(t0, t1, samples),
                         [c for c in gen.centres if t0 <= c <= t1]])
    hs = gen.hamiltonian(gen.coef_fn(ts))
    return float(np.max(np.linalg.norm(hs, ord=2, axis=(1, 2))))


def check_step(gen: Generator, config: IntegratorConfig, t_span) -> float:
    """Raise if dt * max ||H|| exceeds the configured bound; return the product."""
    phase = config.dt * max_norm(gen, t_span)
    if phase > config.max_phase * (1 + 1e-12):
        raise ConfigurationError(
            f"dt * max||H|| = {phase:.3g} exceeds {config.max_phase:g}; reduce dt")
    return phase


def _health(rho):
    tr = np.trace(rho, axis1=-2, axis2=-1)
    herm = np.max(np.abs(rho - np.swapaxes(rho.conj(), -1, -2)), axis=(-2, -1))
    sym = 0.5 * (rho + np.swapaxes(rho.conj(), -1, -2))
    mineig = np.linalg.eigvalsh(sym)[..., 0]
    return np.abs(tr - 1.0), herm, mineig


def integrate(gen: Generator, config: IntegratorConfig, rho0, t_span, check=True,
              monitors=None) -> Trajectory:
    """RK4 from t_span[0] to t_span[1].

    ``monitors`` maps names to d x d operators M; the integral of tr(M rho) is accumulated with
    the same RK4 stages as the state, so it is exact to the integrator's order regardless of the
    sampling stride.
    """
    t0, t1 = map(float, t_span)
    if not (math.isfinite(t0) and math.isfinite(t1)) or t1 <= t0:
        raise ConfigurationError("t_span must be finite and increasing")
    if check:
        check_step(gen, config, t_span)
    n_steps = max(1, math.ceil((t1 - t0) / config.dt - 1e-9))
    dt = (t1 - t0) / n_steps

    # coefficients at every half step, evaluated once
    half_t = t0 + 0.5 * dt * np.arange(2 * n_steps + 1)
    coef = np.asarray(gen.coef_fn(half_t), dtype=float)

    anti = gen.dissipator.anti
    jumps = gen.dissipator.jumps
    k = len(jumps)
    d = anti.shape[0]
    jstack = jumps.reshape(k * d, d)
    jdag = np.swapaxes(jumps.conj(), -1, -2).reshape(k * d, d)

    def rhs(rho, K, Kd):
        out = -1j * (K @ rho - rho @ Kd)
        if k:
            a = (jstack @ rho).reshape(k, d, d).transpose(1, 0, 2).reshape(d, k * d)
            out += a @ jdag
        return out

    def keff(j):
        K = gen.hamiltonian(coef[j]) - 1j * anti
        return K, K.conj().T

    names = list(monitors or {})
    mon = np.array([np.asarray(monitors[k], dtype=complex).T for k in names]) if names else None
    acc = np.zeros(len(names))
    acc_s = np.zeros((0, len(names)))

    def weigh(r):
        return np.real(np.einsum("mij,ij->m", mon, r))

    rho = np.array(rho0, dtype=complex)
    sample_idx = list(range(0, n_steps + 1, config.stride))
    if sample_idx[-1] != n_steps:
        sample_idx.append(n_steps)
    times = t0 + dt * np.array(sample_idx)
    states = np.empty((len(sample_idx), d, d), dtype=complex)
    states[0] = rho
    if names:
        acc_s = np.zeros((len(sample_idx), len(names)))
    si = 1
    Ka = keff(0)
    # overflow is reported as DivergenceError at the next sample
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(1, n_steps + 1):
            Kb = keff(2 * n - 1)
            Kc = keff(2 * n)
            k1 = rhs(rho, *Ka)
            r2 = rho + 0.5 * dt * k1
            k2 = rhs(r2, *Kb)
            r3 = rho + 0.5 * dt * k2
            k3 = rhs(r3, *Kb)
            r4 = rho + dt * k3
            k4 = rhs(r4, *Kc)
            if names:
                acc += (dt / 6.0) * (weigh(rho) + 2.0 * weigh(r2) + 2.0 * weigh(r3) + weigh(r4))
            rho = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            Ka = Kc
            if si < len(sample_idx) and n == sample_idx[si]:
                if not np.all(np.isfinite(rho)):
                    raise DivergenceError(t0 + n * dt)
                states[si] = rho
                if names:
                    acc_s[si] = acc
                si += 1

    tr, herm, mineig = _health(states)
    health = {"trace_err": tr, "herm_err": herm, "min_eig": mineig}
    return Trajectory(times, states, health, {k: acc_s[:, i] for i, k in enumerate(names)})


def run(params: SystemParams, schedule: PulseSchedule, config: IntegratorConfig, rho0, t_span,
        check=True) -> Trajectory:
    """Evolve rho0 over t_span in the 11-state collective basis."""
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (b.DIM, b.DIM):
        raise ConfigurationError(f"rho0 must be {b.DIM}x{b.DIM}")
    channels = make_channels(params)
    monitors = {"emission": emission_projector(channels)} if has_cavity_channel(channels) else None
    return integrate(collective_generator(params, schedule), config, rho0, t_span, check, monitors)


@dataclass(frozen=True)
class HealthReport:
    max_trace_err: float
    max_herm_err: float
    min_eig: float

    @property
    def trace_ok(self):
        return self.max_trace_err < TRACE_TOL

    @property
    def herm_ok(self):
        return self.max_herm_err < HERMITIAN_TOL

    @property
    def eig_ok(self):
        return self.min_eig > EIGEN_TOL

    @property
    def ok(self):
        return self.trace_ok and self.herm_ok and self.eig_ok

    def as_dict(self):
        return {"max_trace_err": self.max_trace_err, "max_herm_err": self.max_herm_err,
                "min_eig": self.min_eig, "ok": self.ok}


def checkpoint_health(traj: Trajectory) -> HealthReport:
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    # recomputed from the states so a corrupted sample is always caught
    tr, herm, mineig = _health(traj.states)
    return HealthReport(float(np.max(tr)), float(np.max(herm)), float(np.min(mineig)))


def pure(name: str) -> np.ndarray:
    return b.projector(name)
