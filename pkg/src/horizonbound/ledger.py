"""Black-hole thermodynamic bookkeeping for one measurement-and-drop experiment."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.special import logsumexp

from .channel import DropOutcome, DropPlan, KrausSet, drop_state, matter_entropy_closed_form, unnormalized_entropy
from .errors import QuadratureError
from .info import OptimizerSettings, ensemble_from_branches, holevo, optimize_accessible_info, von_neumann
from .linalg import ATOL, is_hermitian
from .thermal import HartleHawkingState, mode_hamiltonian, reduce_to_A


def _check_mass(mass: float) -> float:
    if not mass > 0:
        raise ValueError(f"mass must be positive, got {mass}")
    return float(mass)


def hawking_temperature(mass: float) -> float:
    return 1.0 / (8.0 * math.pi * _check_mass(mass))


def bh_entropy(mass: float) -> float:
    """Horizon entropy ``A/4 = 4 pi M^2``."""
    return 4.0 * math.pi * _check_mass(mass) ** 2


def blueshift_factor(r: float, mass: float) -> float:
    """Schwarzschild lapse ``sqrt(1 - 2M/r)`` at areal radius ``r``."""
    _check_mass(mass)
    if not r > 2 * mass:
        raise ValueError(f"radius {r} is at or inside the horizon 2M = {2 * mass}")
    return math.sqrt(1.0 - 2.0 * mass / r)


def local_temperature(r: float, mass: float) -> float:
    return hawking_temperature(mass) / blueshift_factor(r, mass)


@dataclass(frozen=True)
class BlackHoleParams:
    mass: float

    def __post_init__(self):
        _check_mass(self.mass)

    @property
    def t_bh(self) -> float:
        return hawking_temperature(self.mass)

    @property
    def s_bh(self) -> float:
        return bh_entropy(self.mass)

    @property
    def horizon_area(self) -> float:
        return 16.0 * math.pi * self.mass ** 2

    def after(self, delta_w: float) -> "BlackHoleParams":
        """Black hole after absorbing work ``delta_w`` (for experiment sequences)."""
        return BlackHoleParams(self.mass + delta_w)


@dataclass(frozen=True)
class FreeEnergyChange:
    delta_f: float
    energy_residual: float
    s_m: float
    s_m_no_drop: float


def _branch_entropy_sum(probs, states, null) -> float:
    """``sum p S'_a - sum p log p`` over non-null branches."""
    return float(sum(p * unnormalized_entropy(s) - p * np.log(p)
                     for p, s, z in zip(probs, states, null) if not z))


def free_energy_change(outcome, state: HartleHawkingState, bh: BlackHoleParams) -> FreeEnergyChange:
    """Free-energy change of the experiment, taking internal energy as conserved.

    ``outcome`` is a :class:`~horizonbound.channel.MeasurementOutcome` or a
    :class:`~horizonbound.channel.DropOutcome`; only its branch probabilities
    and states are used. The energy bookkeeping gap ``|E_0 - sum p E_a|`` is
    reported, not enforced.
    """
    rho_a = reduce_to_A(state)
    s_m = von_neumann(rho_a)
    s_after = _branch_entropy_sum(outcome.probs, outcome.states, outcome.null)
    h = mode_hamiltonian(state.spec)
    e0 = float(np.real(np.trace(h @ rho_a)))
    e1 = float(sum(p * np.real(np.trace(h @ s)) for p, s, z in zip(outcome.probs, outcome.states, outcome.null)
                   if not z))
    return FreeEnergyChange(delta_f=(s_m - s_after) * bh.t_bh, energy_residual=abs(e0 - e1),
                            s_m=s_m, s_m_no_drop=s_after)


@dataclass(frozen=True)
class ExperimentLedger:
    delta_w: float
    delta_f: float
    delta_s_bh: float
    s_m: float
    s_m_prime: float
    delta_s_t: float
    holevo_hd: float
    acc_info: float
    p_drop: float
    energy_residual: float
    slack: float
    t_bh: float
    s_m_prime_joint: float

    @property
    def margin_gsl(self) -> float:
        return self.delta_s_t

    @property
    def margin_holevo(self) -> float:
        return self.delta_s_t - self.p_drop * self.holevo_hd

    @property
    def margin_info(self) -> float:
        return self.delta_s_t - self.p_drop * self.acc_info

    @property
    def matter_residual(self) -> float:
        """Closed-form vs. full-matrix exterior matter entropy."""
        return abs(self.s_m_prime - self.s_m_prime_joint)

    @property
    def saturation_residual(self) -> float:
        """Deviation from ``dS_T = p_D H + slack/T``, which holds identically."""
        return abs(self.delta_s_t - self.p_drop * self.holevo_hd - self.slack / self.t_bh)


def dropped_ensemble(outcome: DropOutcome):
    return ensemble_from_branches(outcome.probs, outcome.states, outcome.drop_set, outcome.null)


def ledger(state: HartleHawkingState, kraus: KrausSet, plan: DropPlan, bh: BlackHoleParams,
           slack: float = 0.0, optimizer: Optional[OptimizerSettings] = OptimizerSettings(),
           outcome: Optional[DropOutcome] = None) -> ExperimentLedger:
    """Assemble the entropy and energy ledger of one experiment.

    ``slack`` is the dissipated work ``dW - dF >= 0``; zero means quasi-static.
    With ``optimizer=None`` the accessible-information search is skipped and
    ``acc_info`` is NaN.
    """
    if slack < 0:
        raise ValueError(f"slack must be nonnegative, got {slack}")
    if outcome is None:
        outcome = drop_state(state, kraus, plan, mass=bh.mass)
    fe = free_energy_change(outcome, state, bh)
    delta_w = fe.delta_f + slack
    delta_s_bh = delta_w / bh.t_bh
    s_m_prime = matter_entropy_closed_form(outcome)
    joint_entropy = von_neumann(outcome.joint)
    ens = dropped_ensemble(outcome)
    if ens is None:
        h_d, acc = 0.0, 0.0
    else:
        h_d = holevo(ens)
        acc = optimize_accessible_info(ens, optimizer).best if optimizer is not None else math.nan
    return ExperimentLedger(
        delta_w=delta_w, delta_f=fe.delta_f, delta_s_bh=delta_s_bh, s_m=fe.s_m, s_m_prime=s_m_prime,
        delta_s_t=delta_s_bh + s_m_prime - fe.s_m, holevo_hd=h_d, acc_info=acc, p_drop=outcome.p_drop,
        energy_residual=fe.energy_residual, slack=float(slack), t_bh=bh.t_bh, s_m_prime_joint=joint_entropy)


@dataclass(frozen=True)
class WorkIntegralSpec:
    """Hamiltonian path for the quasi-static work integral.

    ``path`` holds two or more Hermitian knots at equally spaced ``t`` in
    ``[0, 1]``, joined linearly. ``steps`` is the number of trapezoid
    intervals per segment.
    """

    path: Sequence
    beta: float
    steps: int = 10_000

    def __post_init__(self):
        path = tuple(np.asarray(h, dtype=complex) for h in self.path)
        if len(path) < 2:
            raise ValueError("a path needs at least two Hamiltonians")
        shape = path[0].shape
        for i, h in enumerate(path):
            if not np.all(np.isfinite(h)):
                raise ValueError(f"path entry {i} has non-finite entries")
            if h.shape != shape or not is_hermitian(h, ATOL):
                raise ValueError(f"path entry {i} is not a Hermitian matrix of shape {shape}")
        if not self.beta > 0:
            raise ValueError("beta must be positive")
        if int(self.steps) != self.steps or self.steps < 2:
            raise ValueError("steps must be an integer >= 2")
        object.__setattr__(self, "path", path)


@dataclass(frozen=True)
class WorkIntegral:
    work: float
    free_energy_delta: float
    rel_error: float


def _log_partition(h: np.ndarray, beta: float) -> float:
    return float(logsumexp(-beta * np.linalg.eigvalsh(h)))


def work_integral(spec: WorkIntegralSpec) -> WorkIntegral:
    """Trapezoid estimate of the thermal work ``int <dH/dt> dt`` against ``dF``."""
    beta = spec.beta
    work = 0.0
    seg = len(spec.path) - 1
    for h0, h1 in zip(spec.path[:-1], spec.path[1:]):
        s = np.linspace(0.0, 1.0, spec.steps + 1)
        with np.errstate(all="ignore"):
            dh = (h1 - h0) * seg  # dH/dt on this segment
            hs = h0[None] + s[:, None, None] * (h1 - h0)[None]
            if not np.all(np.isfinite(dh)) or not np.all(np.isfinite(hs)):
                raise QuadratureError("path overflows along the interpolation")
            w, v = np.linalg.eigh(hs)
            logp = -beta * w - logsumexp(-beta * w, axis=1, keepdims=True)
            # <dH> in each instantaneous eigenbasis, Boltzmann-weighted
            diag = np.real(np.einsum("tij,ik,tkj->tj", v.conj(), dh, v))
            vals = np.sum(np.exp(logp) * diag, axis=1)
        if not np.all(np.isfinite(vals)):
            raise QuadratureError("non-finite integrand in work integral")
        work += float(np.trapezoid(vals, dx=1.0 / (seg * spec.steps)))
    df = -(_log_partition(spec.path[-1], beta) - _log_partition(spec.path[0], beta)) / beta
    return WorkIntegral(work=work, free_energy_delta=df, rel_error=abs(work - df) / max(abs(df), 1e-12))
