"""Truncated Hartle-Hawking state of a single field mode.

Units are geometrized (hbar = c = G = k_B = 1). Only the ratio
``omega / t_bh`` enters the state; ``omega`` is taken as measured at infinity.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import TruncationError
from .linalg import partial_trace

FAITHFUL_TAIL = 1e-12
MIN_RATIO = 1e-12


@dataclass(frozen=True)
class ThermalSpec:
    """Mode frequency, Hawking temperature and number of retained levels.

    ``tail_mode="faithful"`` rejects truncations whose discarded Boltzmann
    tail exceeds ``1e-12``; ``"relaxed"`` accepts them and the tail is kept in
    :attr:`tail_weight`.
    """

    omega: float
    t_bh: float
    n_trunc: int
    tail_mode: str = "faithful"

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        if not self.t_bh > 0:
            raise ValueError(f"t_bh must be positive, got {self.t_bh}")
        if int(self.n_trunc) != self.n_trunc or self.n_trunc < 2:
            raise ValueError(f"n_trunc must be an integer >= 2, got {self.n_trunc}")
        if self.tail_mode not in ("faithful", "relaxed"):
            raise ValueError(f"tail_mode must be 'faithful' or 'relaxed', got {self.tail_mode!r}")
        if self.ratio < MIN_RATIO:
            raise TruncationError(
                f"omega/t_bh = {self.ratio:.3g} < {MIN_RATIO:g}: near-degenerate spectrum not computed")
        if self.tail_mode == "faithful" and self.tail_weight > FAITHFUL_TAIL:
            raise TruncationError(
                f"truncation tail {self.tail_weight:.3g} exceeds {FAITHFUL_TAIL:g} "
                f"(n_trunc={self.n_trunc}, omega/t_bh={self.ratio:.4g}); use tail_mode='relaxed'")

    @property
    def ratio(self) -> float:
        return self.omega / self.t_bh

    @property
    def tail_weight(self) -> float:
        x = self.ratio
        return float(np.exp(-x * self.n_trunc) / -np.expm1(-x))


def gibbs_weights(spec: ThermalSpec) -> tuple[np.ndarray, float]:
    """Boltzmann weights ``c_n`` of the retained levels and the partition sum."""
    boltz = np.exp(-spec.ratio * np.arange(spec.n_trunc))
    z = float(boltz.sum())
    return boltz / z, z


@dataclass(frozen=True)
class HartleHawkingState:
    spec: ThermalSpec
    weights: np.ndarray
    partition_sum: float
    amplitudes: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.spec.n_trunc

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())


def hh_state(spec: ThermalSpec) -> HartleHawkingState:
    """``sum_n sqrt(c_n) |n>_B |n>_A`` as a vector on B (x) A."""
    c, z = gibbs_weights(spec)
    n = spec.n_trunc
    amp = np.zeros(n * n, dtype=complex)
    amp[np.arange(n) * (n + 1)] = np.sqrt(c)
    return HartleHawkingState(spec=spec, weights=c, partition_sum=z, amplitudes=amp)


def reduce_to_A(state: HartleHawkingState) -> np.ndarray:
    """Thermal state seen outside the horizon (trace over B)."""
    return np.diag(state.weights).astype(complex)


def reduce_to_A_by_trace(state: HartleHawkingState) -> np.ndarray:
    n = state.dim
    return partial_trace(state.projector(), [n, n], keep=[1])


def mode_hamiltonian(spec: ThermalSpec) -> np.ndarray:
    return spec.omega * np.diag(np.arange(spec.n_trunc, dtype=float)).astype(complex)


def thermal_entropy(spec: ThermalSpec) -> float:
    """Closed-form entropy of the truncated oscillator, ``x*<n> + log Z``."""
    c, z = gibbs_weights(spec)
    nbar = float(np.dot(np.arange(spec.n_trunc), c))
    return spec.ratio * nbar + float(np.log(z))
