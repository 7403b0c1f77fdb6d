"""Entropies, the Holevo quantity and accessible information (all in nats)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import minimize
from scipy.special import entr

from .errors import DimensionError
from .linalg import ATOL, entropy_of_spectrum, haar_unitary, hermitian_eigvalsh, validate_density

SUPPORT_TOL = 1e-12


def von_neumann(rho) -> float:
    rho = validate_density(rho)
    return entropy_of_spectrum(hermitian_eigvalsh(rho, nonnegative=True))


def shannon(p) -> float:
    p = np.asarray(p, dtype=float)
    if np.any(p < -ATOL) or abs(p.sum() - 1.0) > ATOL:
        raise ValueError(f"not a probability vector (sum {p.sum():.12g}, min {p.min():.3g})")
    return float(np.sum(entr(np.clip(p, 0.0, None))))


def relative_entropy(rho, sigma) -> float:
    """``Tr rho (log rho - log sigma)``; ``math.inf`` if supp(rho) is not inside supp(sigma)."""
    rho = validate_density(rho)
    sigma = validate_density(sigma)
    ws, vs = np.linalg.eigh(sigma)
    on = ws > SUPPORT_TOL
    # rho-weight on the kernel of sigma
    kernel = vs[:, ~on]
    leak = float(np.real(np.trace(kernel.conj().T @ rho @ kernel))) if kernel.size else 0.0
    if leak > SUPPORT_TOL:
        return math.inf
    log_sigma = (vs[:, on] * np.log(ws[on])) @ vs[:, on].conj().T
    cross = float(np.real(np.trace(rho @ log_sigma)))
    return -von_neumann(rho) - cross


@dataclass(frozen=True)
class Ensemble:
    weights: np.ndarray
    states: tuple

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        states = tuple(np.asarray(s, dtype=complex) for s in self.states)
        if len(w) != len(states) or not states:
            raise ValueError("ensemble needs one weight per state and at least one state")
        if np.any(w < -ATOL) or abs(w.sum() - 1.0) > ATOL:
            raise ValueError(f"ensemble weights must be a probability vector (sum {w.sum():.12g})")
        d = states[0].shape
        if any(s.shape != d for s in states):
            raise DimensionError("ensemble states must share one dimension")
        object.__setattr__(self, "weights", np.clip(w, 0.0, None))
        object.__setattr__(self, "states", states)

    @property
    def dim(self) -> int:
        return self.states[0].shape[0]

    def average(self) -> np.ndarray:
        return sum(p * s for p, s in zip(self.weights, self.states))

    def map(self, channel) -> "Ensemble":
        """Push every member through ``channel`` (any callable on matrices)."""
        return Ensemble(self.weights, tuple(channel(s) for s in self.states))


def holevo(e: Ensemble) -> float:
    return von_neumann(e.average()) - sum(p * von_neumann(s) for p, s in zip(e.weights, e.states) if p > 0)


def holevo_relative_form(e: Ensemble) -> float:
    """Same quantity as :func:`holevo`, as the weighted divergence from the average."""
    avg = e.average()
    return sum(p * relative_entropy(s, avg) for p, s in zip(e.weights, e.states) if p > 0)


@dataclass(frozen=True)
class ProjectiveMeasurement:
    projectors: tuple

    def __post_init__(self):
        ps = tuple(np.asarray(p, dtype=complex) for p in self.projectors)
        if not ps:
            raise ValueError("measurement needs at least one projector")
        d = ps[0].shape[0]
        for i, p in enumerate(ps):
            if p.shape != (d, d):
                raise DimensionError(f"projector {i} has shape {p.shape}")
            if np.max(np.abs(p - p.conj().T)) > ATOL:
                raise ValueError(f"projector {i} is not Hermitian")
            if np.max(np.abs(p @ p - p)) > ATOL:
                raise ValueError(f"projector {i} is not idempotent")
        for i in range(len(ps)):
            for j in range(i + 1, len(ps)):
                if np.max(np.abs(ps[i] @ ps[j])) > ATOL:
                    raise ValueError(f"projectors {i} and {j} are not orthogonal")
        if np.max(np.abs(sum(ps) - np.eye(d))) > ATOL:
            raise ValueError("projectors do not sum to the identity")
        object.__setattr__(self, "projectors", ps)

    @classmethod
    def from_basis(cls, u) -> "ProjectiveMeasurement":
        """Rank-1 measurement onto the columns of the unitary ``u``."""
        u = np.asarray(u, dtype=complex)
        return cls(tuple(np.outer(u[:, j], u[:, j].conj()) for j in range(u.shape[1])))


def _mutual_info_from_conditionals(weights: np.ndarray, cond: np.ndarray) -> float:
    # cond[a, j] = p(j|a); I = H(J) - sum_a p_a H(J|a)
    cond = np.clip(cond, 0.0, None)
    pj = weights @ cond
    return float(np.sum(entr(pj)) - weights @ np.sum(entr(cond), axis=1))


def mutual_info(e: Ensemble, m: ProjectiveMeasurement) -> float:
    if m.projectors[0].shape[0] != e.dim:
        raise DimensionError("measurement and ensemble dimensions differ")
    cond = np.array([[np.real(np.trace(p @ s)) for p in m.projectors] for s in e.states])
    return _mutual_info_from_conditionals(e.weights, cond)


def _basis_mutual_info(e_weights, e_states, u) -> float:
    # p(j|a) = <u_j| rho_a |u_j>
    cond = np.real(np.einsum("ij,aik,kj->aj", u.conj(), e_states, u))
    return _mutual_info_from_conditionals(e_weights, cond)


def common_eigenbasis(e: Ensemble, seed: int = 0) -> np.ndarray:
    """Eigenbasis of a generic real combination of the ensemble states.

    For mutually commuting states this is a joint eigenbasis, i.e. the
    measurement that attains the Holevo quantity.
    """
    coeffs = np.random.default_rng(seed).random(len(e.states)) + 0.5
    combo = sum(c * s for c, s in zip(coeffs, e.states))
    _, v = np.linalg.eigh(0.5 * (combo + combo.conj().T))
    return v


def common_eigenbasis_measurement(e: Ensemble) -> ProjectiveMeasurement:
    return ProjectiveMeasurement.from_basis(common_eigenbasis(e))


@dataclass(frozen=True)
class OptimizerSettings:
    restarts: int = 20
    max_iters: int = 500
    step_tol: float = 1e-8
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1 or self.max_iters < 1 or not self.step_tol > 0:
            raise ValueError("optimizer settings must be positive")


@dataclass(frozen=True)
class AccessibleInfo:
    best: float
    measurement: ProjectiveMeasurement
    iterations: int


def _hermitian_from_params(theta: np.ndarray, d: int) -> np.ndarray:
    h = np.zeros((d, d), dtype=complex)
    h[np.diag_indices(d)] = theta[:d]
    iu = np.triu_indices(d, 1)
    m = len(iu[0])
    h[iu] = theta[d:d + m] + 1j * theta[d + m:]
    return h + np.triu(h, 1).conj().T


def _exp_i(h: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(h)
    return (v * np.exp(1j * w)) @ v.conj().T


def optimize_accessible_info(e: Ensemble, s: OptimizerSettings = OptimizerSettings(),
                             initial_step: float = 0.25) -> AccessibleInfo:
    """Maximize mutual information over rank-1 projective measurements.

    The basis is ``U0 @ exp(iH(theta))`` with ``H`` Hermitian built from ``d**2``
    real parameters, refined by Nelder-Mead. Restart 0 starts from
    :func:`common_eigenbasis`; restart ``r > 0`` from a Haar-random ``U0`` drawn
    with seed ``(s.seed, r)``, so results do not depend on execution order.
    """
    d = e.dim
    weights = e.weights
    states = np.array(e.states)
    best_val, best_u, iters = -np.inf, np.eye(d, dtype=complex), 0
    n_par = d * d
    for r in range(s.restarts):
        if r == 0:
            u0 = common_eigenbasis(e, seed=s.seed)
        else:
            u0 = haar_unitary(d, np.random.default_rng([s.seed, r]))

        def objective(theta, u0=u0):
            return -_basis_mutual_info(weights, states, u0 @ _exp_i(_hermitian_from_params(theta, d)))

        start_val = -objective(np.zeros(n_par))
        if start_val > best_val:
            best_val, best_u = start_val, u0
        if d == 1:
            continue
        simplex = np.vstack([np.zeros(n_par), initial_step * np.eye(n_par)])
        res = minimize(objective, np.zeros(n_par), method="Nelder-Mead",
                       options={"maxiter": s.max_iters, "xatol": s.step_tol, "fatol": s.step_tol,
                                "initial_simplex": simplex})
        iters += int(res.nit)
        if -res.fun > best_val:
            best_val = -float(res.fun)
            best_u = u0 @ _exp_i(_hermitian_from_params(res.x, d))
    return AccessibleInfo(best=float(best_val), measurement=ProjectiveMeasurement.from_basis(best_u),
                          iterations=iters)


def _bloch(rho: np.ndarray) -> np.ndarray:
    return np.array([2 * rho[0, 1].real, -2 * rho[0, 1].imag, (rho[0, 0] - rho[1, 1]).real])


def _qubit_grid_info(weights, bloch, theta, phi) -> np.ndarray:
    th, ph = np.meshgrid(theta, phi, indexing="ij")
    n = np.stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)], axis=-1)
    plus = 0.5 * (1 + n @ bloch.T)  # (..., K): p(+|a)
    cond = np.stack([plus, 1 - plus], axis=-1)
    cond = np.clip(cond, 0.0, 1.0)
    pj = np.einsum("a,...aj->...j", weights, cond)
    return np.sum(entr(pj), axis=-1) - np.einsum("a,...a->...", weights, np.sum(entr(cond), axis=-1))


def qubit_oracle_accessible_info(e: Ensemble, n_theta: int = 400, n_phi: int = 800) -> float:
    """Brute-force accessible information of a qubit ensemble.

    Scans measurement axes on a ``n_theta x n_phi`` Bloch-angle grid, then
    rescans the neighbouring cells of the best point at 10x finer spacing.
    """
    if e.dim != 2:
        raise DimensionError(f"qubit oracle needs d = 2, got {e.dim}")
    bloch = np.array([_bloch(s) for s in e.states])
    theta = np.linspace(0.0, np.pi, n_theta)
    phi = np.arange(n_phi) * (2 * np.pi / n_phi)
    grid = _qubit_grid_info(e.weights, bloch, theta, phi)
    i, j = np.unravel_index(np.argmax(grid), grid.shape)
    dt, dp = theta[1] - theta[0], phi[1] - phi[0]
    fine_t = theta[i] + np.linspace(-dt, dt, 21)
    fine_p = phi[j] + np.linspace(-dp, dp, 21)
    fine = _qubit_grid_info(e.weights, bloch, np.clip(fine_t, 0.0, np.pi), fine_p)
    return float(max(grid.max(), fine.max()))


def ensemble_from_branches(probs: Sequence[float], states: Sequence, labels, null=None) -> Ensemble | None:
    """Normalized sub-ensemble over ``labels``; ``None`` if they carry no weight.

    Branches flagged in ``null`` are left out.
    """
    labels = [a for a in sorted(labels) if probs[a] > 0 and (null is None or not null[a])]
    total = float(sum(probs[a] for a in labels))
    if total <= 0:
        return None
    return Ensemble(np.array([probs[a] / total for a in labels]), tuple(states[a] for a in labels))
