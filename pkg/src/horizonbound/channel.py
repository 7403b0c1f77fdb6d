"""POVMs, their unitary dilations, and the conditional detector-drop protocol.

The detector register is the fastest tensor factor. Detector basis state
``|Phi_alpha>`` is basis index ``alpha``; the ready state ``|Phi_0>`` is index 0.
A dilation ``U`` acts on ``A (x) detector`` and satisfies
``U (|v> (x) |Phi_0>) = sum_alpha (A_alpha |v>) (x) |Phi_alpha>``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import CompletenessError, DilationError, DimensionError
from .linalg import ATOL, entropy_of_spectrum, haar_unitary, hermitian_eigvalsh, partial_trace, unitarity_residual
from .thermal import HartleHawkingState

NULL_PROB = 1e-14
COMPLETION_TOL = 1e-2


@dataclass(frozen=True)
class KrausSet:
    operators: tuple

    @property
    def dim(self) -> int:
        return self.operators[0].shape[0]

    @property
    def n_outcomes(self) -> int:
        return len(self.operators)

    @property
    def labels(self) -> range:
        return range(len(self.operators))

    def completeness_residual(self) -> float:
        s = sum(a.conj().T @ a for a in self.operators)
        return float(np.max(np.abs(s - np.eye(self.dim))))

    def apply(self, rho) -> np.ndarray:
        """Unselective channel ``sum_a A rho A^dagger``."""
        return sum(a @ rho @ a.conj().T for a in self.operators)


def validate_kraus(ops: Sequence, atol: float = ATOL) -> KrausSet:
    ops = tuple(np.array(a, dtype=complex) for a in ops)
    if not ops:
        raise DimensionError("a Kraus set needs at least one operator")
    d = ops[0].shape[0]
    for i, a in enumerate(ops):
        if a.ndim != 2 or a.shape != (d, d):
            raise DimensionError(f"Kraus operator {i} has shape {a.shape}, expected {(d, d)}")
    k = KrausSet(ops)
    res = k.completeness_residual()
    if res > atol:
        raise CompletenessError(res)
    return k


def random_kraus(d: int, n_outcomes: int, rng: np.random.Generator) -> KrausSet:
    """Kraus operators read off the ready-state columns of a Haar unitary on ``d*K``."""
    if d < 1 or n_outcomes < 1:
        raise ValueError("d and n_outcomes must be positive")
    u = haar_unitary(d * n_outcomes, rng)
    cols = u[:, ::n_outcomes]  # columns (i, Phi_0)
    ops = tuple(np.ascontiguousarray(cols[a::n_outcomes, :]) for a in range(n_outcomes))
    return KrausSet(ops)


def diagonal_kraus(d: int, n_outcomes: int, rng: np.random.Generator,
                   projective: bool = False) -> KrausSet:
    """Kraus set diagonal in the level basis, so it commutes with the mode Hamiltonian.

    With ``projective=True`` every level is assigned to exactly one outcome
    (each outcome gets at least one level, which needs ``n_outcomes <= d``).
    """
    if projective:
        if n_outcomes > d:
            raise ValueError("a projective diagonal set needs n_outcomes <= d")
        assign = np.concatenate([np.arange(n_outcomes), rng.integers(0, n_outcomes, d - n_outcomes)])
        assign = rng.permutation(assign)
        w = np.zeros((n_outcomes, d))
        w[assign, np.arange(d)] = 1.0
    else:
        w = rng.random((n_outcomes, d)) + 1e-3
        w /= w.sum(axis=0)
    phases = np.exp(2j * np.pi * rng.random((n_outcomes, d)))
    return KrausSet(tuple(np.diag(np.sqrt(w[a]) * phases[a]) for a in range(n_outcomes)))


@dataclass(frozen=True)
class MeasurementOutcome:
    """Outcome probabilities, post-measurement states and their average.

    ``states[a]`` is a zero matrix when ``null[a]`` is set (probability at most
    ``1e-14``); such branches are skipped in entropy sums.
    """

    probs: np.ndarray
    states: tuple
    null: np.ndarray
    average: np.ndarray


def _branches(blocks) -> tuple[np.ndarray, tuple, np.ndarray]:
    """Normalize unnormalized branch operators ``A rho A^dagger``."""
    probs = np.array([max(np.trace(x).real, 0.0) for x in blocks])
    null = probs <= NULL_PROB
    states = tuple(np.zeros_like(x) if z else x / p for x, p, z in zip(blocks, probs, null))
    return probs, states, null


def apply_povm(rho, k: KrausSet) -> MeasurementOutcome:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (k.dim, k.dim):
        raise DimensionError(f"state dimension {rho.shape} does not match Kraus dimension {k.dim}")
    blocks = [a @ rho @ a.conj().T for a in k.operators]
    probs, states, null = _branches(blocks)
    return MeasurementOutcome(probs=probs, states=states, null=null, average=sum(blocks))


@dataclass(frozen=True)
class Dilation:
    unitary: np.ndarray
    detector_dim: int
    ready_index: int = 0

    @property
    def system_dim(self) -> int:
        return self.unitary.shape[0] // self.detector_dim

    def block(self, alpha: int, beta: Optional[int] = None) -> np.ndarray:
        """``<Phi_alpha| U |Phi_beta>`` as a system operator (``beta`` defaults to ready)."""
        beta = self.ready_index if beta is None else beta
        k = self.detector_dim
        return self.unitary[alpha::k, beta::k]

    def extraction_error(self, kraus: KrausSet) -> float:
        return max(float(np.max(np.abs(self.block(a) - op))) for a, op in enumerate(kraus.operators))


def dilate(k: KrausSet) -> Dilation:
    """Complete the stacked Kraus columns to a unitary on ``A (x) detector``.

    The ``d`` columns ``(i, Phi_0)`` are the stacked Kraus operators. The other
    columns come from canonical basis vectors taken in index order, each
    orthogonalized twice against the basis built so far and accepted only if its
    residual norm is at least ``1e-2``. That threshold cannot starve the
    completion for ``d*K < 10^4``: the rejected candidates' residuals would have
    to carry the whole missing subspace with squared norm below ``d*K * 1e-4``.
    """
    d, kk = k.dim, k.n_outcomes
    n = d * kk
    fixed = np.zeros((n, d), dtype=complex)
    for a, op in enumerate(k.operators):
        fixed[a::kk, :] = op
    gram_err = np.abs(fixed.conj().T @ fixed - np.eye(d))
    if np.max(gram_err) > 1e-8:
        bad = int(np.argmax(np.max(gram_err, axis=0)))
        raise DilationError(bad * kk, "fixed Kraus columns are not orthonormal")

    basis = [fixed[:, i] for i in range(d)]
    extra = []
    for j in range(n):
        if len(basis) == n:
            break
        v = np.zeros(n, dtype=complex)
        v[j] = 1.0
        q = np.array(basis).T
        for _ in range(2):
            v = v - q @ (q.conj().T @ v)
        nv = np.linalg.norm(v)
        if nv >= COMPLETION_TOL:
            v = v / nv
            basis.append(v)
            extra.append(v)
    free = [c for c in range(n) if c % kk != 0]
    if len(basis) < n:
        raise DilationError(free[len(extra)])

    u = np.zeros((n, n), dtype=complex)
    u[:, ::kk] = fixed
    for c, v in zip(free, extra):
        u[:, c] = v
    return Dilation(unitary=u, detector_dim=kk)


def _branch_vectors(state: HartleHawkingState, k: KrausSet, inside=None) -> list[np.ndarray]:
    """Unnormalized branch kets on B (x) A, one per outcome.

    ``(V_alpha (x) A_alpha) |psi_HH>``; ``inside`` maps labels to B-unitaries.
    """
    n = state.dim
    if k.dim != n:
        raise DimensionError(f"Kraus dimension {k.dim} does not match truncation {n}")
    psi = state.amplitudes.reshape(n, n)  # psi[b, a]
    out = []
    for alpha, op in enumerate(k.operators):
        m = psi @ op.T  # (1_B (x) A) psi
        if inside is not None and alpha in inside:
            m = inside[alpha] @ m
        out.append(m.reshape(-1))
    return out


def joint_post_state(state: HartleHawkingState, k: KrausSet, dilation: Optional[Dilation] = None):
    """Decohered post-measurement state.

    Returns ``(full, reduced)``: the detector-diagonal state on
    ``B (x) A (x) detector`` obtained from ``(1_B (x) U)|psi_HH>|Phi_0>``, and its
    trace over B, ``sum_a p_a rho'_a (x) |Phi_a><Phi_a|``.
    """
    n = state.dim
    if k.dim != n:
        raise DimensionError(f"Kraus dimension {k.dim} does not match truncation {n}")
    dil = dilation if dilation is not None else dilate(k)
    kk = k.n_outcomes
    ready = np.zeros(kk, dtype=complex)
    ready[dil.ready_index] = 1.0
    psi = np.kron(state.amplitudes, ready)
    psi = np.kron(np.eye(n), dil.unitary) @ psi
    full = np.outer(psi, psi.conj()).reshape(n * n, kk, n * n, kk)
    full = full * np.eye(kk)[None, :, None, :]  # drop detector coherences
    full = full.reshape(n * n * kk, n * n * kk)
    reduced = partial_trace(full, [n, n, kk], keep=[1, 2])
    return full, reduced


@dataclass(frozen=True)
class DropPlan:
    drop_set: frozenset = frozenset()
    inside_unitaries: Optional[dict] = None
    detector_radius: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "drop_set", frozenset(int(a) for a in self.drop_set))
        if self.inside_unitaries is not None:
            object.__setattr__(self, "inside_unitaries",
                               {int(a): np.asarray(v, dtype=complex) for a, v in self.inside_unitaries.items()})

    def check(self, k: KrausSet, mass: Optional[float] = None) -> None:
        bad = sorted(a for a in self.drop_set if a < 0 or a >= k.n_outcomes)
        if bad:
            raise ValueError(f"drop set references unknown outcome labels {bad}")
        if self.inside_unitaries:
            for a, v in self.inside_unitaries.items():
                if a not in self.drop_set:
                    raise ValueError(f"inside unitary given for outcome {a} which is not dropped")
                if v.shape != (k.dim, k.dim):
                    raise DimensionError(f"inside unitary {a} has shape {v.shape}, expected {(k.dim, k.dim)}")
                res = unitarity_residual(v)
                if res > ATOL:
                    raise ValueError(f"inside unitary {a} is not unitary (residual {res:.3g})")
        if mass is not None and self.detector_radius is not None and not self.detector_radius > 2 * mass:
            raise ValueError("radius inside horizon")


@dataclass(frozen=True)
class DropOutcome:
    """Exterior state after the conditional drop.

    ``joint`` lives on ``A (x) detector``. ``detector_state`` is ``None`` when
    nothing can be dropped (``p_drop == 0``).
    """

    joint: np.ndarray
    p_drop: float
    normalized_probs: dict
    detector_state: Optional[np.ndarray]
    kept_branches: tuple
    drop_set: frozenset
    probs: np.ndarray
    states: tuple
    null: np.ndarray
    branch_blocks: tuple = field(repr=False, default=())


def drop_state(state: HartleHawkingState, k: KrausSet, plan: DropPlan,
               mass: Optional[float] = None) -> DropOutcome:
    plan.check(k, mass)
    n, kk = state.dim, k.n_outcomes
    branches = _branch_vectors(state, k, plan.inside_unitaries)
    # sigma' on B (x) A (x) detector; branch alpha sits on |Phi_alpha><Phi_alpha|
    sigma = np.zeros((n * n * kk, n * n * kk), dtype=complex)
    for alpha, v in enumerate(branches):
        e = np.zeros(kk)
        e[alpha] = 1.0
        w = np.kron(v, e)
        sigma += np.outer(w, w.conj())
    traced = partial_trace(sigma, [n, n, kk], keep=[1, 2]).reshape(n, kk, n, kk)
    blocks = tuple(np.ascontiguousarray(traced[:, a, :, a]) for a in range(kk))
    probs, states, null = _branches(blocks)

    dropped = sorted(plan.drop_set)
    p_drop = float(sum(probs[a] for a in dropped))
    joint = np.zeros((n * kk, n * kk), dtype=complex)
    for a in range(kk):
        if a not in plan.drop_set:
            joint += np.kron(blocks[a], _proj(kk, a))
    rho_d = None
    phat = {}
    if p_drop > 0:
        phat = {a: probs[a] / p_drop for a in dropped}
        rho_d = sum(phat[a] * _proj(kk, a) for a in dropped)
        joint += np.kron(sum(blocks[a] for a in dropped), rho_d)
    kept = tuple((float(probs[a]), states[a]) for a in range(kk) if a not in plan.drop_set)
    return DropOutcome(joint=joint, p_drop=p_drop, normalized_probs=phat, detector_state=rho_d,
                       kept_branches=kept, drop_set=plan.drop_set, probs=probs, states=states,
                       null=null, branch_blocks=blocks)


def _proj(k: int, a: int) -> np.ndarray:
    p = np.zeros((k, k), dtype=complex)
    p[a, a] = 1.0
    return p


def unnormalized_entropy(x) -> float:
    """``-Tr(X log X)`` for a positive operator of any trace."""
    return entropy_of_spectrum(hermitian_eigvalsh(x, nonnegative=True))


def matter_entropy_closed_form(outcome: DropOutcome) -> float:
    """Exterior matter entropy after the drop, assembled branch by branch."""
    s = 0.0
    dropped = [a for a in sorted(outcome.drop_set) if not outcome.null[a]]
    if outcome.p_drop > 0 and dropped:
        phat = np.array([outcome.normalized_probs[a] for a in dropped])
        s -= outcome.p_drop * float(np.sum(phat * np.log(phat)))
        mix = outcome.p_drop * sum(ph * outcome.states[a] for ph, a in zip(phat, dropped))
        s += unnormalized_entropy(mix)
    for a, (p, rho) in enumerate(zip(outcome.probs, outcome.states)):
        if a in outcome.drop_set or outcome.null[a]:
            continue
        s += p * unnormalized_entropy(rho) - p * np.log(p)
    return float(s)
