"""Named property suites run by ``horizonbound verify``.

Each suite returns a list of :class:`Check` records carrying the measured
worst case next to its threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .channel import DropPlan, dilate, diagonal_kraus, drop_state, matter_entropy_closed_form, random_kraus
from .info import (
    Ensemble,
    OptimizerSettings,
    ProjectiveMeasurement,
    common_eigenbasis_measurement,
    holevo,
    mutual_info,
    optimize_accessible_info,
    qubit_oracle_accessible_info,
    shannon,
    von_neumann,
)
from .ledger import BlackHoleParams, WorkIntegralSpec, dropped_ensemble, ledger, work_integral
from .linalg import haar_unitary, unitarity_residual
from .thermal import ThermalSpec, hh_state

MARGIN_TOL = 1e-9
WASHOUT_TOL = 1e-12
DILATION_TOL = 1e-12
SATURATION_TOL = 1e-9
WORK_TOL = 1e-6
CLOSED_FORM_DF = math.log1p(math.exp(-1.0)) - math.log1p(math.exp(-2.0))


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    measured: float
    threshold: str
    detail: str = ""

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        extra = f"  ({self.detail})" if self.detail else ""
        return f"[{tag}] {self.name}: measured {self.measured:.3e}, required {self.threshold}{extra}"


def _le(name, value, bound, detail=""):
    return Check(name, bool(value <= bound), float(value), f"<= {bound:g}", detail)


def _ge(name, value, bound, detail=""):
    return Check(name, bool(value >= bound), float(value), f">= {bound:g}", detail)


@dataclass(frozen=True)
class Instance:
    state: object
    kraus: object
    plan: DropPlan
    bh: BlackHoleParams


def random_instance(seed: int, dim_max: int = 6, kraus_max: int = 4, drop: str = "random",
                    diagonal: bool = False) -> Instance:
    """Random thermal state, Kraus set and drop set.

    ``drop`` is ``"empty"``, ``"nonempty"``, ``"all"`` or ``"random"``. With
    ``diagonal=True`` the Kraus set is a projective measurement in the level
    basis.
    """
    rng = np.random.default_rng(seed)
    mass = rng.uniform(0.5, 2.0)
    bh = BlackHoleParams(mass)
    d = int(rng.integers(2, dim_max + 1))
    ratio = rng.uniform(0.3, 3.0)
    spec = ThermalSpec(ratio * bh.t_bh, bh.t_bh, d, tail_mode="relaxed")
    if diagonal:
        k = int(rng.integers(2, min(kraus_max, d) + 1))
        kraus = diagonal_kraus(d, k, rng, projective=True)
    else:
        k = int(rng.integers(1, kraus_max + 1))
        kraus = random_kraus(d, k, rng)
    if drop == "empty":
        ds = set()
    elif drop == "all":
        ds = set(range(k))
    else:
        mask = rng.random(k) < 0.5
        if drop == "nonempty" and not mask.any():
            mask[rng.integers(k)] = True
        ds = set(int(a) for a in np.flatnonzero(mask))
    return Instance(hh_state(spec), kraus, DropPlan(frozenset(ds)), bh)


def random_projective(d: int, rng: np.random.Generator) -> ProjectiveMeasurement:
    """Haar-random basis grouped into a random number of projectors of mixed rank."""
    u = haar_unitary(d, rng)
    groups = rng.integers(0, rng.integers(1, d + 1), size=d)
    projs = []
    for g in np.unique(groups):
        cols = u[:, groups == g]
        projs.append(cols @ cols.conj().T)
    return ProjectiveMeasurement(tuple(projs))


def random_channel(d: int, rng: np.random.Generator):
    k = random_kraus(d, int(rng.integers(1, 4)), rng)
    return k.apply


# -- suites ------------------------------------------------------------------

def suite_gsl(n: int = 500, seed: int = 1000) -> list[Check]:
    worst = math.inf
    for i in range(n):
        inst = random_instance(seed + i, drop="empty")
        slack = 0.0 if i % 2 == 0 else 0.1 * inst.bh.t_bh
        led = ledger(inst.state, inst.kraus, inst.plan, inst.bh, slack, optimizer=None)
        worst = min(worst, led.delta_s_t)
    return [_ge("gsl: min dS_T with nothing dropped", worst, -MARGIN_TOL, f"{n} instances")]


def suite_holevo(n: int = 500, measurements: int = 100, seed: int = 2000,
                 optimizer: OptimizerSettings = OptimizerSettings(restarts=3, max_iters=200)) -> list[Check]:
    worst_h, worst_i, worst_gap, worst_opt = math.inf, math.inf, -math.inf, -math.inf
    for i in range(n):
        inst = random_instance(seed + i, drop="nonempty")
        led = ledger(inst.state, inst.kraus, inst.plan, inst.bh, 0.0,
                     optimizer=OptimizerSettings(optimizer.restarts, optimizer.max_iters,
                                                 optimizer.step_tol, seed + i))
        worst_h = min(worst_h, led.margin_holevo)
        worst_i = min(worst_i, led.margin_info)
        worst_opt = max(worst_opt, led.acc_info - led.holevo_hd)
        ens = dropped_ensemble(drop_state(inst.state, inst.kraus, inst.plan))
        if ens is None:
            continue
        rng = np.random.default_rng([seed, i])
        for _ in range(measurements):
            info = mutual_info(ens, random_projective(ens.dim, rng))
            worst_i = min(worst_i, led.delta_s_t - led.p_drop * info)
            worst_gap = max(worst_gap, info - led.holevo_hd)
    return [
        _ge("holevo: min dS_T - p_D H_D", worst_h, -MARGIN_TOL, f"{n} instances"),
        _ge("holevo: min dS_T - p_D I_D(E)", worst_i, -MARGIN_TOL, f"{measurements} measurements each"),
        _le("holevo: max I_D(E) - H_D", worst_gap, MARGIN_TOL),
        _le("holevo: max optimizer - H_D", worst_opt, MARGIN_TOL),
    ]


def suite_washout(n: int = 100, seed: int = 3000) -> list[Check]:
    worst = 0.0
    for i in range(n):
        inst = random_instance(seed + i, drop="nonempty")
        rng = np.random.default_rng([seed, i])
        inside = {a: haar_unitary(inst.kraus.dim, rng) for a in inst.plan.drop_set}
        with_v = drop_state(inst.state, inst.kraus, DropPlan(inst.plan.drop_set, inside))
        without = drop_state(inst.state, inst.kraus, inst.plan)
        worst = max(worst, float(np.max(np.abs(with_v.joint - without.joint))))
    return [_le("washout: max |sigma'(V) - sigma'(1)|", worst, WASHOUT_TOL, f"{n} instances")]


def suite_matter_identity(n: int = 500, seed: int = 4000) -> list[Check]:
    worst = 0.0
    for i in range(n):
        inst = random_instance(seed + i, drop="random")
        out = drop_state(inst.state, inst.kraus, inst.plan)
        worst = max(worst, abs(matter_entropy_closed_form(out) - von_neumann(out.joint)))
    return [_le("matter identity: max |S(joint) - closed form|", worst, SATURATION_TOL, f"{n} instances")]


def suite_dilation(n: int = 100, seed: int = 5000) -> list[Check]:
    ext, uni = 0.0, 0.0
    for i in range(n):
        rng = np.random.default_rng(seed + i)
        k = random_kraus(int(rng.integers(1, 7)), int(rng.integers(1, 5)), rng)
        dil = dilate(k)
        ext = max(ext, dil.extraction_error(k))
        uni = max(uni, unitarity_residual(dil.unitary))
    return [_le("dilation: max extraction error", ext, DILATION_TOL, f"{n} Kraus sets"),
            _le("dilation: max unitarity residual", uni, DILATION_TOL)]


def noncommuting_witness() -> Ensemble:
    """Equal mixture of |0> and |+>."""
    plus = np.full((2, 2), 0.5, dtype=complex)
    return Ensemble(np.array([0.5, 0.5]), (np.diag([1.0, 0.0]).astype(complex), plus))


def suite_saturation(n: int = 100, seed: int = 6000, oracle_instances: int = 50) -> list[Check]:
    quasi = 0.0
    for i in range(n):
        inst = random_instance(seed + i, drop="random")
        led = ledger(inst.state, inst.kraus, inst.plan, inst.bh, 0.0, optimizer=None)
        quasi = max(quasi, abs(led.delta_s_t - led.p_drop * led.holevo_hd))
    checks = [_le("saturation: max |dS_T - p_D H_D| at zero slack", quasi, SATURATION_TOL, f"{n} instances")]
    checks += double_saturation(n, seed + 10_000)
    witness = noncommuting_witness()
    gap = holevo(witness) - qubit_oracle_accessible_info(witness)
    checks.append(_ge("saturation: non-commuting witness gap H - I_acc", gap, 1e-3))
    checks.append(qubit_optimizer_vs_oracle(oracle_instances, seed + 20_000))
    return checks


def double_saturation(n: int = 100, seed: int = 7000,
                      optimizer: OptimizerSettings = OptimizerSettings(restarts=3, max_iters=200)) -> list[Check]:
    """Projective level-basis Kraus sets with every outcome dropped."""
    opt_err, eig_err, sh_err = 0.0, 0.0, 0.0
    for i in range(n):
        inst = random_instance(seed + i, drop="all", diagonal=True)
        led = ledger(inst.state, inst.kraus, inst.plan, inst.bh, 0.0, optimizer=optimizer)
        ens = dropped_ensemble(drop_state(inst.state, inst.kraus, inst.plan))
        h = led.holevo_hd
        sh_err = max(sh_err, abs(h - shannon(ens.weights)), abs(led.delta_s_t - h))
        opt_err = max(opt_err, abs(led.acc_info - h))
        eig_err = max(eig_err, abs(mutual_info(ens, common_eigenbasis_measurement(ens)) - h))
    return [
        _le("saturation: max |H_D - shannon(p)|, |dS_T - H_D|", sh_err, 1e-6, f"{n} diagonal instances"),
        _le("saturation: max |optimizer - H_D| (commuting)", opt_err, 1e-4),
        _le("saturation: max |I(eigenbasis) - H_D| (commuting)", eig_err, 1e-6),
    ]


def random_qubit_ensemble(rng: np.random.Generator) -> Ensemble:
    k = int(rng.integers(2, 5))
    w = rng.dirichlet(np.ones(k))
    states = []
    for _ in range(k):
        g = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        if rng.random() < 0.5:
            g = g[:, :1]  # pure state
        rho = g @ g.conj().T
        states.append(rho / np.trace(rho).real)
    return Ensemble(w, tuple(states))


def qubit_optimizer_vs_oracle(n: int = 50, seed: int = 8000) -> Check:
    worst = math.inf
    for i in range(n):
        ens = random_qubit_ensemble(np.random.default_rng(seed + i))
        best = optimize_accessible_info(ens, OptimizerSettings(seed=seed + i)).best
        worst = min(worst, best - qubit_oracle_accessible_info(ens))
    return _ge("saturation: min optimizer - qubit grid oracle", worst, -1e-3, f"{n} ensembles")


def suite_dataproc(n: int = 200, seed: int = 9000) -> list[Check]:
    worst = -math.inf
    for i in range(n):
        rng = np.random.default_rng(seed + i)
        d = int(rng.integers(2, 7))
        k = int(rng.integers(2, 5))
        states = []
        for _ in range(k):
            g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
            rho = g @ g.conj().T
            states.append(rho / np.trace(rho).real)
        ens = Ensemble(rng.dirichlet(np.ones(k)), tuple(states))
        worst = max(worst, holevo(ens.map(random_channel(d, rng))) - holevo(ens))
    return [_le("dataproc: max H(channel(e)) - H(e)", worst, MARGIN_TOL, f"{n} ensembles")]


def random_hermitian(d: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (g + g.conj().T) / 2


def convergence_order(seed: int = 10_000, paths: int = 5, coarse: int = 16) -> float:
    """Smallest observed order log2(e(N)/e(2N)) over random 4-level linear paths."""
    worst = math.inf
    for i in range(paths):
        rng = np.random.default_rng(seed + i)
        h0, h1 = random_hermitian(4, rng), random_hermitian(4, rng)
        e1, e2 = (abs(r.work - r.free_energy_delta) for r in
                  (work_integral(WorkIntegralSpec((h0, h1), 1.0, m)) for m in (coarse, 2 * coarse)))
        worst = min(worst, math.log2(e1 / e2))
    return worst


def suite_workintegral() -> list[Check]:
    qubit = work_integral(WorkIntegralSpec((np.diag([0.0, 1.0]), np.diag([0.0, 2.0])), 1.0, 10_000))
    return [
        _le("workintegral: |work - closed-form dF| (qubit)", abs(qubit.work - CLOSED_FORM_DF), WORK_TOL),
        _le("workintegral: rel_error (qubit, 1e4 steps)", qubit.rel_error, WORK_TOL),
        _ge("workintegral: convergence order under step halving", convergence_order(), 1.9),
    ]


SUITES: dict[str, Callable[..., list[Check]]] = {
    "gsl": suite_gsl,
    "holevo": suite_holevo,
    "washout": suite_washout,
    "identity-eq13": suite_matter_identity,
    "dilation": suite_dilation,
    "saturation": suite_saturation,
    "dataproc": suite_dataproc,
    "workintegral": suite_workintegral,
}

_SIZED = {"gsl", "holevo", "washout", "identity-eq13", "dilation", "saturation", "dataproc"}


def run_suite(name: str, instances: int | None = None) -> list[Check]:
    if name == "all":
        return [c for s in SUITES for c in run_suite(s, instances)]
    if name not in SUITES:
        raise KeyError(name)
    if instances is not None and name in _SIZED:
        return SUITES[name](instances)
    return SUITES[name]()
