"""Single runs, randomized sweeps and CSV reports."""

from __future__ import annotations

import csv
import io
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from typing import Iterable, Optional

import numpy as np

from .channel import DropPlan, random_kraus, validate_kraus
from .config import ExperimentConfig, OptimizerConfig, parse_config, to_matrix
from .errors import HorizonBoundError
from .ledger import BlackHoleParams, ExperimentLedger, hawking_temperature, ledger
from .thermal import ThermalSpec, hh_state


class StageError(HorizonBoundError):
    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"{stage}: {cause}")


@dataclass(frozen=True)
class ReportRow:
    instance_id: int
    seed: int
    dim: int
    n_kraus: int
    p_drop: float
    delta_w: float
    delta_f: float
    delta_s_bh: float
    s_m: float
    s_m_prime: float
    delta_s_t: float
    holevo_hd: float
    acc_info: float
    margin_gsl: float
    margin_holevo: float
    margin_info: float
    energy_residual: float
    wall_time_ms: float

    @classmethod
    def columns(cls) -> list[str]:
        return [f.name for f in fields(cls)]


@dataclass(frozen=True)
class RunResult:
    row: ReportRow
    ledger: ExperimentLedger


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except HorizonBoundError as exc:
        raise StageError(name, exc) from exc
    except (ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        raise StageError(name, exc) from exc


def build_kraus(cfg: ExperimentConfig):
    if cfg.kraus.random is not None:
        r = cfg.kraus.random
        return random_kraus(r.dim, r.outcomes, np.random.default_rng(r.seed))
    return validate_kraus([to_matrix(op) for op in cfg.kraus.explicit])


def execute(cfg: ExperimentConfig, instance_id: int = 0, timing: bool = False) -> RunResult:
    """Full pipeline for one config; every failure is tagged with its stage."""
    t0 = time.perf_counter()
    bh = _stage("black-hole", BlackHoleParams, cfg.mass)
    spec = _stage("thermal-state", ThermalSpec, cfg.omega, bh.t_bh, cfg.truncation, cfg.tail_mode)
    state = _stage("thermal-state", hh_state, spec)
    kraus = _stage("kraus", build_kraus, cfg)
    inside = None
    if cfg.inside_unitaries:
        inside = {a: to_matrix(m) for a, m in cfg.inside_unitaries.items()}
    plan = DropPlan(frozenset(cfg.drop_set), inside, cfg.radius)
    led = _stage("ledger", ledger, state, kraus, plan, bh, cfg.slack, cfg.optimizer.settings())
    elapsed = (time.perf_counter() - t0) * 1e3 if timing else 0.0
    row = ReportRow(
        instance_id=instance_id, seed=cfg.seed, dim=kraus.dim, n_kraus=kraus.n_outcomes,
        p_drop=led.p_drop, delta_w=led.delta_w, delta_f=led.delta_f, delta_s_bh=led.delta_s_bh,
        s_m=led.s_m, s_m_prime=led.s_m_prime, delta_s_t=led.delta_s_t, holevo_hd=led.holevo_hd,
        acc_info=led.acc_info, margin_gsl=led.margin_gsl, margin_holevo=led.margin_holevo,
        margin_info=led.margin_info, energy_residual=led.energy_residual, wall_time_ms=elapsed)
    return RunResult(row, led)


def run_experiment(cfg: ExperimentConfig, timing: bool = False) -> ReportRow:
    return execute(cfg, timing=timing).row


MARGIN_TOL = 1e-9


def row_violations(row: ReportRow, tol: float = MARGIN_TOL) -> list[str]:
    out = []
    for name in ("margin_gsl", "margin_holevo", "margin_info"):
        v = getattr(row, name)
        if v < -tol:
            out.append(f"{name} = {v:.3e}")
    return out


# -- sweeps ------------------------------------------------------------------

@dataclass(frozen=True)
class SweepRanges:
    """Sampling ranges for random instances.

    ``ratio`` bounds ``omega / T_BH``; the truncation tail is recorded, not
    enforced (``tail_mode="relaxed"``). ``drop_policy`` is one of ``"random"``
    (each label dropped with probability 1/2), ``"empty"``, ``"nonempty"``
    or ``"all"``.
    """

    dim_min: int = 2
    dim_max: int = 6
    kraus_min: int = 1
    kraus_max: int = 4
    mass: tuple = (0.5, 2.0)
    ratio: tuple = (0.3, 3.0)
    slack: float = 0.0
    drop_policy: str = "random"
    optimizer: OptimizerConfig = field(default_factory=lambda: OptimizerConfig(restarts=4, max_iters=200))

    def __post_init__(self):
        if not (2 <= self.dim_min <= self.dim_max <= 8):
            raise ValueError("need 2 <= dim_min <= dim_max <= 8")
        if not (1 <= self.kraus_min <= self.kraus_max <= 6):
            raise ValueError("need 1 <= kraus_min <= kraus_max <= 6")
        if self.drop_policy not in ("random", "empty", "nonempty", "all"):
            raise ValueError(f"unknown drop policy {self.drop_policy!r}")
        if self.slack < 0:
            raise ValueError("slack must be nonnegative")


def instance_config(seed: int, ranges: SweepRanges = SweepRanges()) -> ExperimentConfig:
    """Random experiment drawn from ``numpy.random.default_rng(seed)``."""
    rng = np.random.default_rng(seed)
    mass = float(rng.uniform(*ranges.mass))
    ratio = float(rng.uniform(*ranges.ratio))
    dim = int(rng.integers(ranges.dim_min, ranges.dim_max + 1))
    k = int(rng.integers(ranges.kraus_min, ranges.kraus_max + 1))
    if ranges.drop_policy == "empty":
        drop = []
    elif ranges.drop_policy == "all":
        drop = list(range(k))
    else:
        mask = rng.random(k) < 0.5
        if ranges.drop_policy == "nonempty" and not mask.any():
            mask[rng.integers(k)] = True
        drop = [int(a) for a in np.flatnonzero(mask)]
    opt = ranges.optimizer.model_copy(update={"seed": seed})
    return parse_config({
        "mass": mass, "omega": ratio * hawking_temperature(mass), "truncation": dim,
        "kraus": {"random": {"dim": dim, "outcomes": k, "seed": seed}},
        "drop_set": drop, "slack": ranges.slack, "optimizer": opt.model_dump(), "tail_mode": "relaxed",
    })


@dataclass(frozen=True)
class SweepSummary:
    instances: int
    min_margin_gsl: float
    min_margin_holevo: float
    min_margin_info: float
    max_matter_residual: float
    max_saturation_residual: float
    max_energy_residual: float

    @property
    def passed(self) -> bool:
        return min(self.min_margin_gsl, self.min_margin_holevo, self.min_margin_info) >= -MARGIN_TOL

    def format(self) -> str:
        lines = [f"instances               {self.instances}"]
        for k, v in asdict(self).items():
            if k != "instances":
                lines.append(f"{k:<24}{v: .6e}")
        lines.append("result                  " + ("PASS" if self.passed else "FAIL"))
        return "\n".join(lines)


@dataclass(frozen=True)
class SweepResult:
    rows: list
    summary: SweepSummary


def _sweep_one(args):
    instance_id, seed, ranges, timing = args
    res = execute(instance_config(seed, ranges), instance_id=instance_id, timing=timing)
    return res.row, res.ledger.matter_residual, res.ledger.saturation_residual


def sweep(n: int, ranges: SweepRanges = SweepRanges(), master_seed: int = 0, workers: int = 1,
          timing: bool = False) -> SweepResult:
    """``n`` independent instances; instance ``i`` uses seed ``master_seed + i``.

    Rows come back ordered by instance id whatever ``workers`` is.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    jobs = [(i, master_seed + i, ranges, timing) for i in range(n)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_one, jobs, chunksize=max(1, n // (4 * workers))))
    else:
        results = [_sweep_one(j) for j in jobs]
    rows = [r[0] for r in results]
    summary = SweepSummary(
        instances=n,
        min_margin_gsl=min(r.margin_gsl for r in rows),
        min_margin_holevo=min(r.margin_holevo for r in rows),
        min_margin_info=min(r.margin_info for r in rows),
        max_matter_residual=max(r[1] for r in results),
        max_saturation_residual=max(r[2] for r in results),
        max_energy_residual=max(r.energy_residual for r in rows),
    )
    return SweepResult(rows, summary)


# -- CSV ---------------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def rows_to_csv(rows: Iterable[ReportRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(ReportRow.columns())
    for r in rows:
        w.writerow([_fmt(getattr(r, c)) for c in ReportRow.columns()])
    return buf.getvalue()


def write_csv(rows: Iterable[ReportRow], path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(rows_to_csv(rows))


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return [{k: float(v) for k, v in rec.items()} for rec in csv.DictReader(fh)]


def format_row(row: ReportRow, extra: Optional[dict] = None) -> str:
    width = max(len(c) for c in [*ReportRow.columns(), *(extra or {})])
    lines = [f"{c:<{width}}  {_fmt(getattr(row, c))}" for c in ReportRow.columns()]
    for k, v in (extra or {}).items():
        lines.append(f"{k:<{width}}  {v}")
    return "\n".join(lines)
