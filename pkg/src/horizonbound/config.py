"""Strict JSON experiment configuration.

Complex matrices are written as nested arrays of ``[re, im]`` pairs, one row
per inner list (row-major), e.g. the Pauli-Y operator is
``[[[0, 0], [0, -1]], [[0, 1], [0, 0]]]``.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .errors import HorizonBoundError
from .info import OptimizerSettings

Matrix = List[List[Tuple[float, float]]]


class ConfigError(HorizonBoundError, ValueError):
    pass


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class RandomKraus(_Strict):
    dim: int = Field(ge=1)
    outcomes: int = Field(ge=1)
    seed: int


class KrausConfig(_Strict):
    random: Optional[RandomKraus] = None
    explicit: Optional[List[Matrix]] = None

    @model_validator(mode="after")
    def _one_of(self):
        if (self.random is None) == (self.explicit is None):
            raise ValueError("kraus needs exactly one of 'random' or 'explicit'")
        if self.explicit is not None:
            if not self.explicit:
                raise ValueError("kraus.explicit needs at least one operator")
            d = len(self.explicit[0])
            for i, op in enumerate(self.explicit):
                if len(op) != d or any(len(row) != d for row in op):
                    raise ValueError(f"kraus.explicit operator {i} is not {d}x{d}")
        return self

    @property
    def dim(self) -> int:
        return self.random.dim if self.random is not None else len(self.explicit[0])

    @property
    def outcomes(self) -> int:
        return self.random.outcomes if self.random is not None else len(self.explicit)


class OptimizerConfig(_Strict):
    restarts: int = Field(default=20, ge=1)
    max_iters: int = Field(default=500, ge=1)
    step_tol: float = Field(default=1e-8, gt=0)
    seed: int = 0

    def settings(self) -> OptimizerSettings:
        return OptimizerSettings(self.restarts, self.max_iters, self.step_tol, self.seed)


class ExperimentConfig(_Strict):
    """One experiment. Defaults: ``slack = 0``, ``tail_mode = "faithful"``,
    optimizer ``restarts=20, max_iters=500, step_tol=1e-8, seed=0``."""

    mass: float = Field(gt=0)
    omega: float = Field(gt=0)
    truncation: int = Field(ge=2)
    kraus: KrausConfig
    drop_set: List[int] = Field(default_factory=list)
    inside_unitaries: Optional[Dict[int, Matrix]] = None
    radius: Optional[float] = Field(default=None, gt=0)
    slack: float = Field(default=0.0, ge=0)
    optimizer: OptimizerConfig = Field(default_factory=OptimizerConfig)
    tail_mode: Literal["faithful", "relaxed"] = "faithful"

    @model_validator(mode="after")
    def _consistent(self):
        if self.kraus.dim != self.truncation:
            raise ValueError(f"kraus dim ({self.kraus.dim}) must equal truncation ({self.truncation})")
        bad = [a for a in self.drop_set if a < 0 or a >= self.kraus.outcomes]
        if bad:
            raise ValueError(f"drop_set indices {bad} out of range for {self.kraus.outcomes} outcomes")
        if self.inside_unitaries:
            extra = sorted(set(self.inside_unitaries) - set(self.drop_set))
            if extra:
                raise ValueError(f"inside_unitaries given for outcomes {extra} not in drop_set")
        if self.radius is not None and not self.radius > 2 * self.mass:
            raise ValueError("radius inside horizon")
        return self

    @property
    def seed(self) -> int:
        return self.kraus.random.seed if self.kraus.random is not None else 0


class WorkIntegralConfig(_Strict):
    path: List[Matrix] = Field(min_length=2)
    beta: float = Field(gt=0)
    steps: int = Field(default=10_000, ge=2)


def to_matrix(rows: Matrix) -> np.ndarray:
    arr = np.asarray(rows, dtype=float)
    return arr[..., 0] + 1j * arr[..., 1]


def from_matrix(m) -> Matrix:
    m = np.asarray(m, dtype=complex)
    return [[(float(z.real), float(z.imag)) for z in row] for row in m]


def _format_validation(exc: ValidationError) -> str:
    parts = []
    for err in exc.errors():
        loc = ".".join(str(p) for p in err["loc"]) or "config"
        parts.append(f"{loc}: {err['msg']}")
    return "; ".join(parts)


def parse_config(data, model=ExperimentConfig):
    try:
        return model.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(_format_validation(exc)) from None


def load_json(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return data


def load_config(path) -> ExperimentConfig:
    return parse_config(load_json(path))


def load_work_config(path) -> WorkIntegralConfig:
    return parse_config(load_json(path), WorkIntegralConfig)
