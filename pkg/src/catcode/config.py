"""Default experiment parameters and the serializable run configuration."""
from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field

# Adiabatic preparation. chi = 1 and k0 = 4 target a cat with alpha = 2, which
# sits well inside a 26-level cutoff.
CHI = 1.0
K0 = 4.0
ADIABATIC_DIM = 26
ADIABATIC_DT = 1e-3
ADIABATIC_T_FINAL = 20.0
LINEAR_RATE = 0.1
TANH_LAMBDA_GRID = (0.1, 0.15, 0.2, 0.3, 0.4, 0.6)
TAIL_FRACTION = 0.25
SAMPLE_EVERY = 100

# Trapped-ion realization of the mode-to-ion CN.
ETA_LD = 0.1
ION_COEFFICIENT = math.pi / 2


@dataclass
class RunConfig:
    """Every parameter of a CLI run; echoed into each output it produces."""

    experiment: str
    alpha: list[float] | float | None = None
    eta: list[float] | float | None = None
    gamma: float | None = None
    t: float | None = None
    chi: float = CHI
    schedule: str | None = None
    parity: str = "odd"
    dim: int | None = None
    dt: float = ADIABATIC_DT
    t_final: float = ADIABATIC_T_FINAL
    sample_every: int = SAMPLE_EVERY
    tail_fraction: float = TAIL_FRACTION
    trials: int | None = None
    seed: int | None = None
    tolerance: float | None = None
    gate_mode: str = "exact"
    eta_ld: float = ETA_LD
    ion_coefficient: float = ION_COEFFICIENT
    logical: list[float] = field(default_factory=lambda: [1.0, 0.0])
    format: str = "table"
    out: str | None = None

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> RunConfig:
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)
