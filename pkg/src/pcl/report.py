"""VerificationReport plus the JSON encoding shared by every driver."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .scalars import QuadExt, fmt_scalar

VERIFIED = "verified"
FALSIFIED = "falsified"
EXHAUSTED = "degenerate-retry-exhausted"


@dataclass
class VerificationReport:
    theorem_id: str
    seed: int
    trials_requested: int
    trials_completed: int = 0
    verdict: str = VERIFIED
    max_residuals: list = field(default_factory=list)
    witness: dict | None = None
    details: dict = field(default_factory=dict)
    runtime_ms: float | None = None

    @property
    def ok(self) -> bool:
        return self.verdict == VERIFIED

    def to_dict(self) -> dict:
        return {
            "theorem_id": self.theorem_id,
            "verdict": self.verdict,
            "trials_requested": self.trials_requested,
            "trials_completed": self.trials_completed,
            "max_residuals": [encode(r) for r in self.max_residuals],
            "witness": encode(self.witness),
            "seed": self.seed,
            "details": encode(self.details),
            "runtime_ms": self.runtime_ms,
        }


def encode(obj):
    """Turn library values into JSON-ready data (rationals become "p/q")."""
    from .geom import Collineation, Conic, _Proj

    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, int):
        return obj
    if isinstance(obj, (Fraction, QuadExt)):
        return fmt_scalar(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    if isinstance(obj, (complex, np.complexfloating)):
        return [encode(obj.real), encode(obj.imag)]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [encode(x) for x in obj.tolist()]
    if isinstance(obj, _Proj):
        return [encode(x) for x in obj.coords]
    if isinstance(obj, (Conic, Collineation)):
        return [[encode(x) for x in r] for r in obj.m]
    if isinstance(obj, dict):
        return {str(k): encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [encode(x) for x in obj]
    if hasattr(obj, "to_dict"):
        return encode(obj.to_dict())
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(obj) -> str:
    return json.dumps(encode(obj), indent=2, ensure_ascii=False) + "\n"
