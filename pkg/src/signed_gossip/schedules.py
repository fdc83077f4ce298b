"""Per-step gain schedules for the attraction weight alpha_k in [0, 1] and
the repulsion weight beta_k >= 0. A gain can be a constant, an explicit
array, or a closed-form rule ``scale / (k + offset) ** exponent``."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from .errors import GainRangeError

GainSpec = Union[float, Sequence[float], Callable[[int], float]]


def _evaluate(spec: GainSpec, horizon: int, label: str) -> np.ndarray:
    if callable(spec):
        vals = np.asarray([float(spec(k)) for k in range(horizon)], dtype=float)
    elif np.isscalar(spec):
        vals = np.full(horizon, float(spec))
    else:
        arr = np.asarray(spec, dtype=float)
        if arr.ndim != 1:
            raise ValueError(f"{label} schedule array must be one-dimensional")
        if len(arr) < horizon:
            raise ValueError(
                f"{label} schedule array has {len(arr)} entries, need {horizon}"
            )
        vals = arr[:horizon].copy()
    return vals


@dataclass(frozen=True)
class Schedule:
    """Paired gain sequences, validated on evaluation.

    beta_bound optionally records a known upper bound for callable beta
    rules; for constants and arrays the bound is derived automatically.
    """

    alpha: GainSpec = 0.5
    beta: GainSpec = 0.0
    beta_bound: float | None = None

    @classmethod
    def constant(cls, alpha: float, beta: float) -> "Schedule":
        return cls(alpha=float(alpha), beta=float(beta))

    @property
    def is_constant(self) -> bool:
        return np.isscalar(self.alpha) and np.isscalar(self.beta)

    def alpha_at(self, k: int) -> float:
        return float(self.alpha_values(k + 1)[k])

    def beta_at(self, k: int) -> float:
        return float(self.beta_values(k + 1)[k])

    def alpha_values(self, horizon: int) -> np.ndarray:
        vals = _evaluate(self.alpha, horizon, "alpha")
        if np.any(vals < 0.0) or np.any(vals > 1.0) or not np.all(np.isfinite(vals)):
            raise GainRangeError("alpha_k must lie in [0, 1] for every step")
        return vals

    def beta_values(self, horizon: int) -> np.ndarray:
        vals = _evaluate(self.beta, horizon, "beta")
        if np.any(vals < 0.0) or not np.all(np.isfinite(vals)):
            raise GainRangeError("beta_k must be nonnegative for every step")
        return vals

    def beta_upper_bound(self) -> float | None:
        """A known supremum of beta_k, or None when it cannot be derived."""
        if self.beta_bound is not None:
            return float(self.beta_bound)
        if np.isscalar(self.beta):
            return float(self.beta)
        if not callable(self.beta):
            return float(np.max(np.asarray(self.beta, dtype=float)))
        return None


def power_rule(scale: float = 1.0, offset: float = 2.0,
               exponent: float = 1.0) -> Callable[[int], float]:
    """The decaying-gain rule scale / (k + offset) ** exponent."""
    def rule(k: int) -> float:
        return scale / (k + offset) ** exponent
    return rule


def gain_from_spec(spec) -> GainSpec:
    """Parse a config/CLI gain spec.

    Accepted forms: a number, a list of numbers, "0.25", "array:0.5,0.4",
    "power:scale=1,offset=2,exponent=1", or the dict equivalents
    {"kind": "constant"|"array"|"power", ...}.
    """
    if isinstance(spec, (int, float)):
        return float(spec)
    if isinstance(spec, (list, tuple)):
        return [float(v) for v in spec]
    if isinstance(spec, dict):
        kind = spec.get("kind")
        if kind == "constant":
            return float(spec["value"])
        if kind == "array":
            return [float(v) for v in spec["values"]]
        if kind == "power":
            return power_rule(
                scale=float(spec.get("scale", 1.0)),
                offset=float(spec.get("offset", 2.0)),
                exponent=float(spec.get("exponent", 1.0)),
            )
        raise ValueError(f"unknown gain spec kind: {kind!r}")
    if isinstance(spec, str):
        text = spec.strip()
        if text.startswith("array:"):
            return [float(v) for v in text[len("array:"):].split(",") if v]
        if text.startswith("power:"):
            kwargs = {}
            for part in text[len("power:"):].split(","):
                if not part:
                    continue
                key, _, val = part.partition("=")
                kwargs[key.strip()] = float(val)
            return power_rule(**kwargs)
        return float(text)
    raise ValueError(f"cannot interpret gain spec: {spec!r}")
