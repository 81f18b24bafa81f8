"""The JSON run report."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

KEYS = ("config", "attempts", "polynomial", "components", "checks", "verdict", "timings")


def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item") and not isinstance(obj, (str, bytes)):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return "inf" if obj > 0 else ("-inf" if obj < 0 else "nan")
    return obj


@dataclass
class SynthesisReport:
    config: dict
    attempts: list
    polynomial: dict
    components: list
    checks: dict
    verdict: str
    timings: dict = field(default_factory=dict)
    # in-memory extras for figures; never serialized
    family: object = field(default=None, repr=False, compare=False)
    rasters: tuple = field(default=(), repr=False, compare=False)

    def to_dict(self, timings: bool = True) -> dict:
        out = {k: _clean(getattr(self, k)) for k in KEYS}
        if not timings:
            out.pop("timings")
        return out

    def to_json(self, timings: bool = True) -> str:
        return json.dumps(self.to_dict(timings), indent=2) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "SynthesisReport":
        return cls(**{k: data[k] for k in KEYS if k in data})

    @classmethod
    def from_json(cls, text: str) -> "SynthesisReport":
        return cls.from_dict(json.loads(text))
