"""ClassReport: a computed class plus where it came from."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from .quiver import render_id
from .ring import MotiveClass, as_class, parse_class, render


@dataclass(frozen=True)
class ClassReport:
    value: MotiveClass
    algorithm: str
    fingerprint: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "value", as_class(self.value))

    def __str__(self):
        return render(self.value)

    def to_dict(self):
        out = {"algorithm": self.algorithm, "class": render(self.value)}
        out["fingerprint"] = self.fingerprint
        out.update(self.extras)
        return out

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        value = parse_class(data.pop("class"))
        algorithm = data.pop("algorithm")
        fingerprint = data.pop("fingerprint", {})
        return cls(value, algorithm, fingerprint, data)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def fingerprint(**parts):
    """Stable, JSON-friendly summary of the inputs of a computation."""
    out = {}
    for key, val in parts.items():
        if val is None:
            continue
        if hasattr(val, "items"):
            out[key] = {render_id(k): str(v) for k, v in sorted(val.items(), key=lambda t: render_id(t[0]))}
        else:
            out[key] = str(val)
    return out


def quiver_hash(quiver):
    text = "|".join(
        sorted(render_id(v) for v in quiver.vertices)
        + sorted(f"{render_id(a.id)}:{render_id(a.source)}>{render_id(a.target)}" for a in quiver.arrows)
    )
    return hashlib.sha256(text.encode()).hexdigest()[:16]
