"""Transform provenance records.

Every lattice transform attaches one of these to its output net so callers
(and the CLI) can report the verification residuals that were measured
in-process, instead of re-deriving them.
"""

from dataclasses import dataclass, field


def _plain(v):
    """Mirror a residual value (scalar or nested lists) into JSON-able form."""
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    return float(v)


@dataclass
class TransformRecord:
    kind: str
    parameters: dict = field(default_factory=dict)
    residuals: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "kind": self.kind,
            "parameters": dict(self.parameters),
            "residuals": {k: _plain(v) for k, v in self.residuals.items()},
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            kind=str(d.get("kind", "")),
            parameters=dict(d.get("parameters", {})),
            residuals={k: _plain(v) for k, v in d.get("residuals", {}).items()},
        )
