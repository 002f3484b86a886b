"""Net serialization (JSON documents) and OBJ mesh export.

The JSON document stores the window, the values row-major as (w, x, y, z)
tuples, and free-form metadata including the transform lineage. Floats go
through Python's repr, so a save/load round trip is bit-faithful.
"""

import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import NetFormatError
from .lattice import LatticeWindow, Net
from .records import TransformRecord

__all__ = ["NetDocument", "save_net", "load_net", "export_obj", "FORMAT_VERSION"]

FORMAT_VERSION = "1.0"


@dataclass
class NetDocument:
    window: dict
    values: list          # M*N rows of [w, x, y, z], row-major in m
    metadata: dict = field(default_factory=dict)
    format_version: str = FORMAT_VERSION

    @classmethod
    def from_net(cls, net, metadata=None):
        w = net.window
        meta = dict(metadata or {})
        if net.record is not None:
            meta["record"] = net.record.to_dict()
        return cls(
            window={
                "m0": w.m0, "n0": w.n0, "M": w.M, "N": w.N,
                "wrap_m": w.wrap_m, "wrap_n": w.wrap_n,
            },
            values=[[float(c) for c in row] for row in net.values.reshape(-1, 4)],
            metadata=meta,
        )

    def to_net(self):
        try:
            w = LatticeWindow(
                int(self.window["m0"]), int(self.window["n0"]),
                int(self.window["M"]), int(self.window["N"]),
                bool(self.window.get("wrap_m", False)),
                bool(self.window.get("wrap_n", False)),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise NetFormatError(f"bad window block: {e}") from e
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.shape != (w.M * w.N, 4):
            raise NetFormatError(
                f"expected {w.M * w.N} rows of 4 values, got shape {vals.shape}"
            )
        record = None
        if "record" in self.metadata:
            record = TransformRecord.from_dict(self.metadata["record"])
        return Net(w, vals.reshape(w.M, w.N, 4), record=record)

    def to_json(self):
        return json.dumps(
            {
                "format_version": self.format_version,
                "window": self.window,
                "values": self.values,
                "metadata": self.metadata,
            },
            indent=1,
        )

    @classmethod
    def from_json(cls, text):
        try:
            d = json.loads(text)
        except json.JSONDecodeError as e:
            raise NetFormatError(f"not a net document: {e}") from e
        if not isinstance(d, dict) or "window" not in d or "values" not in d:
            raise NetFormatError("missing window or values block")
        version = str(d.get("format_version", ""))
        if not version.startswith("1."):
            raise NetFormatError(f"unsupported format version {version!r}")
        return cls(
            window=d["window"],
            values=d["values"],
            metadata=d.get("metadata", {}),
            format_version=version,
        )


def save_net(net, path, metadata=None):
    doc = NetDocument.from_net(net, metadata)
    with open(path, "w", encoding="utf-8") as f:
        f.write(doc.to_json())
        f.write("\n")
    return doc


def load_net(path):
    with open(path, encoding="utf-8") as f:
        return NetDocument.from_json(f.read()).to_net()


def export_obj(net, path):
    """Write the net as a Wavefront OBJ quad mesh.

    One `v` record per lattice site (row-major in m), one quad `f` per
    elementary quadrilateral; wrapped directions emit their seam faces.
    Nets with a nonzero real part are projected to the imaginary part with
    a warning.
    """
    if not net.is_imaginary():
        warnings.warn(
            "net has a nonzero real component; exporting the imaginary part",
            RuntimeWarning,
            stacklevel=2,
        )
    w = net.window
    lines = [f"# quad net, {w.M}x{w.N}, wrap_m={w.wrap_m} wrap_n={w.wrap_n}"]
    for row in net.values.reshape(-1, 4):
        lines.append("v {!r} {!r} {!r}".format(*(float(c) for c in row[1:])))
    for m, n in w.dual_indices():
        corner = []
        for dm, dn in ((0, 0), (1, 0), (1, 1), (0, 1)):
            i, j = w.index(m + dm, n + dn)
            corner.append(i * w.N + j + 1)
        lines.append("f {} {} {} {}".format(*corner))
    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(lines))
        f.write("\n")
    return len(net.values.reshape(-1, 4)), len(list(w.dual_indices()))
