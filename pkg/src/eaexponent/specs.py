"""Channel and state ingestion for the command line.

A channel is either a preset string ``preset:<name>:<param>[:<d>]`` or a JSON
file::

    {"name": "my-channel", "d_in": 2, "d_out": 2,
     "kraus": [ [[[re, im], [re, im]], [[re, im], [re, im]]], ... ]}

where each Kraus operator is a ``d_out x d_in`` nested array of ``[re, im]``
pairs.  Matrices for states use the same ``[re, im]`` layout, or the inline
form ``diag:p1,p2,...``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import operators as ops
from .errors import InvariantError


class SpecError(ValueError):
    """Malformed channel or state description; the message names the location."""


PRESETS = ("identity", "depolarizing", "dephasing", "amplitude-damping")


@dataclass
class ChannelSpec:
    name: str
    d_in: int
    d_out: int
    kraus: np.ndarray

    def channel(self) -> ops.QuantumChannel:
        try:
            return ops.QuantumChannel(self.kraus, name=self.name)
        except InvariantError as exc:
            raise InvariantError(f"channel {self.name!r}: {exc}") from exc


def _complex_matrix(data, where: str) -> np.ndarray:
    if not isinstance(data, list) or not data:
        raise SpecError(f"{where}: expected a nonempty list of rows")
    rows = []
    for i, row in enumerate(data):
        if not isinstance(row, list) or not row:
            raise SpecError(f"{where}[{i}]: expected a nonempty list of [re, im] pairs")
        vals = []
        for j, z in enumerate(row):
            ok = (isinstance(z, list) and len(z) == 2
                  and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in z))
            if not ok:
                raise SpecError(f"{where}[{i}][{j}]: expected [re, im], got {z!r}")
            vals.append(complex(z[0], z[1]))
        rows.append(vals)
    if len({len(r) for r in rows}) != 1:
        raise SpecError(f"{where}: rows have different lengths")
    return np.array(rows, dtype=complex)


def parse_preset(text: str) -> ChannelSpec:
    parts = text.split(":")
    if len(parts) < 2 or parts[0] != "preset":
        raise SpecError(f"{text!r}: expected preset:<name>:<param>[:<d>]")
    name = parts[1]
    if name not in PRESETS:
        raise SpecError(f"{text!r}: unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    try:
        args = [float(x) for x in parts[2:]]
    except ValueError as exc:
        raise SpecError(f"{text!r}: preset parameters must be numbers") from exc
    try:
        if name == "identity":
            ch = ops.QuantumChannel.identity(int(args[0]) if args else 2)
        elif name == "depolarizing":
            if not args:
                raise SpecError(f"{text!r}: depolarizing needs a parameter p")
            ch = ops.QuantumChannel.depolarizing(args[0], int(args[1]) if len(args) > 1 else 2)
        elif name == "dephasing":
            if not args:
                raise SpecError(f"{text!r}: dephasing needs a parameter p")
            ch = ops.QuantumChannel.dephasing(args[0])
        else:
            if not args:
                raise SpecError(f"{text!r}: amplitude-damping needs a parameter gamma")
            ch = ops.QuantumChannel.amplitude_damping(args[0])
    except InvariantError as exc:
        raise InvariantError(f"{text!r}: {exc}") from exc
    return ChannelSpec(text, ch.d_in, ch.d_out, np.array(ch.kraus))


def parse_channel_json(data, source: str = "<json>") -> ChannelSpec:
    if not isinstance(data, dict):
        raise SpecError(f"{source}: top level must be an object")
    for key in ("kraus",):
        if key not in data:
            raise SpecError(f"{source}: missing field {key!r}")
    if not isinstance(data["kraus"], list) or not data["kraus"]:
        raise SpecError(f"{source}: kraus must be a nonempty list")
    mats = [_complex_matrix(k, f"{source}: kraus[{i}]") for i, k in enumerate(data["kraus"])]
    if len({m.shape for m in mats}) != 1:
        raise SpecError(f"{source}: Kraus operators have different shapes")
    d_out, d_in = mats[0].shape
    for key, val in (("d_in", d_in), ("d_out", d_out)):
        if key in data and data[key] != val:
            raise SpecError(f"{source}: {key}={data[key]!r} but Kraus operators imply {val}")
    return ChannelSpec(str(data.get("name", source)), d_in, d_out, np.array(mats))


def load_channel(text: str) -> ChannelSpec:
    """Preset string or path to a JSON channel file."""
    if text.startswith("preset:"):
        return parse_preset(text)
    path = Path(text)
    if not path.exists():
        raise SpecError(f"{text!r}: not a preset and no such file")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise SpecError(f"{text}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return parse_channel_json(data, str(path))


def load_matrix(text: str) -> np.ndarray:
    """``diag:p1,p2,...`` or a JSON file holding ``[re, im]`` rows."""
    if text.startswith("diag:"):
        try:
            vals = [float(x) for x in text[5:].split(",")]
        except ValueError as exc:
            raise SpecError(f"{text!r}: diagonal entries must be numbers") from exc
        return np.diag(vals).astype(complex)
    path = Path(text)
    if not path.exists():
        raise SpecError(f"{text!r}: not a diag: form and no such file")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise SpecError(f"{text}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return _complex_matrix(data, str(path))


def channel_to_json(channel: ops.QuantumChannel) -> dict:
    kraus = [[[[float(z.real), float(z.imag)] for z in row] for row in K] for K in channel.kraus]
    return {"name": channel.name, "d_in": channel.d_in, "d_out": channel.d_out, "kraus": kraus}
