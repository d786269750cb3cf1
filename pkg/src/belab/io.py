"""State JSON and sweep CSV formats.

Floats are written with 17 significant digits, which round-trips every
double exactly, so files are bit-exact and byte-identical across reruns.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .catalog import DensityMatrix

__all__ = ["fmt", "state_to_json", "state_from_json", "save_state", "load_state", "sweep_to_csv", "dump_json"]


def fmt(x: float) -> str:
    x = float(x)
    if not np.isfinite(x):
        raise ValueError("non-finite value cannot be serialized")
    return format(x + 0.0, ".17g")


def _encode(obj, indent: str = "") -> str:
    # json.dumps would use the shortest repr; floats here must carry 17 digits
    step = indent + "  "
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{step}{json.dumps(str(k))}: {_encode(v, step)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + indent + "}"
    if isinstance(obj, (list, tuple)):
        if all(isinstance(v, (int, float, np.floating, np.integer)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(_encode(v) for v in obj) + "]"
        items = [step + _encode(v, step) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + indent + "]" if items else "[]"
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist(), indent)
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt(obj)
    if obj is None:
        return "null"
    return json.dumps(str(obj))


def dump_json(obj, path: str | Path | None = None) -> str:
    text = _encode(obj) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


def state_to_json(rho: DensityMatrix, extra: dict | None = None) -> str:
    doc = {
        "dims": list(rho.dims),
        "matrix": rho.mat.ravel().tolist(),
        "label": rho.label,
        "family": rho.family,
    }
    if rho.lam is not None:
        doc["lambda"] = rho.lam
    if extra:
        doc.update(extra)
    return dump_json(doc)


def state_from_json(text: str) -> DensityMatrix:
    try:
        doc = json.loads(text)
        dims = tuple(int(d) for d in doc["dims"])
        flat = np.asarray(doc["matrix"], dtype=float)
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed state file: {exc}") from None
    if len(dims) != 2 or min(dims) < 1:
        raise ValueError("malformed state file: dims must be two positive integers")
    D = dims[0] * dims[1]
    if flat.size != D * D:
        raise ValueError(f"malformed state file: expected {D * D} matrix entries, got {flat.size}")
    lam = doc.get("lambda")
    return DensityMatrix.checked(
        flat.reshape(D, D),
        dims,
        label=str(doc.get("label", "")),
        family=str(doc.get("family", "")),
        lam=None if lam is None else float(lam),
    )


def save_state(rho: DensityMatrix, path: str | Path, extra: dict | None = None) -> None:
    Path(path).write_text(state_to_json(rho, extra))


def load_state(path: str | Path) -> DensityMatrix:
    return state_from_json(Path(path).read_text())


def sweep_to_csv(lambdas, values, path: str | Path | None = None) -> str:
    lines = ["lambda,value"] + [f"{fmt(l)},{fmt(v)}" for l, v in zip(lambdas, values)]
    text = "\n".join(lines) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text
