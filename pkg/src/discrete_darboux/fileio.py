"""
File formats: JSON for operators, sequences and residual reports
(human-diffable), CSV with header ``n,re,im`` for long sequences
(plot-friendly).  Floats go through Python's shortest round-trip decimal
rendering in both formats, so save/load cycles are bit-identical.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, is_dataclass
from pathlib import Path

import numpy as np

from .models import Step2Operator
from .operators import JacobiOperator, Seq

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class RunConfig:
    """Pipeline configuration assembled from CLI flags."""

    lam: float = -1.0
    const_a: float = -1.0
    n_sites: int = 64
    probe_count: int = 16
    rng_seed: int = 0
    tol_seed: float = 1e-10
    tol_realness: float = 1e-10
    tol_verify: float = 1e-9

    def __post_init__(self):
        for name in ("tol_seed", "tol_realness", "tol_verify"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


def operator_to_dict(op: JacobiOperator | Step2Operator) -> dict:
    step = 2 if isinstance(op, Step2Operator) else 1
    a = op.a2 if step == 2 else op.a
    q = op.q2 if step == 2 else op.q
    return {
        "schema_version": SCHEMA_VERSION,
        "label": op.label,
        "n_sites": int(len(q)),
        "step": step,
        "a": [float(x) for x in a],
        "q": [float(x) for x in q],
    }


def operator_from_dict(data: dict) -> JacobiOperator | Step2Operator:
    for key in ("schema_version", "n_sites", "step", "a", "q"):
        if key not in data:
            raise ValueError(f"operator file is missing the {key!r} field")
    if data["schema_version"] != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema_version {data['schema_version']}")
    n = data["n_sites"]
    a = np.asarray(data["a"], dtype=np.float64)
    q = np.asarray(data["q"], dtype=np.float64)
    if len(a) != n or len(q) != n:
        raise ValueError(f"array lengths do not match n_sites = {n}")
    label = data.get("label", "")
    if data["step"] == 1:
        return JacobiOperator(a, q, label=label)
    if data["step"] == 2:
        return Step2Operator(a, q, label=label)
    raise ValueError(f"step must be 1 or 2, got {data['step']!r}")


def save_operator(path, op: JacobiOperator | Step2Operator) -> None:
    Path(path).write_text(json.dumps(operator_to_dict(op), indent=1) + "\n")


def load_operator(path) -> JacobiOperator | Step2Operator:
    return operator_from_dict(json.loads(Path(path).read_text()))


def seq_to_dict(s: Seq) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "energy": float(s.energy),
        "kind": s.kind,
        "values": [[float(v.real), float(v.imag)] for v in s.values],
        "log_scale": None if s.log_scale is None else [float(x) for x in s.log_scale],
    }


def seq_from_dict(data: dict) -> Seq:
    vals = np.asarray([complex(re, im) for re, im in data["values"]], dtype=np.complex128)
    ls = data.get("log_scale")
    return Seq(
        vals,
        float(data["energy"]),
        data.get("kind", "generic"),
        log_scale=None if ls is None else np.asarray(ls, dtype=np.float64),
    )


def save_seq(path, s: Seq) -> None:
    Path(path).write_text(json.dumps(seq_to_dict(s), indent=1) + "\n")


def load_seq(path) -> Seq:
    return seq_from_dict(json.loads(Path(path).read_text()))


def write_csv(path, values) -> None:
    """Write a sequence as rows n,re,im (shortest round-trip decimals)."""
    arr = np.asarray(values, dtype=np.complex128)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "re", "im"])
        for n, v in enumerate(arr):
            writer.writerow([n, repr(float(v.real)), repr(float(v.imag))])


def read_csv(path) -> np.ndarray:
    """Read an n,re,im CSV back into a complex array (indexed by n)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header[:3] != ["n", "re", "im"]:
            raise ValueError(f"expected header n,re,im, got {header!r}")
        rows = [(int(n), float(re), float(im)) for n, re, im in reader]
    if not rows:
        return np.zeros(0, dtype=np.complex128)
    size = max(n for n, _, _ in rows) + 1
    out = np.zeros(size, dtype=np.complex128)
    for n, re, im in rows:
        out[n] = complex(re, im)
    return out


def save_report(path, report) -> None:
    """Serialize a report dataclass (or plain dict) as JSON."""
    data = asdict(report) if is_dataclass(report) else dict(report)
    for key, value in list(data.items()):
        if isinstance(value, tuple):
            data[key] = list(value)
    Path(path).write_text(json.dumps(data, indent=1) + "\n")
