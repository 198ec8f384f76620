"""File formats: model definitions, binary partition tables, CSV and JSON reports."""

from __future__ import annotations

import csv
import io as _io
import json
import struct
from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import ModelError
from .partition import LogPartitionTable
from .weights import BulkWeights, ModelSpec, PerturbationParams

PathLike = Union[str, Path]

TABLE_MAGIC = b"CONDLZ01"
_HEADER = struct.Struct("<8sQQ8s")  # 32 bytes

_REQUIRED = ("bulk.family", "pert.theta", "pert.gamma", "pert.kappa", "system.L", "system.N")


def parse_model_text(text: str) -> ModelSpec:
    """Parse ``key = value`` lines (``#`` starts a comment).

    Keys: ``bulk.family`` (``geometric`` or ``table``), ``bulk.p``,
    ``bulk.weights`` (comma separated) and ``bulk.tail_ratio`` for tables,
    ``pert.theta``, ``pert.gamma``, ``pert.kappa``, optional
    ``pert.allow_boundary_kappa``, ``system.L``, ``system.N``.
    """
    kv = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ModelError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        kv[key] = value
    missing = [k for k in _REQUIRED if k not in kv]
    if missing:
        raise ModelError(f"missing keys: {', '.join(missing)}")
    try:
        family = kv["bulk.family"].lower()
        if family == "geometric":
            bulk = BulkWeights.geometric(float(kv["bulk.p"]))
        elif family == "table":
            weights = [float(v) for v in kv["bulk.weights"].split(",") if v.strip()]
            bulk = BulkWeights.table(weights, float(kv["bulk.tail_ratio"]))
        else:
            raise ModelError(f"unknown bulk.family {kv['bulk.family']!r}")
        boundary = kv.get("pert.allow_boundary_kappa", "false").lower() in ("1", "true", "yes")
        pert = PerturbationParams(float(kv["pert.theta"]), float(kv["pert.gamma"]),
                                  float(kv["pert.kappa"]), allow_boundary_kappa=boundary)
        return ModelSpec(bulk, pert, int(kv["system.L"]), int(kv["system.N"]))
    except KeyError as exc:
        raise ModelError(f"missing key {exc.args[0]}") from None
    except ValueError as exc:
        if isinstance(exc, ModelError):
            raise
        raise ModelError(str(exc)) from None


def load_model(path: PathLike) -> ModelSpec:
    return parse_model_text(Path(path).read_text())


def format_model(model: ModelSpec) -> str:
    lines = [f"bulk.family = {model.bulk.family}"]
    if model.bulk.family == "geometric":
        lines.append(f"bulk.p = {model.bulk.tail_ratio!r}")
    else:
        lines.append("bulk.weights = " + ", ".join(repr(v) for v in model.bulk.head))
        lines.append(f"bulk.tail_ratio = {model.bulk.tail_ratio!r}")
    p = model.pert
    lines += [f"pert.theta = {p.theta!r}", f"pert.gamma = {p.gamma!r}", f"pert.kappa = {p.kappa!r}"]
    if p.allow_boundary_kappa:
        lines.append("pert.allow_boundary_kappa = true")
    lines += [f"system.L = {model.L}", f"system.N = {model.N}"]
    return "\n".join(lines) + "\n"


def save_table(table: LogPartitionTable, path: PathLike):
    """32-byte header (magic, L_max, N_max, model hash) then little-endian
    float64 ``log Z`` in row-major ``(l, m)`` order, then the log weights."""
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(TABLE_MAGIC, table.L_max, table.N_max, table.model_hash))
        fh.write(np.ascontiguousarray(table.log_z, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(table.log_weights, dtype="<f8").tobytes())


def load_table(path: PathLike) -> LogPartitionTable:
    data = Path(path).read_bytes()
    magic, L_max, N_max, digest = _HEADER.unpack_from(data)
    if magic != TABLE_MAGIC:
        raise ValueError("not a condlab partition table")
    n = (L_max + 1) * (N_max + 1)
    body = np.frombuffer(data, dtype="<f8", offset=_HEADER.size)
    if body.size != n + N_max + 1:
        raise ValueError("truncated or oversized table file")
    log_z = body[:n].reshape(L_max + 1, N_max + 1).astype(np.float64)
    log_w = body[n:].astype(np.float64)
    return LogPartitionTable(log_z, log_w, digest)


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(int(v)) if isinstance(v, (int, np.integer)) else str(v)


def write_csv(path_or_buf, header: Sequence[str], rows: Iterable[Sequence]):
    """Deterministic CSV: floats printed with ``repr``."""
    def emit(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])

    if isinstance(path_or_buf, (str, Path)):
        with open(path_or_buf, "w", newline="") as fh:
            emit(fh)
    else:
        emit(path_or_buf)


def configuration_rows(eta):
    return [(x + 1, int(v)) for x, v in enumerate(eta)]


def write_configuration(path_or_buf, eta):
    """``site,occupation`` with sites numbered from 1."""
    write_csv(path_or_buf, ("site", "occupation"), configuration_rows(eta))


def write_trajectory(path_or_buf, times, states):
    rows = ((t, x + 1, int(v)) for t, s in zip(times, states) for x, v in enumerate(s))
    write_csv(path_or_buf, ("time", "site", "occupation"), rows)


def read_configuration(path: PathLike) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    rows.sort(key=lambda r: int(r["site"]))
    return np.array([int(r["occupation"]) for r in rows], dtype=np.int64)


def write_tail_curve(path_or_buf, curve):
    """``s,empirical,theoretical,n_realizations``; missing columns are blank."""
    n = len(curve.s_grid)
    emp = curve.empirical if curve.empirical is not None else [""] * n
    th = curve.theoretical if curve.theoretical is not None else [""] * n
    rows = ((s, e, t, curve.n_realizations) for s, e, t in zip(curve.s_grid, emp, th))
    write_csv(path_or_buf, ("s", "empirical", "theoretical", "n_realizations"), rows)


def dumps_json(obj) -> str:
    def default(o):
        if isinstance(o, np.ndarray):
            return o.tolist()
        if isinstance(o, np.generic):
            return o.item()
        raise TypeError(f"not JSON serializable: {type(o).__name__}")

    return json.dumps(obj, indent=2, sort_keys=True, default=default) + "\n"


def csv_text(header, rows) -> str:
    buf = _io.StringIO()
    write_csv(buf, header, rows)
    return buf.getvalue()
