"""JSON/CSV interchange. Complex numbers are ``[re, im]`` pairs; matrices are row-major."""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np


def encode_vector(v) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(v, dtype=complex).reshape(-1)]


def encode_matrix(m) -> list:
    return [encode_vector(row) for row in np.asarray(m, dtype=complex)]


def _decode_complex(pair) -> complex:
    if isinstance(pair, (int, float)):
        return complex(pair)
    if len(pair) != 2:
        raise ValueError(f"expected [re, im], got {pair!r}")
    return complex(float(pair[0]), float(pair[1]))


def decode_vector(data) -> np.ndarray:
    return np.array([_decode_complex(p) for p in data], dtype=complex)


def decode_matrix(data) -> np.ndarray:
    rows = [decode_vector(row) for row in data]
    if not rows or len({r.size for r in rows}) != 1:
        raise ValueError("matrix rows are empty or ragged")
    return np.vstack(rows)


def dump_json(obj, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2) + "\n")


def load_json(path):
    return json.loads(Path(path).read_text())


def load_rule_gates(path) -> list[np.ndarray]:
    """A rule file holds a list of 4x4 matrices (a single matrix is also accepted)."""
    data = load_json(path)
    if data and isinstance(data[0][0][0], (int, float)):
        data = [data]
    return [decode_matrix(m) for m in data]


def fmt(x) -> str:
    """Round-trippable float text; used for all numeric CSV cells."""
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if x is None:
        return ""
    return repr(float(x))


def write_csv(path, header, rows) -> None:
    """Write to a path, or to an already open text stream."""
    if hasattr(path, "write"):
        _write_rows(path, header, rows)
        return
    with open(path, "w", newline="") as fh:
        _write_rows(fh, header, rows)


def _write_rows(fh, header, rows):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([c if isinstance(c, str) else fmt(c) for c in row])


def basis_labels(n: int) -> list[str]:
    return [format(i, f"0{n}b") for i in range(1 << n)]


def trajectory_rows(traj):
    for t, row in enumerate(traj.probabilities):
        yield [t, *row]


def write_trajectory_csv(traj, path) -> None:
    header = ["step"] + [f"p_{b}" for b in basis_labels(traj.n_qubits)]
    write_csv(path, header, trajectory_rows(traj))


def trajectory_to_dict(traj) -> dict:
    return {
        "nQubits": traj.n_qubits,
        "steps": traj.steps,
        "states": [encode_vector(a) for a in traj.amplitudes],
        "probabilities": [[float(p) for p in row] for row in traj.probabilities],
    }
