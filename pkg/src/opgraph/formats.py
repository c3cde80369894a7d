"""On-disk formats: edge lists, labels, pairs, certificates, manifests, CSV.

All writers are deterministic byte-for-byte: fixed field orders, sorted JSON
keys, newline-terminated lines, no timestamps. Digests are sha256 over the
produced bytes.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from pathlib import Path

import numpy as np

from .errors import InputError
from .graph import Graph
from .labels import NodeLabelTable


def write_edges(path, g: Graph) -> None:
    buf = io.StringIO()
    buf.write(f"n {g.n}\n")
    for u, v in g.edges:
        buf.write(f"{u} {v}\n")
    Path(path).write_text(buf.getvalue())


def read_edges(path) -> Graph:
    lines = Path(path).read_text().splitlines()
    if not lines or not lines[0].startswith("n "):
        raise InputError(f"{path}: missing 'n <node_count>' header")
    try:
        n = int(lines[0][2:])
        rows = [tuple(map(int, ln.split())) for ln in lines[1:] if ln.strip()]
    except ValueError as exc:
        raise InputError(f"{path}: malformed edge list ({exc})") from None
    if any(len(r) != 2 for r in rows):
        raise InputError(f"{path}: edge lines must be 'u v'")
    return Graph(n, np.array(rows, dtype=np.int64).reshape(-1, 2))


def write_labels(path, table: NodeLabelTable) -> None:
    Path(path).write_text(table.to_json())


def read_labels(path) -> NodeLabelTable:
    return NodeLabelTable.from_json(Path(path).read_text())


def write_pairs(path, pairs: np.ndarray, w1: np.ndarray, w2: np.ndarray) -> None:
    """One line per pair: `s t <w1> <w2>`; witness column meaning is per-stage
    (base: a x; product: i1 i2; extended: host index twice) and is recorded in
    the stage manifest."""
    buf = io.StringIO()
    for (s, t), a, b in zip(pairs, w1, w2):
        buf.write(f"{s} {t} {a} {b}\n")
    Path(path).write_text(buf.getvalue())


def read_pairs(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    rows = []
    for ln in Path(path).read_text().splitlines():
        if ln.strip():
            rows.append(tuple(map(int, ln.split())))
    if any(len(r) != 4 for r in rows):
        raise InputError(f"{path}: pair lines must be 's t w1 w2'")
    arr = np.array(rows, dtype=np.int64).reshape(-1, 4)
    return arr[:, :2], arr[:, 2], arr[:, 3]


def write_certificates(path, certificates: np.ndarray) -> None:
    """Per pair: `pair_index : u1 v1 ; u2 v2 ; ...` in canonical order."""
    buf = io.StringIO()
    for i, cert in enumerate(certificates):
        parts = " ; ".join(f"{u} {v}" for u, v in cert)
        buf.write(f"{i} : {parts}\n")
    Path(path).write_text(buf.getvalue())


def read_certificates(path) -> np.ndarray:
    certs = []
    for ln in Path(path).read_text().splitlines():
        if not ln.strip():
            continue
        idx_part, _, rest = ln.partition(":")
        if int(idx_part) != len(certs):
            raise InputError(f"{path}: certificate lines out of order")
        edges = []
        for chunk in rest.split(";"):
            u, v = map(int, chunk.split())
            edges.append((u, v))
        certs.append(edges)
    return np.array(certs, dtype=np.int64)


def dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def write_json(path, obj) -> None:
    Path(path).write_text(dump_json(obj))


def read_json(path):
    return json.loads(Path(path).read_text())


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_stretch_csv(path, rows) -> None:
    """rows: iterable of (pair_index, base_dist, sub_dist, stretch); infinite
    values are written as 'inf' and unreachable sub-distances as -1."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["pair_index", "base_dist", "sub_dist", "stretch"])
        for idx, base, sub, stretch in rows:
            w.writerow([idx, base, sub, "inf" if stretch == float("inf") else stretch])


def read_stretch_csv(path):
    out = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["pair_index", "base_dist", "sub_dist", "stretch"]:
            raise InputError(f"{path}: unexpected stretch header {header}")
        for idx, base, sub, stretch in reader:
            out.append((int(idx), int(base), int(sub), float(stretch)))
    return out
