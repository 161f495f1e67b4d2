"""Plain-text and binary formats for sets, points, lines, histograms and graphs."""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from pathlib import Path

import numpy as np

from .incidence import Line, PointSet
from .setalg import INTEGERS, FiniteSet, Universe
from .spectral import SparseGraph


def parse_universe(tag: str) -> Universe:
    kind, _, mod = tag.strip().partition(":")
    return Universe(kind, int(mod) if mod else None)


def _num(text: str):
    f = Fraction(text)
    return f.numerator if f.denominator == 1 else f


# ------------------------------------------------------------------ sets


def dump_set(A: FiniteSet) -> str:
    return "\n".join([f"universe={A.universe.tag()}", *map(str, A)]) + "\n"


def load_set(text: str) -> FiniteSet:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("universe="):
        raise ValueError("missing universe= header")
    u = parse_universe(lines[0][len("universe=") :])
    return FiniteSet((_num(ln) for ln in lines[1:]), u)


# ------------------------------------------------------------------ points and lines


def dump_points(P: PointSet) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["kind", "x", "y", "z"][: 1 + P.dim])
    for pt in P:
        w.writerow([P.universe.tag(), *map(str, pt)])
    return buf.getvalue()


def load_points(text: str) -> PointSet:
    rows = list(csv.reader(io.StringIO(text)))
    header, body = rows[0], rows[1:]
    dim = len(header) - 1
    if header[:1] != ["kind"] or dim not in (2, 3):
        raise ValueError(f"bad point header {header}")
    u = parse_universe(body[0][0]) if body else INTEGERS
    return PointSet((tuple(_num(c) for c in r[1:]) for r in body), u, dim)


def dump_lines(lines) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["kind", "m", "b"])
    for ln in lines:
        w.writerow([ln.kind, "" if ln.m is None else str(ln.m), str(ln.b)])
    return buf.getvalue()


def load_lines(text: str, universe: Universe = INTEGERS) -> list[Line]:
    rows = list(csv.reader(io.StringIO(text)))
    if rows[0] != ["kind", "m", "b"]:
        raise ValueError(f"bad line header {rows[0]}")
    out = []
    for kind, m, b in rows[1:]:
        out.append(Line.vertical(_num(b), universe) if kind == "vertical" else Line.slope(_num(m), _num(b), universe))
    return out


# ------------------------------------------------------------------ histograms


def histogram_csv(counts: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "count"])
    for n, c in sorted((int(n), int(c)) for n, c in counts.items()):
        w.writerow([n, c])
    return buf.getvalue()


# ------------------------------------------------------------------ graphs


def save_graph(G: SparseGraph, path) -> tuple[Path, Path]:
    """Edge list (u < v, two little-endian uint32 each) plus a JSON sidecar."""
    path = Path(path)
    rows = np.repeat(np.arange(G.n, dtype=np.int64), G.degrees())
    keep = rows < G.indices
    edges = np.stack([rows[keep], G.indices[keep]], 1).astype("<u4")
    path.write_bytes(edges.tobytes())
    side = path.with_name(path.name + ".json")
    meta = {
        "vertices": G.n,
        "edges": int(len(edges)),
        "degree": G.degree,
        "payload": None if G.payload is None else [int(v) for v in G.payload],
    }
    side.write_text(json.dumps(meta, sort_keys=True))
    return path, side


def load_graph(path) -> SparseGraph:
    path = Path(path)
    meta = json.loads(path.with_name(path.name + ".json").read_text())
    e = np.frombuffer(path.read_bytes(), dtype="<u4").reshape(-1, 2).astype(np.int64)
    n = meta["vertices"]
    src = np.concatenate([e[:, 0], e[:, 1]])
    dst = np.concatenate([e[:, 1], e[:, 0]])
    order = np.lexsort((dst, src))
    indptr = np.concatenate([[0], np.cumsum(np.bincount(src, minlength=n))])
    payload = None if meta["payload"] is None else np.asarray(meta["payload"], dtype=np.int64)
    return SparseGraph(indptr, dst[order], payload, meta["degree"])
