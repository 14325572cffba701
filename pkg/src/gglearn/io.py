"""File formats: edge lists, matrix/signal CSVs, and 17-digit JSON.

Every float is written with 17 significant digits so text round-trips are
exact and repeated runs are byte-identical.
"""

import json

import numpy as np


def fmt(x):
    """A float as text with 17 significant digits (exact round trip)."""
    return format(float(x), ".17g")


def dumps_json17(obj, indent=0):
    """Deterministic JSON with floats rendered at 17 significant digits.

    Supports dicts (keys written in insertion order), lists, strings,
    ints, floats, bools and None; numpy scalars and arrays are converted.
    """
    pad = " " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = ",\n".join(
            f'{pad}  {json.dumps(str(k))}: {dumps_json17(v, indent + 2)}'
            for k, v in obj.items())
        return "{\n" + items + "\n" + pad + "}"
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = ", ".join(dumps_json17(v, indent) for v in obj)
        return "[" + items + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def save_matrix_csv(path, a):
    """Write a 2-D array as comma-separated rows at 17 significant digits."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D array, got shape {a.shape}")
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for row in a:
            handle.write(",".join(fmt(x) for x in row) + "\n")


def load_matrix_csv(path):
    """Read a rectangular CSV of reals; errors carry the offending line."""
    rows = []
    width = None
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                row = [float(tok) for tok in line.split(",")]
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise ValueError(
                    f"{path}:{lineno}: expected {width} columns, got {len(row)}")
            rows.append(row)
    if not rows:
        raise ValueError(f"{path}:1: file contains no data")
    return np.array(rows)


def save_edge_list(path, w, undirected=True):
    """Write the nonzero entries of an adjacency as an edge list.

    Undirected mode writes each pair once (i < j) and requires a symmetric
    matrix. The weight column is omitted when every weight equals one.
    """
    w = np.asarray(w, dtype=float)
    if undirected and not np.array_equal(w, w.T):
        raise ValueError("undirected save requires a symmetric matrix")
    rows, cols = np.nonzero(np.triu(w, 1) if undirected else w)
    weighted = any(w[i, j] != 1.0 for i, j in zip(rows, cols))
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for i, j in zip(rows.tolist(), cols.tolist()):
            if i == j:
                continue
            if weighted:
                handle.write(f"{i} {j} {fmt(w[i, j])}\n")
            else:
                handle.write(f"{i} {j}\n")


def load_edge_list(path, undirected=True, num_nodes=None):
    """Read an edge list: ``u v [weight]`` per line, ``#`` comments.

    Node ids are 0-based integers; self-loops are rejected. Undirected
    mode mirrors each edge. The node count is ``num_nodes`` or one plus
    the largest id seen.
    """
    edges = []
    max_node = -1
    saw_line = False
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            saw_line = True
            parts = line.split()
            if len(parts) not in (2, 3):
                raise ValueError(
                    f"{path}:{lineno}: expected 'u v [weight]', got {raw!r}")
            try:
                u, v = int(parts[0]), int(parts[1])
                weight = float(parts[2]) if len(parts) == 3 else 1.0
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
            if u < 0 or v < 0:
                raise ValueError(f"{path}:{lineno}: negative node id")
            if u == v:
                raise ValueError(f"{path}:{lineno}: self-loop {u} {v} rejected")
            edges.append((u, v, weight))
            max_node = max(max_node, u, v)
    if not saw_line:
        raise ValueError(f"{path}:1: edge list is empty")
    n = num_nodes if num_nodes is not None else max_node + 1
    if max_node >= n:
        raise ValueError(f"node id {max_node} exceeds num_nodes={n}")
    w = np.zeros((n, n))
    for u, v, weight in edges:
        w[u, v] = weight
        if undirected:
            w[v, u] = weight
    return w
