"""Plain-text edge lists.

Format: the first non-comment line holds ``n m``; each of the next ``m``
non-comment lines holds ``u v`` (0-indexed, whitespace separated).  Lines
starting with ``#`` are ignored.  The writer emits edges with ``u < v`` in
lexicographic order.
"""

from __future__ import annotations

import io
import os
from typing import TextIO

from .errors import ParameterError
from .graph import Graph


def parse_edgelist(text: str | TextIO) -> Graph:
    stream = io.StringIO(text) if isinstance(text, str) else text
    header = None
    edges = []
    for lineno, raw in enumerate(stream, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if len(fields) != 2:
            raise ParameterError(f"line {lineno}: expected two integers, got {line!r}")
        try:
            a, b = int(fields[0]), int(fields[1])
        except ValueError as exc:
            raise ParameterError(f"line {lineno}: {exc}") from None
        if header is None:
            header = (a, b)
        else:
            edges.append((a, b))
    if header is None:
        raise ParameterError("missing 'n m' header")
    n, m = header
    if len(edges) != m:
        raise ParameterError(f"header announces {m} edges, found {len(edges)}")
    return Graph.from_edges(n, edges)


def format_edgelist(g: Graph) -> str:
    lines = [f"{g.n} {g.m}"]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(lines) + "\n"


def read_edgelist(path: str | os.PathLike) -> Graph:
    with open(path, encoding="utf-8") as fh:
        return parse_edgelist(fh)


def write_edgelist(g: Graph, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_edgelist(g))
