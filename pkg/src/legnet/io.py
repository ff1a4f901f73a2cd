"""Readers and writers: edge lists, attribute CSVs, GraphML and DOT export.

Canonical edge CSV: header ``source,target,weight``, UTF-8, one directed
edge per row. The upstream JSON adapter consumes per-node out-neighbor
and out-weight arrays; its field names are configurable because the
distribution schema is not fixed here.
"""

from __future__ import annotations

import csv
import io as _io
import json
import warnings
from pathlib import Path
from typing import Any, IO, Mapping

from .attributes import AttributeTable, CATEGORICAL_COLUMNS, NUMERIC_COLUMNS
from .errors import ConfigError, DataError
from .graph import Graph

UPSTREAM_FIELD_DEFAULTS = {
    "nodes": "usernameList",
    "targets": "outList",
    "weights": "outWeight",
}


def _as_text(source: str | Path | bytes | IO) -> str:
    if isinstance(source, Path):
        try:
            return source.read_text(encoding="utf-8")
        except OSError as exc:
            raise DataError(f"cannot read {source}: {exc}") from None
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, str):
        # Literal document content, not a path: blank, multi-line, or a
        # one-line JSON value. Paths contain none of those.
        if not source.strip() or "\n" in source or source.lstrip()[0] in "{[":
            return source
        return _as_text(Path(source))
    data = source.read()
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return data


def load_edge_list(source: str | Path | bytes | IO,
                   format: str = "csv",
                   json_fields: Mapping[str, str] | None = None) -> Graph:
    """Parse an edge list into a validated Graph.

    format "csv" reads the canonical edge CSV; "upstream-json" reads a
    per-node adjacency document (see UPSTREAM_FIELD_DEFAULTS for the
    key names, overridable via `json_fields`).
    """
    text = _as_text(source)
    if format == "csv":
        return _edges_from_csv(text)
    if format == "upstream-json":
        return _edges_from_upstream_json(text, json_fields)
    raise ConfigError(f"unknown edge list format {format!r}")


def _edges_from_csv(text: str) -> Graph:
    if not text.strip():
        raise DataError("no nodes: empty edge stream")
    reader = csv.reader(_io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise DataError("no nodes: empty edge stream") from None
    header = [h.strip() for h in header]
    for required in ("source", "target", "weight"):
        if required not in header:
            raise DataError(f"edge CSV header missing column {required!r}")
    si, ti, wi = header.index("source"), header.index("target"), header.index("weight")

    edges = []
    for line_no, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) <= max(si, ti, wi):
            raise DataError(f"line {line_no}: expected {len(header)} fields, got {len(row)}")
        s, t, w = row[si].strip(), row[ti].strip(), row[wi].strip()
        if not s or not t:
            raise DataError(f"line {line_no}: empty node identifier")
        try:
            weight = float(w)
        except ValueError:
            raise DataError(f"line {line_no}: weight {w!r} is not a number") from None
        edges.append((s, t, weight))
    if not edges:
        raise DataError("no nodes: edge stream has a header but no rows")
    return Graph(edges)


def _edges_from_upstream_json(text: str,
                              json_fields: Mapping[str, str] | None) -> Graph:
    fields = dict(UPSTREAM_FIELD_DEFAULTS)
    fields.update(json_fields or {})
    try:
        doc: Any = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DataError(f"upstream JSON parse failure: {exc}") from None
    if isinstance(doc, list):
        if not doc:
            raise DataError("no nodes: empty upstream document")
        doc = doc[0]
    if not isinstance(doc, dict):
        raise DataError("upstream document is not an object")

    try:
        ids = doc[fields["nodes"]]
        targets = doc[fields["targets"]]
        weights = doc[fields["weights"]]
    except KeyError as exc:
        raise DataError(f"upstream document missing field {exc.args[0]!r}") from None
    if not ids:
        raise DataError("no nodes: empty node list")
    if not (len(ids) == len(targets) == len(weights)):
        raise DataError("upstream node/target/weight arrays differ in length")

    edges = []
    for i, (node, outs, wts) in enumerate(zip(ids, targets, weights)):
        if len(outs) != len(wts):
            raise DataError(f"node {node!r}: {len(outs)} targets but {len(wts)} weights")
        for j, w in zip(outs, wts):
            if isinstance(j, int):
                if not (0 <= j < len(ids)):
                    raise DataError(f"node {node!r}: target index {j} out of range")
                target = ids[j]
            else:
                target = j
            edges.append((node, target, float(w)))
    return Graph(edges, nodes=ids)


def save_edge_list(graph: Graph, path: str | Path) -> None:
    """Write the canonical edge CSV; weights round-trip exactly."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["source", "target", "weight"])
        for s, t, w in graph.edge_records():
            writer.writerow([s, t, repr(w)])


def load_attributes(source: str | Path | bytes | IO, graph: Graph) -> AttributeTable:
    """Read the attribute CSV and align its rows to graph indices.

    Known columns beyond node_id: party, chamber, state, race,
    ethnicity, religion, sex, lgbtq (categorical) and age, tenure
    (numeric). Unknown columns are ignored with a warning; absent
    optional columns simply stay unloaded.
    """
    text = _as_text(source)
    reader = csv.DictReader(_io.StringIO(text))
    if reader.fieldnames is None:
        raise DataError("attribute stream is empty")
    names = [h.strip() for h in reader.fieldnames]
    if "node_id" not in names:
        raise DataError("attribute CSV header missing column 'node_id'")
    known = set(CATEGORICAL_COLUMNS) | set(NUMERIC_COLUMNS) | {"node_id"}
    unknown = [h for h in names if h not in known]
    if unknown:
        warnings.warn(f"ignoring unknown attribute columns: {', '.join(unknown)}")
    cat_cols = [h for h in names if h in CATEGORICAL_COLUMNS]
    num_cols = [h for h in names if h in NUMERIC_COLUMNS]

    n = graph.n
    cat_data: dict[str, list[str | None]] = {c: [None] * n for c in cat_cols}
    num_data: dict[str, list[float]] = {c: [0.0] * n for c in num_cols}
    seen = [False] * n
    rows = 0
    for line_no, row in enumerate(reader, start=2):
        rows += 1
        node = (row.get("node_id") or "").strip()
        if node not in graph:
            raise DataError(f"line {line_no}: node_id {node!r} absent from graph")
        i = graph.index_of(node)
        if seen[i]:
            raise DataError(f"line {line_no}: duplicated node_id {node!r}")
        seen[i] = True
        for c in cat_cols:
            cat_data[c][i] = (row.get(c) or "").strip()
        for c in num_cols:
            raw = (row.get(c) or "").strip()
            try:
                num_data[c][i] = float(raw)
            except ValueError:
                raise DataError(
                    f"line {line_no}: {c} value {raw!r} is not numeric") from None
    if rows != n or not all(seen):
        raise DataError(f"attribute/graph mismatch: {rows} rows for {n} nodes")
    return AttributeTable(graph.node_ids, cat_data, num_data)


# -- exports ------------------------------------------------------------------


def _xml_escape(value: str) -> str:
    return (value.replace("&", "&amp;").replace("<", "&lt;")
            .replace(">", "&gt;").replace('"', "&quot;"))


def graphml_dump(graph: Graph, attrs: AttributeTable | None = None) -> str:
    """Serialize the graph (and any attributes) as GraphML."""
    lines = ['<?xml version="1.0" encoding="UTF-8"?>',
             '<graphml xmlns="http://graphml.graphdrawing.org/xmlns">',
             '  <key id="weight" for="edge" attr.name="weight" attr.type="double"/>']
    columns: list[tuple[str, str]] = []
    if attrs is not None:
        for c in attrs.categorical_columns:
            columns.append((c, "string"))
        for c in attrs.numeric_columns:
            columns.append((c, "double"))
        for c, kind in columns:
            lines.append(f'  <key id="{c}" for="node" attr.name="{c}" attr.type="{kind}"/>')
    lines.append('  <graph id="G" edgedefault="directed">')
    for i, node in enumerate(graph.node_ids):
        nid = _xml_escape(str(node))
        if attrs is None or not columns:
            lines.append(f'    <node id="{nid}"/>')
            continue
        lines.append(f'    <node id="{nid}">')
        for c, kind in columns:
            if kind == "string":
                val = _xml_escape(attrs.categorical(c)[i])
            else:
                val = repr(float(attrs.numeric(c)[i]))
            lines.append(f'      <data key="{c}">{val}</data>')
        lines.append('    </node>')
    for s, t, w in graph.edge_records():
        lines.append(f'    <edge source="{_xml_escape(str(s))}" '
                     f'target="{_xml_escape(str(t))}">'
                     f'<data key="weight">{w!r}</data></edge>')
    lines.append('  </graph>')
    lines.append('</graphml>')
    return "\n".join(lines) + "\n"


def dot_dump(graph: Graph, attrs: AttributeTable | None = None) -> str:
    """Serialize the graph (and any attributes) in DOT syntax."""
    def q(value: Any) -> str:
        return '"' + str(value).replace('"', r'\"') + '"'

    lines = ["digraph G {"]
    for i, node in enumerate(graph.node_ids):
        parts = []
        if attrs is not None:
            for c in attrs.categorical_columns:
                parts.append(f"{c}={q(attrs.categorical(c)[i])}")
            for c in attrs.numeric_columns:
                parts.append(f"{c}={repr(float(attrs.numeric(c)[i]))}")
        suffix = f" [{', '.join(parts)}]" if parts else ""
        lines.append(f"  {q(node)}{suffix};")
    for s, t, w in graph.edge_records():
        lines.append(f"  {q(s)} -> {q(t)} [weight={w!r}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def save_graphml(graph: Graph, path: str | Path,
                 attrs: AttributeTable | None = None) -> None:
    Path(path).write_text(graphml_dump(graph, attrs), encoding="utf-8")


def save_dot(graph: Graph, path: str | Path,
             attrs: AttributeTable | None = None) -> None:
    Path(path).write_text(dot_dump(graph, attrs), encoding="utf-8")
