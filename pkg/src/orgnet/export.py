"""GraphML and DOT writers.

Output is a pure function of the inputs: nodes and edges are written in
graph order and floats with ``repr`` so repeated runs are byte-identical.
"""
from __future__ import annotations

from typing import Any, Mapping
from xml.sax.saxutils import escape, quoteattr

from .graph import EmailGraph

NodeAttrs = Mapping[str, Mapping[str, Any]]
EdgeAttrs = Mapping[tuple[str, str], Mapping[str, Any]]


def xml_escape(text: str) -> str:
    return escape(text, {'"': "&quot;"})


def _graphml_type(value: Any) -> str:
    if isinstance(value, bool):
        return "boolean"
    if isinstance(value, int):
        return "long"
    if isinstance(value, float):
        return "double"
    return "string"


def _fmt(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def to_graphml(graph: EmailGraph, node_attrs: NodeAttrs | None = None, edge_attrs: EdgeAttrs | None = None) -> str:
    node_attrs = node_attrs or {}
    edge_attrs = edge_attrs or {}
    node_keys: dict[str, str] = {"kind": "string"}
    for attrs in node_attrs.values():
        for k, v in attrs.items():
            node_keys.setdefault(k, _graphml_type(v))
    edge_keys: dict[str, str] = {"weight": "long"}
    for attrs in edge_attrs.values():
        for k, v in attrs.items():
            edge_keys.setdefault(k, _graphml_type(v))

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<graphml xmlns="http://graphml.graphdrawing.org/xmlns">',
    ]
    for k, t in node_keys.items():
        lines.append(f'  <key id="n_{k}" for="node" attr.name="{k}" attr.type="{t}"/>')
    for k, t in edge_keys.items():
        lines.append(f'  <key id="e_{k}" for="edge" attr.name="{k}" attr.type="{t}"/>')
    lines.append(f'  <graph id="G" edgedefault="{"directed" if graph.directed else "undirected"}">')
    for i, v in enumerate(graph.nodes):
        lines.append(f"    <node id={quoteattr(v)}>")
        lines.append(f'      <data key="n_kind">{xml_escape(graph.kinds[i])}</data>')
        for k, val in node_attrs.get(v, {}).items():
            lines.append(f'      <data key="n_{k}">{xml_escape(_fmt(val))}</data>')
        lines.append("    </node>")
    for u, v, w in graph.edges():
        lines.append(f"    <edge source={quoteattr(u)} target={quoteattr(v)}>")
        lines.append(f'      <data key="e_weight">{w}</data>')
        for k, val in edge_attrs.get((u, v), {}).items():
            lines.append(f'      <data key="e_{k}">{xml_escape(_fmt(val))}</data>')
        lines.append("    </edge>")
    lines += ["  </graph>", "</graphml>"]
    return "\n".join(lines) + "\n"


def _dot_id(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _dot_attrs(attrs: Mapping[str, Any]) -> str:
    if not attrs:
        return ""
    return " [" + ", ".join(f"{k}={_dot_id(_fmt(v))}" for k, v in attrs.items()) + "]"


def to_dot(graph: EmailGraph, node_attrs: NodeAttrs | None = None, edge_attrs: EdgeAttrs | None = None) -> str:
    node_attrs = node_attrs or {}
    edge_attrs = edge_attrs or {}
    arrow = "->" if graph.directed else "--"
    lines = [("digraph" if graph.directed else "graph") + " G {"]
    for i, v in enumerate(graph.nodes):
        attrs = {"kind": graph.kinds[i], **node_attrs.get(v, {})}
        if "x" in attrs and "y" in attrs:
            attrs["pos"] = f"{attrs['x']!r},{attrs['y']!r}"
        lines.append(f"  {_dot_id(v)}{_dot_attrs(attrs)};")
    for u, v, w in graph.edges():
        attrs = {"weight": w, **edge_attrs.get((u, v), {})}
        lines.append(f"  {_dot_id(u)} {arrow} {_dot_id(v)}{_dot_attrs(attrs)};")
    lines.append("}")
    return "\n".join(lines) + "\n"
