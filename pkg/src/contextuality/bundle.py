"""Bundle diagrams of two-measurement contexts, emitted as DOT text."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import UnsupportedShapeError
from .scenario import Context, EmpiricalModel, Result, format_fraction, require_valid


@dataclass(frozen=True)
class BundleGraph:
    base_vertices: tuple[str, ...]
    base_edges: tuple[Context, ...]
    fibres: dict[str, tuple[str, ...]]
    sections: tuple[tuple[Context, Result, Fraction], ...]


def bundle_graph(model: EmpiricalModel) -> BundleGraph:
    require_valid(model)
    sc = model.scenario
    bad = [list(c) for c in sc.contexts if len(c) != 2]
    if bad:
        raise UnsupportedShapeError(f"bundle diagrams need contexts of exactly two measurements; got {bad}")
    sections = tuple((ctx, r, p) for ctx, r, p in model.cells())
    return BundleGraph(sc.measurements, sc.contexts, dict(sc.outcomes), sections)


def base_cycle(graph: BundleGraph) -> list[str] | None:
    """The base vertices in cycle order, when the base graph is one cycle."""
    nbrs: dict[str, list[str]] = {m: [] for m in graph.base_vertices}
    for a, b in graph.base_edges:
        nbrs[a].append(b)
        nbrs[b].append(a)
    if len(graph.base_vertices) < 3 or any(len(v) != 2 for v in nbrs.values()):
        return None
    start = graph.base_vertices[0]
    order = [start]
    prev, cur = start, min(nbrs[start])
    while cur != start:
        order.append(cur)
        nxt = [v for v in nbrs[cur] if v != prev]
        prev, cur = cur, nxt[0]
    return order if len(order) == len(graph.base_vertices) else None


def _q(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(graph: BundleGraph) -> str:
    cycle = base_cycle(graph)
    lines = ["graph bundle {"]
    if cycle:
        lines.append(f"  // layout: base cycle {' -- '.join(cycle)}")
    else:
        lines.append("  // layout: base vertices in measurement order")
    lines.append("  // base graph")
    for m in graph.base_vertices:
        lines.append(f"  {_q(m)} [shape=box];")
    for a, b in graph.base_edges:
        lines.append(f"  {_q(a)} -- {_q(b)} [kind=base, penwidth=2];")
    lines.append("  // fibres")
    for m in graph.base_vertices:
        for o in graph.fibres[m]:
            lines.append(f"  {_q(f'{m}={o}')} [label={_q(o)}, fibre={_q(m)}];")
    lines.append("  // sections: solid when supported, dashed at probability 0")
    for ctx, r, p in graph.sections:
        a, b = (f"{m}={o}" for m, o in zip(ctx, r))
        style = "solid" if p > 0 else "dashed"
        lines.append(f"  {_q(a)} -- {_q(b)} [probability={_q(format_fraction(p))}, style={style}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
