"""DOT and TSV writers. Output ordering is fixed so files diff cleanly."""
from __future__ import annotations

from typing import Iterable

from .dag import Dag
from .forest import Forest
from .metrics import VertexMetrics
from .temporal import AgreementReport, PrecedenceEntry, physical_order, Direction


def _q(name: str) -> str:
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def forest_to_dot(f: Forest, name: str = "forest") -> str:
    lines = [f"graph {name} {{"]
    for v in sorted(f.vertices):
        lines.append(f"  {_q(v)};")
    for u, v in sorted(tuple(sorted(e)) for e in f.edges):
        lines.append(f"  {_q(u)} -- {_q(v)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def dag_to_dot(g: Dag, report: AgreementReport | None = None, name: str = "dag") -> str:
    """Directed arcs, plus a dashed undirected line per decided arc running
    from the item visited first to the one visited later."""
    lines = [f"digraph {name} {{"]
    for v in sorted(g.vertices):
        lines.append(f"  {_q(v)};")
    for u, v in sorted(g.arcs):
        lines.append(f"  {_q(u)} -> {_q(v)};")
    if report is not None:
        dashed = []
        for a in report.arcs:
            if a.verdict == "agree":
                dashed.append((a.parent, a.child))
            elif a.verdict == "disagree":
                dashed.append((a.child, a.parent))
        for first, later in sorted(dashed):
            lines.append(f"  {_q(first)} -> {_q(later)} [style=dashed, dir=none, "
                         f'label="visited first: {first}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _num(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else f"{x:.6g}"


def metrics_tsv(rows: Iterable[VertexMetrics]) -> str:
    out = ["node\tdegree\tbetweenness\tcloseness"]
    for r in rows:
        out.append(f"{r.vertex}\t{r.degree}\t{_num(r.betweenness)}\t{r.closeness:.2f}")
    return "\n".join(out) + "\n"


def agreement_tsv(report: AgreementReport) -> str:
    out = ["parent\tchild\tn_parent_first\tn_child_first\tn_tied\tverdict"]
    for a in report.arcs:
        out.append(f"{a.parent}\t{a.child}\t{a.n_parent_first}\t{a.n_child_first}"
                   f"\t{a.n_tied}\t{a.verdict}")
    return "\n".join(out) + "\n"


def precedence_tsv(entries: Iterable[PrecedenceEntry]) -> str:
    out = ["item_i\titem_j\tn_i_first\tn_j_first\tn_tied\tn_both\torder"]
    for e in entries:
        d = physical_order(e)
        order = {Direction.FORWARD: f"{e.i}<{e.j}", Direction.BACKWARD: f"{e.j}<{e.i}",
                 Direction.UNORDERED: "unordered"}[d]
        out.append(f"{e.i}\t{e.j}\t{e.n_i_first}\t{e.n_j_first}\t{e.n_tied}\t{e.n_both}\t{order}")
    return "\n".join(out) + "\n"
