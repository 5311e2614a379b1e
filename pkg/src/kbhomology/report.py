"""Report bundle and its text / JSON renderings."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from .tables import DimVector, HodgeDiamond, PageTable

SCOPE_TEXT = {
    "manifold": "manifold dimensions (nilpotent model, invariant forms compute the compact quotient)",
    "invariant-model": "invariant-model dimensions (model is not nilpotent, no comparison theorem applied)",
}


@dataclass
class Report:
    command: str
    model: Optional[str] = None
    n: Optional[int] = None
    pi: Optional[str] = None
    scope: Optional[str] = None
    hodge: Optional[HodgeDiamond] = None
    kb: Optional[DimVector] = None
    lp: Optional[DimVector] = None
    pages: List[PageTable] = field(default_factory=list)
    checks: Dict[str, Any] = field(default_factory=dict)
    timing: Dict[str, float] = field(default_factory=dict)


def _page_grid(pg: PageTable, values: Dict) -> List[List[int]]:
    return [[values.get((s, t), 0) for t in range(pg.n + 1)] for s in range(pg.n + 1)]


def to_json(rep: Report) -> Dict[str, Any]:
    return {
        "command": rep.command,
        "model": rep.model,
        "n": rep.n,
        "pi": rep.pi,
        "scope": rep.scope,
        "hodge": rep.hodge.as_lists() if rep.hodge else None,
        "kb": rep.kb.as_list() if rep.kb else None,
        "lp": rep.lp.as_list() if rep.lp else None,
        "pages": [
            {"r": pg.r, "e": _page_grid(pg, pg.e), "d_ranks": _page_grid(pg, pg.d_ranks)}
            for pg in rep.pages
        ]
        if rep.pages
        else None,
        "checks": rep.checks,
    }


# ---------------------------------------------------------------------------
# text


def render_diamond(h: HodgeDiamond) -> List[str]:
    """Pyramid layout: ``h^{0,0}`` on top, ``h^{n,n}`` at the bottom."""
    rows = h.pyramid_rows()
    w = max(len(str(x)) for r in rows for x in r)
    cell = w + 1 if (w + 1) % 2 == 0 else w + 2
    gap = " " * (cell - w)
    width = h.n + 1
    out = []
    for r in rows:
        indent = " " * ((width - len(r)) * cell // 2)
        out.append(indent + gap.join(f"{x:>{w}}" for x in r))
    return out


def render_columns(headers: List[str], columns: List[List[int]]) -> List[str]:
    """Aligned rows ``k | col1 | col2 ...``."""
    length = max(len(c) for c in columns)
    cells = [["k"] + headers]
    for k in range(length):
        cells.append([str(k)] + [str(c[k]) if k < len(c) else "" for c in columns])
    widths = [max(len(row[i]) for row in cells) for i in range(len(cells[0]))]
    return ["  ".join(v.rjust(wd) for v, wd in zip(row, widths)).rstrip() for row in cells]


def render_page(pg: PageTable) -> List[str]:
    n = pg.n
    grid = _page_grid(pg, pg.e)
    w = max(len(str(x)) for row in grid for x in row)
    w = max(w, len(str(n)))
    head = "s\\t".rjust(3) + " " + " ".join(f"{t:>{w}}" for t in range(n + 1))
    out = [f"E_{pg.r}  (s = n - p, t = q; d_{pg.r} has bidegree ({pg.r}, {1 - pg.r}))", head]
    for s in range(n + 1):
        out.append(f"{s:>3} " + " ".join(f"{x:>{w}}" for x in grid[s]))
    nz = pg.nonzero_differentials()
    if nz:
        arrows = ", ".join(
            f"({s},{t})->({s + pg.r},{t + 1 - pg.r}): {pg.d_ranks[(s, t)]}" for s, t in nz
        )
        out.append(f"rank d_{pg.r}: {arrows}")
    else:
        out.append(f"d_{pg.r} = 0")
    return out


def _fmt_value(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, list):
        return ", ".join(_fmt_value(x) for x in v)
    if isinstance(v, dict):
        return ", ".join(f"{k}: {_fmt_value(x)}" for k, x in v.items())
    return str(v)


def render_text(rep: Report) -> str:
    out: List[str] = []
    if rep.model is not None:
        out.append(f"model  {rep.model} (n = {rep.n})")
    elif rep.n is not None:
        out.append(f"{rep.command}  (n = {rep.n})")
    if rep.pi is not None:
        out.append(f"pi     {rep.pi}")
    if rep.scope is not None:
        out.append(f"scope  {SCOPE_TEXT[rep.scope]}")
    if rep.hodge is not None:
        out.append("")
        out.append("Hodge numbers h^{p,q} (row m holds p + q = m, p decreasing)")
        out.extend(render_diamond(rep.hodge))
    headers, cols = [], []
    if rep.kb is not None:
        headers.append("dim H_k (KB)")
        cols.append(rep.kb.as_list())
    if rep.lp is not None:
        headers.append("dim H^k (LP)")
        cols.append(rep.lp.as_list())
    if cols:
        out.append("")
        out.extend(render_columns(headers, cols))
    for pg in rep.pages:
        out.append("")
        out.extend(render_page(pg))
    if rep.checks:
        out.append("")
        out.append("checks")
        w = max(len(k) for k in rep.checks)
        for k, v in rep.checks.items():
            out.append(f"  {k.ljust(w)}  {_fmt_value(v)}")
    while out and out[0] == "":
        out.pop(0)
    return "\n".join(out) + "\n"


def render(rep: Report, fmt: str = "text") -> str:
    if fmt == "json":
        return json.dumps(to_json(rep), indent=2) + "\n"
    if fmt == "text":
        return render_text(rep)
    raise ValueError(f"unknown format {fmt!r}")
