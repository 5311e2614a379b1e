"""Line-oriented model files.

Grammar (``#`` starts a comment, ``;`` separates statements on one line)::

    model <ident>
    dim <n>
    d w<k> = <2form>          e.g.  d w2 = - w1^w3
    pi = <bivector>           e.g.  pi = X1^X2 + 2i X2^X3

A term is ``[+|-] [coef] [*] w<i>^w<j>`` (or ``X<i>^X<j>``) with ``i < j``;
``coef`` is an integer or fraction optionally followed by ``i``, or a bare
``i``.  Generators without a ``d`` line are closed.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .exterior import Form, Polyvector, mask_indices
from .linalg import GaussianRational
from .lie_model import LieModel


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<sign>[+-])
  | (?P<coef>(?:\d+(?:/\d+)?)?i(?![A-Za-z0-9_])|\d+(?:/\d*)?)
  | (?P<gen>[A-Za-z]+\d+)
  | (?P<wedge>\^)
  | (?P<star>\*)
    """,
    re.VERBOSE,
)

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_.\-]*$")


def _coef(text: str, line: int, col: int) -> GaussianRational:
    imag = text.endswith("i")
    body = text[:-1] if imag else text
    if body == "":
        val = Fraction(1)
    else:
        if body.endswith("/"):
            raise ParseError(f"malformed coefficient {text!r}", line, col)
        num, _, den = body.partition("/")
        if den and int(den) == 0:
            raise ParseError(f"zero denominator in coefficient {text!r}", line, col)
        val = Fraction(int(num), int(den) if den else 1)
    return GaussianRational(0, val) if imag else GaussianRational(val)


def parse_wedge_sum(
    text: str, n: int, letter: str, line: int = 1, col0: int = 1
) -> Dict[Tuple[int, int], GaussianRational]:
    """Parse ``± coef L<i>^L<j> ...`` into ``{(i, j): coeff}`` (duplicates add up)."""
    toks: List[Tuple[str, str, int]] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col0 + pos)
        kind = m.lastgroup
        if kind != "ws":
            toks.append((kind, m.group(), col0 + pos))
        pos = m.end()
    end_col = col0 + len(text)
    if not toks:
        raise ParseError("empty expression", line, end_col)

    out: Dict[Tuple[int, int], GaussianRational] = {}
    i = 0

    def peek(kind):
        return i < len(toks) and toks[i][0] == kind

    def expect_gen():
        nonlocal i
        if not peek("gen"):
            col = toks[i][2] if i < len(toks) else end_col
            got = repr(toks[i][1]) if i < len(toks) else "end of line"
            raise ParseError(f"expected a generator {letter}<k>, got {got}", line, col)
        _, word, col = toks[i]
        i += 1
        m = re.fullmatch(r"([A-Za-z]+)(\d+)", word)
        name, idx = m.group(1), int(m.group(2))
        if name != letter or not (1 <= idx <= n):
            raise ParseError(f"unknown generator {word!r} (expected {letter}1..{letter}{n})", line, col)
        return idx, col

    first = True
    while i < len(toks):
        sign = 1
        if peek("sign"):
            sign = -1 if toks[i][1] == "-" else 1
            i += 1
        elif not first:
            raise ParseError(f"expected '+' or '-', got {toks[i][1]!r}", line, toks[i][2])
        coeff = GaussianRational(1)
        if peek("coef"):
            coeff = _coef(toks[i][1], line, toks[i][2])
            i += 1
            if peek("star"):
                i += 1
        a, col_a = expect_gen()
        if not peek("wedge"):
            col = toks[i][2] if i < len(toks) else end_col
            raise ParseError("expected '^' between generators", line, col)
        i += 1
        b, _ = expect_gen()
        if a >= b:
            raise ParseError(f"wedge term {letter}{a}^{letter}{b} must have increasing indices", line, col_a)
        out[(a, b)] = out.get((a, b), GaussianRational(0)) + coeff * sign
        first = False
    return {k: v for k, v in out.items() if v}


def parse_pi(text: str, n: int, line: int = 1, col0: int = 1) -> Polyvector:
    """Parse a bivector expression such as ``X1^X2 + X2^X3``."""
    if text.strip() in ("0", ""):
        return Polyvector.zero(n)
    return Polyvector.bivector(n, parse_wedge_sum(text, n, "X", line, col0))


def _two_form(n: int, terms: Dict[Tuple[int, int], GaussianRational]) -> Form:
    f = Form.zero(n)
    for (a, b), c in terms.items():
        f = f + Form.monomial(n, hol=(a, b), coeff=c)
    return f


def _statements(text: str):
    """Yield ``(line, column, stripped statement)``."""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        start = 0
        for piece in body.split(";"):
            lead = len(piece) - len(piece.lstrip())
            stmt = piece.strip()
            if stmt:
                yield lineno, start + lead + 1, stmt
            start += len(piece) + 1


def parse_model(text: str) -> Tuple[LieModel, Optional[Polyvector]]:
    """Parse a model file into a :class:`LieModel` and an optional bivector."""
    name = None
    n = None
    d_lines: Dict[int, Form] = {}
    pi: Optional[Polyvector] = None
    last = (1, 1)
    for line, col, stmt in _statements(text):
        last = (line, col)
        m = re.fullmatch(r"model\s+(\S+)", stmt)
        if m:
            if name is not None:
                raise ParseError("duplicate 'model' header", line, col)
            if not _IDENT.match(m.group(1)):
                raise ParseError(f"invalid model name {m.group(1)!r}", line, col + stmt.index(m.group(1)))
            name = m.group(1)
            continue
        m = re.fullmatch(r"dim\s+(\S+)", stmt)
        if m:
            if n is not None:
                raise ParseError("duplicate 'dim' header", line, col)
            if not re.fullmatch(r"\d+", m.group(1)) or int(m.group(1)) < 1:
                raise ParseError(f"dimension must be a positive integer, got {m.group(1)!r}", line, col + 4)
            n = int(m.group(1))
            continue
        m = re.match(r"d\s*w(\d+)\s*=", stmt)
        if m:
            if n is None:
                raise ParseError("'dim' must come before structure equations", line, col)
            k = int(m.group(1))
            if not (1 <= k <= n):
                raise ParseError(f"unknown generator w{k} (expected w1..w{n})", line, col + stmt.index("w"))
            if k in d_lines:
                raise ParseError(f"duplicate structure equation for w{k}", line, col)
            rhs = stmt[m.end():]
            terms = parse_wedge_sum(rhs, n, "w", line, col + m.end())
            d_lines[k] = _two_form(n, terms)
            continue
        m = re.match(r"pi\s*=", stmt)
        if m:
            if n is None:
                raise ParseError("'dim' must come before 'pi'", line, col)
            if pi is not None:
                raise ParseError("duplicate 'pi' line", line, col)
            pi = parse_pi(stmt[m.end():], n, line, col + m.end())
            continue
        raise ParseError(f"unrecognised statement {stmt.split()[0]!r}", line, col)
    if name is None:
        raise ParseError("missing 'model <name>' header", *last)
    if n is None:
        raise ParseError("missing 'dim <n>' header", *last)
    return LieModel(name, n, d_lines), pi


# ---------------------------------------------------------------------------
# rendering


def _fmt_rational(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _render_terms(items: List[Tuple[str, GaussianRational]]) -> str:
    """Grammar-conformant sum; complex coefficients split into two terms."""
    parts = []
    for label, c in items:
        for val, suffix in ((c.re, ""), (c.im, "i")):
            if val == 0:
                continue
            sign = "-" if val < 0 else "+"
            mag = abs(val)
            coef = ("" if mag == 1 else _fmt_rational(mag)) + suffix
            body = f"{coef} {label}" if coef else label
            parts.append((sign, body))
    if not parts:
        return "0"
    out = []
    for idx, (sign, body) in enumerate(parts):
        if idx == 0:
            out.append(f"- {body}" if sign == "-" else body)
        else:
            out.append(f" {sign} {body}")
    return "".join(out)


def render_two_form(f: Form) -> str:
    items = []
    for m in sorted(f.terms, key=lambda m: mask_indices(m.hol)):
        a, b = mask_indices(m.hol)
        items.append((f"w{a}^w{b}", f.terms[m]))
    return _render_terms(items)


def render_pi(pi: Polyvector) -> str:
    items = []
    for mask in sorted(pi.terms, key=mask_indices):
        a, b = mask_indices(mask)
        items.append((f"X{a}^X{b}", pi.terms[mask]))
    return _render_terms(items)


def render_model(model: LieModel, pi: Optional[Polyvector] = None) -> str:
    lines = [f"model {model.name}", f"dim {model.n}"]
    for k in sorted(model.d_hol):
        lines.append(f"d w{k} = {render_two_form(model.d_hol[k])}")
    if pi is not None:
        lines.append(f"pi = {render_pi(pi)}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# built-in models, shipped in the public grammar

BUILTIN_SOURCES: Dict[str, str] = {
    "iwasawa3": """\
# Iwasawa manifold: quotient of the complex Heisenberg group H(3; C)
model iwasawa3
dim 3
d w2 = - w1^w3
""",
    "nil6": """\
# six-dimensional complex parallelisable nilmanifold (4x4 unipotent group)
model nil6
dim 6
d w2 = - w1^w4
d w3 = - w1^w5 - w2^w6
d w5 = - w4^w6
""",
}
for _n in range(1, 9):
    BUILTIN_SOURCES[f"torus{_n}"] = f"# abelian model, complex torus of dimension {_n}\nmodel torus{_n}\ndim {_n}\n"
del _n


def builtin_names() -> List[str]:
    return list(BUILTIN_SOURCES)


def builtin(name: str) -> LieModel:
    try:
        src = BUILTIN_SOURCES[name]
    except KeyError:
        raise KeyError(f"no built-in model named {name!r}; known: {', '.join(BUILTIN_SOURCES)}") from None
    return parse_model(src)[0]
