"""Command-line entry point (``kbhom``).

Exit codes: 0 success, 1 domain refusal (invalid model, non-Poisson bivector,
formula hypotheses not met), 2 parse or usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
import time
from typing import List, Optional, Sequence, TextIO, Tuple

from .exterior import Polyvector, render_form, render_polyvector
from .formulas import (
    BlowupSpec,
    FormulaError,
    blowup_dims,
    degeneracy_transfer,
    pbundle_dims,
    trivial_poisson_dims,
)
from .homology import (
    check_duality,
    check_e1_degeneracy,
    check_unimodular,
    dolbeault_dims,
    euler_characteristic,
    hodge_euler,
    kb_dims,
    lp_dims,
    spectral_pages,
    stable_page_index,
)
from .lie_model import LieModel, ModelError, NotPoissonError, check_poisson, is_nilpotent, require_valid, validate
from .modelfile import BUILTIN_SOURCES, ParseError, parse_model, parse_pi, render_pi
from .report import Report, render
from .tables import DimVector, HodgeDiamond


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# ---------------------------------------------------------------------------
# inputs


def load_model(spec: str) -> Tuple[LieModel, Optional[Polyvector]]:
    if spec in BUILTIN_SOURCES:
        return parse_model(BUILTIN_SOURCES[spec])
    if os.path.isfile(spec):
        with open(spec, encoding="utf-8") as fh:
            return parse_model(fh.read())
    raise UsageError(f"--model {spec!r} is neither a built-in ({', '.join(BUILTIN_SOURCES)}) nor a file")


def _read_ref(text: str) -> Tuple[str, bool]:
    if text.startswith("@"):
        try:
            with open(text[1:], encoding="utf-8") as fh:
                return fh.read(), True
        except OSError as exc:
            raise UsageError(f"cannot read {text[1:]!r}: {exc.strerror}") from None
    return text, False


def _ints(text: str, what: str) -> List[int]:
    toks = [t for t in re.split(r"[\s,]+", text.strip()) if t]
    try:
        return [int(t) for t in toks]
    except ValueError:
        raise UsageError(f"{what}: expected integers, got {text!r}") from None


def parse_dims(text: str) -> DimVector:
    """Inline ``1,8,31,...`` or ``@file`` (JSON list, a report with ``kb``, or plain integers)."""
    body, from_file = _read_ref(text)
    values = None
    if from_file:
        try:
            data = json.loads(body)
        except ValueError:
            data = None
        if isinstance(data, dict):
            data = data.get("kb") or data.get("dims")
        if isinstance(data, list) and all(isinstance(x, int) for x in data):
            values = data
    if values is None:
        values = _ints(body, "dimension vector")
    try:
        return DimVector.of(values)
    except ValueError as exc:
        raise UsageError(f"dimension vector: {exc}") from None


def parse_diamond(text: str) -> HodgeDiamond:
    """Rows ``h^{p,0..n}`` separated by ``;``, ``/`` or newlines, or ``@file`` (JSON allowed)."""
    body, from_file = _read_ref(text)
    rows = None
    if from_file:
        try:
            data = json.loads(body)
        except ValueError:
            data = None
        if isinstance(data, dict):
            data = data.get("hodge")
        if isinstance(data, list) and all(isinstance(r, list) for r in data):
            rows = data
    if rows is None:
        rows = [_ints(r, "diamond row") for r in re.split(r"[;/\n]", body) if r.strip()]
    try:
        return HodgeDiamond.from_rows(rows)
    except ValueError as exc:
        raise UsageError(f"Hodge diamond: {exc}") from None


# ---------------------------------------------------------------------------
# commands


def _model_context(args) -> Tuple[LieModel, Polyvector, Report]:
    if not args.model:
        raise UsageError(f"{args.command}: --model is required")
    model, file_pi = load_model(args.model)
    if args.pi is not None:
        pi = parse_pi(args.pi, model.n, line=1, col0=1)
    else:
        pi = file_pi if file_pi is not None else Polyvector.zero(model.n)
    rep = Report(command=args.command, model=model.name, n=model.n)
    return model, pi, rep


def _with_pi(model, pi, rep):
    require_valid(model)
    rep.pi = render_pi(pi)
    rep.scope = "manifold" if is_nilpotent(model) else "invariant-model"


def _poisson_checks(model, pi, rep) -> bool:
    res = check_poisson(model, pi)
    rep.checks["poisson"] = res.is_poisson
    if not res.is_poisson:
        rep.checks["schouten [pi,pi]"] = render_polyvector(res.witness)
    return res.is_poisson


def cmd_validate(args, timer) -> Tuple[int, Report]:
    model, _, rep = _model_context(args)
    vr = validate(model)
    rep.checks["integrable"] = vr.ok
    for k, f in vr.failures.items():
        rep.checks[f"d(d w{k})"] = render_form(f)
    if vr.ok:
        rep.checks["nilpotent"] = is_nilpotent(model)
    return (0 if vr.ok else 1), rep


def cmd_hodge(args, timer):
    model, _, rep = _model_context(args)
    with timer("hodge"):
        rep.hodge = dolbeault_dims(model)
    rep.scope = "manifold" if is_nilpotent(model) else "invariant-model"
    return 0, rep


def cmd_kb(args, timer):
    model, pi, rep = _model_context(args)
    _with_pi(model, pi, rep)
    with timer("kb"):
        rep.kb = kb_dims(model, pi)
    return 0, rep


def cmd_lp(args, timer):
    model, pi, rep = _model_context(args)
    _with_pi(model, pi, rep)
    with timer("lp"):
        rep.lp = lp_dims(model, pi)
    return 0, rep


def cmd_ss(args, timer):
    model, pi, rep = _model_context(args)
    _with_pi(model, pi, rep)
    r = args.pages if args.pages is not None else stable_page_index(model)
    if r < 1:
        raise UsageError("--pages must be at least 1")
    with timer("pages"):
        rep.pages = spectral_pages(model, pi, r)
    return 0, rep


def _full_checks(model, pi, rep):
    rep.checks["unimodular"] = check_unimodular(model, pi)
    deg = check_e1_degeneracy(model, pi)
    rep.checks["E1-degenerate"] = deg.degenerate
    if not deg.degenerate:
        rep.checks["E1 defects"] = {f"k={k}": d for k, d in enumerate(deg.defects) if d}
    kb = kb_dims(model, pi)
    rep.checks["duality"] = check_duality(kb)
    e_kb, e_h = euler_characteristic(kb), hodge_euler(dolbeault_dims(model))
    rep.checks["euler"] = {"kb": e_kb, "hodge": e_h, "equal": e_kb == e_h}


def cmd_check(args, timer):
    model, pi, rep = _model_context(args)
    _with_pi(model, pi, rep)
    with timer("checks"):
        if not _poisson_checks(model, pi, rep):
            return 1, rep
        _full_checks(model, pi, rep)
    return 0, rep


def cmd_report(args, timer):
    model, pi, rep = _model_context(args)
    _with_pi(model, pi, rep)
    if not _poisson_checks(model, pi, rep):
        return 1, rep
    with timer("hodge"):
        rep.hodge = dolbeault_dims(model)
    with timer("kb"):
        rep.kb = kb_dims(model, pi)
    with timer("lp"):
        rep.lp = lp_dims(model, pi)
    r = args.pages if args.pages is not None else stable_page_index(model)
    with timer("pages"):
        rep.pages = spectral_pages(model, pi, r)
    with timer("checks"):
        _full_checks(model, pi, rep)
    return 0, rep


def cmd_blowup(args, timer):
    x, z = parse_dims(args.x), parse_dims(args.z)
    out = blowup_dims(BlowupSpec(x, z, args.codim, z_ddbar=args.z_ddbar))
    rep = Report(command="blowup", n=out.n, kb=out)
    if args.x_defects or args.z_defects:
        if not (args.x_defects and args.z_defects):
            raise UsageError("--x-defects and --z-defects go together")
        tr = degeneracy_transfer(
            parse_dims(args.x_defects).dims, parse_dims(args.z_defects).dims, args.codim
        )
        rep.checks["E1-degenerate"] = tr.degenerate
        rep.checks["E1 defects"] = {f"k={k}": d for k, d in enumerate(tr.defects) if d}
    return 0, rep


def cmd_pbundle(args, timer):
    out = pbundle_dims(parse_dims(args.z), args.rank)
    return 0, Report(command="pbundle", n=out.n, kb=out)


def cmd_trivial(args, timer):
    h = parse_diamond(args.diamond)
    return 0, Report(command="trivial", n=h.n, hodge=h, kb=trivial_poisson_dims(h))


COMMANDS = {
    "validate": (cmd_validate, "check integrability (d^2 = 0) of a model"),
    "hodge": (cmd_hodge, "Dolbeault numbers h^{p,q} of the invariant model"),
    "kb": (cmd_kb, "holomorphic Koszul-Brylinski homology dimensions"),
    "lp": (cmd_lp, "holomorphic Lichnerowicz-Poisson cohomology dimensions"),
    "ss": (cmd_ss, "pages of the Dolbeault to Koszul-Brylinski spectral sequence"),
    "check": (cmd_check, "Poisson, unimodularity, E1 degeneracy, duality and Euler checks"),
    "report": (cmd_report, "everything above for one model and bivector"),
    "blowup": (cmd_blowup, "KB dimensions of a blow-up from ambient and center tables"),
    "pbundle": (cmd_pbundle, "KB dimensions of a projectivised bundle"),
    "trivial": (cmd_trivial, "KB dimensions for the zero bivector from a Hodge diamond"),
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--timing", action="store_true", help="print timings to stderr")

    model_opts = _Parser(add_help=False)
    model_opts.add_argument("--model", help="built-in name or model file")
    model_opts.add_argument("--pi", help='bivector, e.g. "X1^X2 + X2^X3" (default: the file\'s pi, else 0)')
    model_opts.add_argument("--pages", type=int, help="last spectral-sequence page to show")

    ap = _Parser(prog="kbhom", description="Exact Koszul-Brylinski / Dolbeault workbench for nilmanifold models.")
    sub = ap.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    sub.required = True
    for name, (_, help_) in COMMANDS.items():
        parents = [common]
        if name not in ("blowup", "pbundle", "trivial"):
            parents.append(model_opts)
        p = sub.add_parser(name, parents=parents, help=help_, description=help_)
        if name == "blowup":
            p.add_argument("--x", required=True, help="ambient dims, inline or @file")
            p.add_argument("--z", required=True, help="center dims, inline or @file")
            p.add_argument("--codim", type=int, required=True)
            p.add_argument("--z-ddbar", action="store_true", help="assert the center satisfies the ddbar-lemma")
            p.add_argument("--x-defects", help="E1 defects of the ambient space (optional)")
            p.add_argument("--z-defects", help="E1 defects of the center (optional)")
        elif name == "pbundle":
            p.add_argument("--z", required=True, help="base dims, inline or @file")
            p.add_argument("--rank", type=int, required=True)
        elif name == "trivial":
            p.add_argument("--diamond", required=True, help='rows "1,0;0,1" or @file')
    return ap


class _Timer:
    def __init__(self):
        self.spans = {}

    def __call__(self, label):
        timer = self

        class _Span:
            def __enter__(self):
                self.t0 = time.perf_counter()

            def __exit__(self, *exc):
                timer.spans[label] = time.perf_counter() - self.t0
                return False

        return _Span()


def run(argv: Optional[Sequence[str]] = None, stdout: TextIO = None, stderr: TextIO = None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(list(argv) if argv is not None else None)
    except UsageError as exc:
        print(f"error: {exc}", file=stderr)
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    timer = _Timer()
    fn = COMMANDS[args.command][0]
    try:
        code, rep = fn(args, timer)
    except (UsageError, ParseError) as exc:
        print(f"error: {exc}", file=stderr)
        return 2
    except NotPoissonError as exc:
        print(f"refused: {exc}", file=stderr)
        return 1
    except (ModelError, FormulaError) as exc:
        print(f"refused: {exc}", file=stderr)
        return 1
    rep.timing = dict(timer.spans)
    stdout.write(render(rep, args.format))
    if args.timing:
        for label, secs in timer.spans.items():
            print(f"time {label}: {secs:.3f}s", file=stderr)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
