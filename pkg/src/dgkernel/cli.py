"""Command-line interface: line-oriented job files in, deterministic
aligned-text reports out (optionally mirrored to a JSON document).

Job file grammar (one directive per line; '#' starts a comment):

    field Q | Fp:<prime>
    base <name> <intdeg> [hdeg <even-hdeg>]
    relation <expr>
    dgvar <name> <hdeg> <intdeg> <kind> <boundary-expr | 0>
    bounds <max_hdeg> <max_intdeg>
    task <command> [--option value ...]

Expressions use integer coefficients, `^` powers, `*` products and
`+`/`-` sums of monomials in previously declared names.  Commands:
deviations | acyclic-closure | minimal-model [--switch s] |
betti [--module residue-field|cyclic:<expr>[,<expr>...]] |
poincare [--order n] | classify | verify --statement <id>.

Exit codes: 0 success, 1 usage/parse error, 2 computation error,
3 verification failure.
"""

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor

from . import homology as hml
from . import invariants as inv
from . import model_builder as mb
from .dg_core import DgAlgebra, EXTERIOR, POLYNOMIAL, DIVIDED_POWER
from .errors import (AdmissibilityError, BoundExceededError,
                     HomogeneityError, NotChainMapError, NotCycleError,
                     ParityError)
from .fields import parse_field
from .graded_base import BasePresentation, BaseVariable, TruncatedBase
from .module_resolution import (PresentedModule, ResidueFieldModule,
                                resolve_module)

COMMANDS = ("deviations", "acyclic-closure", "minimal-model", "betti",
            "poincare", "classify", "verify")
KINDS = {"polynomial": POLYNOMIAL, "exterior": EXTERIOR,
         "dividedPower": DIVIDED_POWER}


class JobError(Exception):
    def __init__(self, message, line=None, col=None):
        where = ""
        if line is not None:
            where = f" at line {line}" + (f", column {col}"
                                          if col is not None else "")
        super().__init__(message + where)
        self.line = line
        self.col = col


# ---------------------------------------------------------------------------
# Expression parser
# ---------------------------------------------------------------------------

def _tokenize(text, line):
    """Yield (kind, value, column); kinds: int, name, op."""
    toks = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        col = i + 1
        if ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            toks.append(("int", int(text[i:j]), col))
            i = j
        elif ch.isalpha() or ch == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(("name", text[i:j], col))
            i = j
        elif ch in "+-*^":
            toks.append(("op", ch, col))
            i += 1
        else:
            raise JobError(f"unexpected character {ch!r}", line, col)
    return toks


def parse_expression(text, line, names):
    """Parse a sum of monomials over the given ordered names into a list
    of (coefficient, exponent_tuple)."""
    toks = _tokenize(text, line)
    if not toks:
        raise JobError("empty expression", line, 1)
    index = {n: k for k, n in enumerate(names)}
    terms = []
    p = 0

    def expect_factor():
        nonlocal p
        if p >= len(toks):
            raise JobError("expression ends unexpectedly", line,
                           toks[-1][2] + 1)
        kind, val, col = toks[p]
        if kind == "int":
            p += 1
            return val, None
        if kind == "name":
            if val not in index:
                raise JobError(f"unknown name {val!r}", line, col)
            p += 1
            exp = 1
            if p < len(toks) and toks[p][:2] == ("op", "^"):
                p += 1
                if p >= len(toks) or toks[p][0] != "int":
                    raise JobError("exponent must be an integer", line, col)
                exp = toks[p][1]
                p += 1
                if exp < 1:
                    raise JobError("exponent must be >= 1", line, col)
            return None, (index[val], exp)
        raise JobError(f"expected a factor, got {val!r}", line, col)

    sign = 1
    if toks[0][:2] == ("op", "-"):
        sign = -1
        p = 1
    elif toks[0][:2] == ("op", "+"):
        p = 1
    while True:
        coeff = sign
        exps = [0] * len(names)
        while True:
            c, power = expect_factor()
            if c is not None:
                coeff *= c
            else:
                vid, e = power
                exps[vid] += e
            if p < len(toks) and toks[p][:2] == ("op", "*"):
                p += 1
                continue
            break
        terms.append((coeff, tuple(exps)))
        if p >= len(toks):
            return terms
        kind, val, col = toks[p]
        if (kind, val) == ("op", "+"):
            sign = 1
        elif (kind, val) == ("op", "-"):
            sign = -1
        else:
            raise JobError(f"expected '+' or '-', got {val!r}", line, col)
        p += 1


def _terms_to_poly(terms, field, line):
    poly = {}
    for coeff, exps in terms:
        c = field.from_int(coeff)
        prev = poly.get(exps, field.zero)
        s = field.add(prev, c)
        if field.is_zero(s):
            poly.pop(exps, None)
        else:
            poly[exps] = s
    if not poly:
        raise JobError("expression reduces to zero", line)
    return poly


# ---------------------------------------------------------------------------
# Job files
# ---------------------------------------------------------------------------

class JobFile:
    def __init__(self):
        self.field = None
        self.base_vars = []     # (name, intdeg, hdeg, line)
        self.relations = []     # (expr_text, line)
        self.dgvars = []        # (name, hdeg, intdeg, kind, boundary, line)
        self.bounds = None      # (max_hdeg, max_intdeg, line)
        self.task = None        # (command, params, line)


def parse_job(path):
    job = JobFile()
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as e:
        raise JobError(f"cannot read job file: {e}")
    for n, raw in enumerate(lines, start=1):
        text = raw.split("#", 1)[0].strip()
        if not text:
            continue
        parts = text.split()
        key = parts[0]
        if key == "field":
            if len(parts) != 2:
                raise JobError("field takes one value (Q or Fp:<prime>)", n)
            if job.field is not None:
                raise JobError("duplicate field directive", n)
            job.field = (parts[1], n)
        elif key == "base":
            if len(parts) not in (3, 5) or (len(parts) == 5
                                            and parts[3] != "hdeg"):
                raise JobError(
                    "usage: base <name> <intdeg> [hdeg <even-hdeg>]", n)
            try:
                intdeg = int(parts[2])
                hdeg = int(parts[4]) if len(parts) == 5 else 0
            except ValueError:
                raise JobError("degrees must be integers", n)
            job.base_vars.append((parts[1], intdeg, hdeg, n))
        elif key == "relation":
            expr = text[len("relation"):].strip()
            if not expr:
                raise JobError("relation needs an expression", n)
            job.relations.append((expr, n))
        elif key == "dgvar":
            if len(parts) < 5:
                raise JobError(
                    "usage: dgvar <name> <hdeg> <intdeg> <kind> "
                    "<boundary-expr | 0>", n)
            try:
                hdeg, intdeg = int(parts[2]), int(parts[3])
            except ValueError:
                raise JobError("degrees must be integers", n)
            kind = parts[4]
            if kind not in KINDS:
                raise JobError(
                    f"unknown kind {kind!r} (polynomial, exterior, "
                    "dividedPower)", n)
            boundary = " ".join(parts[5:]).strip()
            if not boundary:
                raise JobError("dgvar needs a boundary expression "
                               "(use 0 for a cycle)", n)
            job.dgvars.append((parts[1], hdeg, intdeg, kind, boundary, n))
        elif key == "bounds":
            if len(parts) != 3:
                raise JobError("usage: bounds <max_hdeg> <max_intdeg>", n)
            try:
                job.bounds = (int(parts[1]), int(parts[2]), n)
            except ValueError:
                raise JobError("bounds must be integers", n)
        elif key == "task":
            if job.task is not None:
                raise JobError("duplicate task directive", n)
            if len(parts) < 2:
                raise JobError("task needs a command", n)
            command = parts[1]
            if command not in COMMANDS:
                raise JobError(f"unknown command {command!r}", n)
            params = {}
            rest = parts[2:]
            k = 0
            while k < len(rest):
                if not rest[k].startswith("--") or k + 1 >= len(rest):
                    raise JobError("task options are --name value pairs", n)
                params[rest[k][2:]] = rest[k + 1]
                k += 2
            job.task = (command, params, n)
        else:
            raise JobError(f"unknown directive {key!r}", n, 1)
    if job.field is None:
        raise JobError("missing field directive")
    if job.bounds is None:
        raise JobError("missing bounds directive (bounds are mandatory)")
    if job.task is None:
        raise JobError("missing task directive")
    _validate_job(job)
    return job


def _validate_job(job):
    spec, line = job.field
    try:
        field = parse_field(spec)
    except ValueError as e:
        raise JobError(str(e), line)
    job.parsed_field = field
    names = []
    for name, intdeg, hdeg, n in job.base_vars:
        if name in names:
            raise JobError(f"duplicate name {name!r}", n)
        if intdeg < 1:
            raise JobError("internal degree must be >= 1", n)
        if hdeg < 0 or hdeg % 2 != 0:
            raise JobError("base homological degree must be even "
                           "and >= 0", n)
        names.append(name)
    # relations: parse now against base names; homogeneity checked here
    # so errors carry positions
    degs = {name: (intdeg, hdeg)
            for name, intdeg, hdeg, _ in job.base_vars}
    job.parsed_relations = []
    for expr, n in job.relations:
        terms = parse_expression(expr, n, names)
        idegs = set()
        hdegs = set()
        for _, exps in terms:
            idegs.add(sum(e * degs[names[k]][0] for k, e in enumerate(exps)))
            hdegs.add(sum(e * degs[names[k]][1] for k, e in enumerate(exps)))
        if len(idegs) != 1 or len(hdegs) != 1:
            raise JobError(f"non-homogeneous relation {expr!r}", n)
        job.parsed_relations.append(_terms_to_poly(terms, field, n))
    for name, hdeg, intdeg, kind, _, n in job.dgvars:
        if name in names:
            raise JobError(f"duplicate name {name!r}", n)
        names.append(name)
        if hdeg < 1:
            raise JobError("dg variable homological degree must be >= 1", n)
        odd = hdeg % 2 == 1
        if kind == "exterior" and not odd:
            raise JobError("exterior kind requires odd homological degree "
                           "(parity mismatch)", n)
        if kind in ("polynomial", "dividedPower") and odd:
            raise JobError(f"{kind} kind requires even homological degree "
                           "(parity mismatch)", n)
    N, D, n = job.bounds
    if N < 1 or D < 1:
        raise JobError("bounds must be >= 1", n)


def build_algebra(job):
    """Materialize the truncated base and adjoin the declared variables."""
    field = job.parsed_field
    N, D, _ = job.bounds
    base_vars = [BaseVariable(name, intdeg, hdeg)
                 for name, intdeg, hdeg, _ in job.base_vars]
    try:
        pres = BasePresentation(field, base_vars, job.parsed_relations)
        tbase = TruncatedBase(pres, D)
    except (ValueError, HomogeneityError) as e:
        raise JobError(str(e))
    A = DgAlgebra(tbase, max_hdeg=N, max_intdeg=D)
    base_names = [v.name for v in base_vars]
    for name, hdeg, intdeg, kind, boundary, n in job.dgvars:
        z = _evaluate_in_algebra(A, boundary, n, base_names,
                                 hdeg - 1, intdeg)
        try:
            A = A.adjoin_variable(z, KINDS[kind], name=name)
        except (ParityError, NotCycleError, ValueError) as e:
            raise JobError(str(e), n)
        if A.variables[-1].hdeg != hdeg:
            raise JobError(
                f"boundary has homological degree {z.hdeg}, so the "
                f"variable gets degree {z.hdeg + 1}, not {hdeg}", n)
    return A


def _evaluate_in_algebra(A, expr, line, base_names, hdeg, intdeg):
    """Evaluate an expression in base generators and already-adjoined
    variables as a DgElement of the stated bidegree."""
    if expr.strip() == "0":
        return A.zero(hdeg, intdeg)
    var_names = [v.name for v in A.variables]
    names = base_names + var_names
    terms = parse_expression(expr, line, names)
    nb = len(base_names)
    total = A.zero(hdeg, intdeg)
    F = A.field
    p = A.base.presentation
    for coeff, exps in terms:
        factor = A.one()
        base_exps = exps[:nb]
        if any(base_exps):
            j = p.mono_intdeg(base_exps)
            nf = A.base.normal_form(j, tuple(base_exps))
            factor = A.multiply(factor, A.base_element(j, nf))
        for k, e in enumerate(exps[nb:]):
            for _ in range(e):
                factor = A.multiply(factor, A.var_element(k))
        if factor.is_zero():
            continue
        if (factor.hdeg, factor.intdeg) != (hdeg, intdeg):
            raise JobError(
                f"term has bidegree ({factor.hdeg},{factor.intdeg}), "
                f"expected ({hdeg},{intdeg})", line)
        scaled = {key: F.mul(c, F.from_int(coeff))
                  for key, c in factor.terms.items()}
        for key, c in scaled.items():
            prev = total.terms.get(key, F.zero)
            s = F.add(prev, c)
            if F.is_zero(s):
                total.terms.pop(key, None)
            else:
                total.terms[key] = s
    return total


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

def _fmt_table(rows, headers):
    """Right-aligned columns."""
    table = [headers] + [[str(x) for x in r] for r in rows]
    widths = [max(len(r[c]) for r in table) for c in range(len(headers))]
    out = []
    for r in table:
        out.append("  ".join(x.rjust(w) for x, w in zip(r, widths)))
    return out


def _bigraded_rows(table):
    return [[h, d, c] for (h, d), c in sorted(table.items())]


class Report:
    def __init__(self, data, text_lines, failed_verification=False):
        self.data = data
        self.text_lines = text_lines
        self.failed_verification = failed_verification

    def text(self):
        return "\n".join(self.text_lines) + "\n"

    def json(self):
        return json.dumps(self.data, sort_keys=True, indent=2,
                          default=_json_default) + "\n"


def _json_default(obj):
    return str(obj)


def _header_lines(job, command):
    N, D, _ = job.bounds
    return [f"task      {command}",
            f"field     {job.field[0]}",
            f"bounds    max_hdeg={N} max_intdeg={D}"]


def _certify_quasi_iso(model, threads):
    """Exactness of the cone over the whole certified bidegree grid,
    computed with up to `threads` concurrent bidegree slices."""
    C = mb._cone_of(model.morphism(), model.max_hdeg, model.max_intdeg)
    pairs = [(i, j) for i in range(model.max_hdeg)
             for j in range(model.max_intdeg + 1)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            dims = list(pool.map(lambda p: hml.homology(C, *p).dim, pairs))
    else:
        dims = [hml.homology(C, *p).dim for p in pairs]
    bad = [p for p, dim in zip(pairs, dims) if dim]
    return (not bad), (bad[0] if bad else None)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def run(job, threads=1):
    command, params, _ = job.task
    A = build_algebra(job)
    N, D, _ = job.bounds
    handler = {
        "deviations": _run_deviations,
        "acyclic-closure": _run_closure,
        "minimal-model": _run_model,
        "betti": _run_betti,
        "poincare": _run_poincare,
        "classify": _run_classify,
        "verify": _run_verify,
    }[command]
    return handler(job, A, N, D, params, threads)


def _run_deviations(job, A, N, D, params, threads):
    dev = inv.deviations(A, N, D)
    data = {"task": "deviations", "field": job.field[0],
            "bounds": {"max_hdeg": N, "max_intdeg": D},
            "complete_through_hdeg": N,
            "eps": dev.as_dict()}
    lines = _header_lines(job, "deviations")
    lines.append(f"complete  through homological degree {N}")
    lines.append("")
    lines += _fmt_table(_bigraded_rows(dev.table), ["i", "j", "eps"])
    lines.append("")
    lines.append("marginals " + " ".join(str(x) for x in dev.marginals()))
    return Report(data, lines)


def _model_report(job, model, N, D, label, threads):
    ok_min, witness = model.is_minimal()
    ok_qi, bad = _certify_quasi_iso(model, threads)
    rows = [[v.name, v.hdeg, v.intdeg, v.kind, v.family]
            for v in model.adjoined_variables()]
    data = {"task": label, "field": job.field[0],
            "bounds": {"max_hdeg": N, "max_intdeg": D},
            "variables": [{"name": r[0], "hdeg": r[1], "intdeg": r[2],
                           "kind": r[3], "family": r[4]} for r in rows],
            "n": inv.CountTable(model.n_table, N, D, "n").as_dict(),
            "eps": inv.CountTable(model.eps_table, N, D, "eps").as_dict(),
            "minimal": ok_min,
            "quasi_isomorphism_certified": ok_qi}
    lines = _header_lines(job, label)
    lines.append(f"minimal   {str(ok_min).lower()}")
    lines.append(f"certified {str(ok_qi).lower()}"
                 + ("" if ok_qi else f" (cone homology at {bad})"))
    lines.append("")
    lines += _fmt_table(rows, ["name", "hdeg", "intdeg", "kind", "family"])
    if not ok_min:
        lines.append(f"non-minimal witness: {witness}")
    return Report(data, lines, failed_verification=not (ok_min and ok_qi))


def _run_closure(job, A, N, D, params, threads):
    model = mb.acyclic_closure(A, N, D)
    return _model_report(job, model, N, D, "acyclic-closure", threads)


def _run_model(job, A, N, D, params, threads):
    s = params.get("switch", "inf")
    if s == "inf":
        switch = mb.INFINITY
    else:
        try:
            switch = int(s)
        except ValueError:
            raise JobError("--switch takes a nonnegative integer or 'inf'")
        if switch < 0:
            raise JobError("--switch takes a nonnegative integer or 'inf'")
    spec = mb.residue_field_spec(A, N, D, switching_degree=switch)
    model = mb.build_model(spec)
    return _model_report(job, model, N, D, "minimal-model", threads)


def _parse_module(A, spec_text, job):
    if spec_text in (None, "residue-field"):
        return ResidueFieldModule(A)
    if spec_text.startswith("cyclic:"):
        base_names = [v.name for v in A.base.presentation.variables]
        field = A.field
        rels = []
        for expr in spec_text[len("cyclic:"):].split(","):
            terms = parse_expression(expr, 0, base_names)
            rels.append({0: _terms_to_poly(terms, field, 0)})
        return PresentedModule(A, gens=[0], relations=rels)
    raise JobError("--module takes residue-field or cyclic:<expr>[,...]")


def _run_betti(job, A, N, D, params, threads):
    M = _parse_module(A, params.get("module"), job)
    res = resolve_module(A, M, N, D)
    ok_min = res.is_minimal()
    table = inv.BettiTable(res.betti_table(), N, D)
    data = {"task": "betti", "field": job.field[0],
            "bounds": {"max_hdeg": N, "max_intdeg": D},
            "module": params.get("module", "residue-field"),
            "minimal": ok_min,
            "beta": table.as_dict()}
    lines = _header_lines(job, "betti")
    lines.append(f"module    {params.get('module', 'residue-field')}")
    lines.append(f"minimal   {str(ok_min).lower()}")
    lines.append("")
    lines += _fmt_table(_bigraded_rows(table.table), ["i", "j", "beta"])
    lines.append("")
    lines.append("marginals " + " ".join(str(x) for x in table.marginals()))
    return Report(data, lines, failed_verification=not ok_min)


def _run_poincare(job, A, N, D, params, threads):
    try:
        order = int(params.get("order", N))
    except ValueError:
        raise JobError("--order takes an integer")
    dev = inv.deviations(A, N, D)
    series = inv.poincare_from_deviations(dev, order)
    data = {"task": "poincare", "field": job.field[0],
            "bounds": {"max_hdeg": N, "max_intdeg": D},
            "series": series.as_dict()}
    lines = _header_lines(job, "poincare")
    lines.append(f"order     {order}")
    lines.append(f"complete  {str(series.complete).lower()}"
                 + ("" if series.complete else
                    f" (deviations certified only through {N})"))
    lines.append("")
    lines.append("coefficients "
                 + " ".join(str(c) for c in series.coefficients))
    return Report(data, lines)


def _run_classify(job, A, N, D, params, threads):
    verdict = inv.classify_growth(A, N, D)
    data = {"task": "classify", "field": job.field[0],
            "bounds": {"max_hdeg": N, "max_intdeg": D},
            "result": verdict.as_dict()}
    lines = _header_lines(job, "classify")
    lines.append(f"verdict   {verdict.verdict}")
    for key in sorted(verdict.detail):
        lines.append(f"{key}: {verdict.detail[key]}")
    return Report(data, lines)


def _run_verify(job, A, N, D, params, threads):
    statement = params.get("statement")
    if not statement:
        raise JobError("verify requires --statement <id>")
    report = inv.verify(statement, A, N, D)
    data = {"task": "verify", "field": job.field[0],
            "bounds": {"max_hdeg": N, "max_intdeg": D},
            "report": report.as_dict()}
    lines = _header_lines(job, "verify")
    lines.append(f"statement {statement}")
    lines.append(f"verdict   {report.verdict}")
    for note in report.notes:
        lines.append(f"note      {note}")
    lines.append("")
    for c in report.comparisons:
        lines.append("  " + " ".join(f"{k}={v}" for k, v in c.items()))
    return Report(data, lines,
                  failed_verification=(report.verdict == "fail"))


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="dgkernel",
        description="exact kernel for dg-algebra models, deviations, "
                    "Betti numbers, and verification of their relations")
    parser.add_argument("jobfile", help="path to a job file")
    parser.add_argument("--json", metavar="PATH",
                        help="also write the report as JSON to PATH")
    parser.add_argument("--threads", type=int, default=1,
                        help="cap on concurrent bidegree computations")
    args = parser.parse_args(argv)
    if args.threads < 1:
        parser.error("--threads must be >= 1")
    try:
        job = parse_job(args.jobfile)
    except JobError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    try:
        report = run(job, threads=args.threads)
    except JobError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (AdmissibilityError, BoundExceededError, HomogeneityError,
            NotChainMapError, NotCycleError, ParityError, ValueError) as e:
        print(f"computation error: {e}", file=sys.stderr)
        return 2
    sys.stdout.write(report.text())
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(report.json())
    return 3 if report.failed_verification else 0


if __name__ == "__main__":
    sys.exit(main())
