"""Command-line entry point: algebra files in, structured reports out.

The .alg file format declares a finite-dimensional dg algebra over Q by
listing basis elements with degrees, an optional unit, differential
lines, and structure constants between named basis elements (composite
monomials must themselves be named).  Reports are emitted as JSON with
every rational rendered exactly as a string, or as an indented text
rendering of the same tree; JSON output is byte-deterministic for fixed
inputs and flags.

Exit codes: 0 success (the verdict lives in the report), 2 malformed
input, 3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import re
import sys
from fractions import Fraction

from . import __version__
from .algebras import DgAlgebra, check_axioms, cohomology_algebra, fixture
from .graded import (GradedLinearMap, GradedVectorSpace, InputError,
                     InvariantError, ONE)
from .homotopy import strict_structure, transfer_minimal_model
from .opcohomology import Cochain, CochainTheory
from . import linalg

NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
RATIONAL_RE = re.compile(r"^-?\d+(/\d+)?$")
KEYWORDS = {"species", "name", "basis:", "products:", "unit", "d"}

FIXTURE_DIR = os.path.join(os.path.dirname(__file__), "fixtures")


class ParseError(InputError):
    def __init__(self, message, line, column=1):
        super().__init__("line %d, column %d: %s" % (line, column, message))
        self.line = line
        self.column = column


# ---------------------------------------------------------------------------
# .alg parsing


def _parse_rational(tok, lineno, col):
    if not RATIONAL_RE.match(tok):
        raise ParseError("expected a rational, got %r" % tok, lineno, col)
    return Fraction(tok)


def _parse_combination(rhs, names, lineno, col0):
    """`0` or a signed sum of [rational *] name terms."""
    text = rhs.strip()
    if text == "0":
        return {}
    out = {}
    pos = 0
    sign = ONE
    expect_term = True
    toks = text.replace("+", " + ").replace("-", " - ").split()
    # re-join rationals split at an interior minus is impossible: minus only
    # leads a term, so the split above is safe
    i = 0
    while i < len(toks):
        tok = toks[i]
        if tok == "+":
            if expect_term:
                raise ParseError("misplaced '+'", lineno, col0)
            sign, expect_term = ONE, True
            i += 1
            continue
        if tok == "-":
            sign = -sign if expect_term else -ONE
            expect_term = True
            i += 1
            continue
        if not expect_term:
            raise ParseError("expected '+' or '-' before %r" % tok,
                             lineno, col0)
        if "*" in tok:
            coef_s, _, name = tok.partition("*")
            if not name or "*" in name:
                raise ParseError("malformed term %r" % tok, lineno, col0)
            coef = sign * _parse_rational(coef_s, lineno, col0)
        elif RATIONAL_RE.match(tok) and i + 1 < len(toks) and toks[i + 1] == "*":
            raise ParseError("malformed term near %r" % tok, lineno, col0)
        else:
            name, coef = tok, sign
        if name not in names:
            raise ParseError("unknown basis element %r" % name, lineno, col0)
        out[name] = out.get(name, Fraction(0)) + coef
        sign, expect_term = ONE, False
        i += 1
    if expect_term:
        raise ParseError("dangling sign", lineno, col0)
    return {k: v for k, v in out.items() if v}


def parse_algebra(text):
    """Parse .alg text into a DgAlgebra.  Raises ParseError with the
    offending line on any malformed input."""
    species = None
    name = ""
    basis = []
    names = set()
    unit = None
    dcols = {}
    products = {}
    mode = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head = line.split()[0]
        if head == "species":
            parts = line.split()
            if len(parts) != 2:
                raise ParseError("species takes one token", lineno)
            species = parts[1]
            mode = None
            continue
        if head == "name":
            parts = line.split(None, 1)
            name = parts[1] if len(parts) > 1 else ""
            mode = None
            continue
        if line == "basis:":
            mode = "basis"
            continue
        if line == "products:":
            mode = "products"
            continue
        if head == "unit":
            parts = line.split()
            if len(parts) != 2:
                raise ParseError("unit takes one token", lineno)
            unit = parts[1]
            mode = None
            continue
        if head == "d":
            body = line[1:].strip()
            lhs, eq, rhs = body.partition("=")
            if not eq:
                raise ParseError("differential line needs '='", lineno)
            src = lhs.strip()
            if src not in names:
                raise ParseError("unknown basis element %r" % src, lineno,
                                 raw.find(src) + 1)
            col = _parse_combination(rhs, names, lineno, raw.find("=") + 2)
            if col:
                dcols[src] = col
            mode = None
            continue
        if mode == "basis":
            parts = line.split()
            if len(parts) != 2:
                raise ParseError("basis line must be 'name degree'", lineno)
            nm, deg_s = parts
            if not NAME_RE.match(nm):
                raise ParseError("bad basis name %r" % nm, lineno)
            if nm in names:
                raise ParseError("duplicate basis name %r" % nm, lineno)
            try:
                deg = int(deg_s)
            except ValueError:
                raise ParseError("bad degree %r" % deg_s, lineno,
                                 raw.find(deg_s) + 1)
            basis.append((nm, deg))
            names.add(nm)
            continue
        if mode == "products":
            lhs, eq, rhs = line.partition("=")
            if not eq:
                raise ParseError("product line needs '='", lineno)
            lhs = lhs.strip()
            m = re.match(r"^\[\s*(\S+)\s*,\s*(\S+)\s*\]$", lhs)
            if m:
                a, b = m.group(1), m.group(2)
            else:
                m = re.match(r"^(\S+)\s*\*\s*(\S+)$", lhs)
                if not m:
                    raise ParseError("malformed product left side %r" % lhs,
                                     lineno)
                a, b = m.group(1), m.group(2)
            for x in (a, b):
                if x not in names:
                    raise ParseError("unknown basis element %r" % x, lineno,
                                     raw.find(x) + 1)
            v = _parse_combination(rhs, names, lineno, raw.find("=") + 2)
            if v:
                products[(a, b)] = v
            continue
        raise ParseError("unrecognized line %r" % line, lineno)
    if species is None:
        raise ParseError("missing species declaration", 1)
    if not basis:
        raise ParseError("empty basis", 1)
    space = GradedVectorSpace(basis)
    diff = GradedLinearMap(space, space, 1, dcols)
    return DgAlgebra(species, space, diff, products, unit=unit, name=name)


def _comb_str(v, order):
    if not v:
        return "0"
    parts = []
    for n in order:
        c = v.get(n)
        if not c:
            continue
        mag = abs(c)
        term = n if mag == 1 else "%s*%s" % (mag, n)
        if not parts:
            parts.append(term if c > 0 else "-" + term)
        else:
            parts.append(("+ " if c > 0 else "- ") + term)
    return " ".join(parts)


def serialize_algebra(A):
    """Canonical .alg text; parse(serialize(parse(f))) == parse(f)."""
    order = list(A.space.names)
    idx = {n: i for i, n in enumerate(order)}
    lines = ["species %s" % A.species]
    if A.name:
        lines.append("name %s" % A.name)
    lines.append("basis:")
    for n in order:
        lines.append("%s %d" % (n, A.space.degree[n]))
    if A.unit is not None:
        lines.append("unit %s" % A.unit)
    for n in order:
        col = A.d.cols.get(n, {})
        if col:
            lines.append("d %s = %s" % (n, _comb_str(col, order)))
    prods = []
    for (a, b), v in A.products.items():
        if A.unit is not None and A.unit in (a, b):
            other = b if a == A.unit else a
            if v == {other: ONE}:
                continue
        if A.species in ("Com", "Lie") and idx[a] > idx[b]:
            continue
        prods.append((idx[a], idx[b], a, b, v))
    if prods:
        lines.append("products:")
        fmt = "[%s, %s] = %s" if A.species == "Lie" else "%s * %s = %s"
        for _, _, a, b, v in sorted(prods):
            lines.append(fmt % (a, b, _comb_str(v, order)))
    return "\n".join(lines) + "\n"


def load_algebra(path):
    """Read an algebra file; bare fixture names resolve against the
    shipped fixtures directory."""
    if not os.path.exists(path):
        alt_path = os.path.join(FIXTURE_DIR, os.path.basename(path))
        if os.path.exists(alt_path):
            path = alt_path
        else:
            raise InputError("no such file: %s" % path)
    with open(path, "r", encoding="utf-8") as fh:
        return parse_algebra(fh.read())


# ---------------------------------------------------------------------------
# report emission


def _key_str(k):
    if isinstance(k, str):
        return k
    if isinstance(k, tuple):
        return ",".join(_key_str(x) for x in k)
    return str(k)


def jsonable(obj):
    """Exact-arithmetic JSON tree: Fractions become strings, tuple keys
    become comma-joined strings, unknown objects are dropped."""
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, dict):
        out = {}
        for k, v in obj.items():
            jv = jsonable(v)
            if jv is not _DROP:
                out[_key_str(k)] = jv
        return out
    if isinstance(obj, (list, tuple)):
        return [jsonable(x) for x in obj if jsonable(x) is not _DROP]
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    return _DROP


class _Drop:
    pass


_DROP = _Drop()


def _render_text(node, indent=0):
    pad = "  " * indent
    lines = []
    if isinstance(node, dict):
        for k in sorted(node):
            v = node[k]
            if isinstance(v, (dict, list)) and v:
                lines.append("%s%s:" % (pad, k))
                lines.extend(_render_text(v, indent + 1))
            else:
                lines.append("%s%s: %s" % (pad, k, json.dumps(v)))
    elif isinstance(node, list):
        for v in node:
            if isinstance(v, (dict, list)):
                lines.append("%s-" % pad)
                lines.extend(_render_text(v, indent + 1))
            else:
                lines.append("%s- %s" % (pad, json.dumps(v)))
    else:
        lines.append("%s%s" % (pad, json.dumps(node)))
    return lines


def emit(report, fmt, out):
    tree = jsonable(report)
    if fmt == "json":
        text = json.dumps(tree, sort_keys=True, indent=2) + "\n"
    else:
        text = "\n".join(_render_text(tree)) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _wrap(command, args, A, result):
    return {"tool": "homformal", "version": __version__, "command": command,
            "flags": {"arity_bound": args.arity_bound,
                      "weight_bound": args.weight_bound,
                      "stage": args.stage, "seed": args.seed},
            "input": {"name": A.name, "species": A.species,
                      "dim": A.space.dim},
            "result": result}


# ---------------------------------------------------------------------------
# commands


def _stage_bound(args):
    return args.stage if args.stage is not None else args.arity_bound


def cmd_check(A, args):
    rep = check_axioms(A)
    rt = parse_algebra(serialize_algebra(A))
    rep["round_trip"] = serialize_algebra(rt) == serialize_algebra(A)
    rep["passed"] = rep["passed"] and rep["round_trip"]
    return rep


def cmd_cohomology(A, args):
    H, _ = cohomology_algebra(A)
    dims = {}
    for n in H.space.names:
        d = H.space.degree[n]
        dims[str(d)] = dims.get(str(d), 0) + 1
    prods = {}
    for (a, b), v in H.products.items():
        prods[(a, b)] = v
    return {"dims_by_degree": dims,
            "classes": [{"name": n, "degree": H.space.degree[n]}
                        for n in H.space.names],
            "unit": H.unit, "products": prods}


def cmd_transfer(A, args):
    bound = args.arity_bound
    model, qiso, info = transfer_minimal_model(A, bound)
    defects = model.check_relations(bound)
    ops = {str(k): v for k, v in model.ops.items()}
    return {"arity_bound": bound,
            "classes": [{"name": n, "degree": model.space.degree[n]}
                        for n in model.space.names],
            "operations": ops,
            "relations_ok": not defects,
            "morphism_arities": sorted(qiso.components)}


def cmd_obstructions(A, args):
    from .formality import obstruction_sequence
    bound = _stage_bound(args)
    model, _, info = transfer_minimal_model(A, bound)
    unit = info["H_algebra"].unit if A.unit is not None else None
    rep = obstruction_sequence(model, bound, unit=unit)
    rep.pop("structure", None)
    return rep


def cmd_envelope(A, args):
    from .enveloping import pbw_eta, quillen_check, summand_retraction
    if A.species != "Lie":
        raise InputError("envelope needs a Lie algebra")
    W = args.weight_bound
    q = quillen_check(A, W)
    eta = pbw_eta(A, W).report()
    pi = summand_retraction(A, W).report()
    return {"weight_bound": W,
            "quillen": {"table_uh": q["table_uh"],
                        "table_hul": q["table_hul"],
                        "dims_match": q["dims_match"],
                        "bijective": q["bijective"],
                        "algebra_map_ok": not q["algebra_map_defects"]},
            "pbw_eta": eta, "retraction": pi}


def cmd_alt(A, args):
    from .enveloping import alt, hochschild_ce_pair, internal_diff
    if A.species != "Lie":
        raise InputError("alternation check needs a Lie algebra")
    W = args.weight_bound
    rng = random.Random(args.seed)
    env, hoch, cem, mdiff, lmap, vmap = hochschild_ce_pair(A, W)
    gens = ["s" + n for n in env.names]
    sdeg = hoch.C.letters.degree
    cases = 0
    defects = 0
    for arity in (1, 2):
        for tdeg in (0, 1):
            for _ in range(2):
                comps = {}
                for w in hoch.C.basis_words(arity):
                    if not all(x in gens for x in w):
                        continue
                    want = sum(sdeg[x] for x in w) + tdeg
                    col = {}
                    for t in hoch.target.names:
                        if (hoch.target.degree[t] == want and t != "s1"
                                and len(t[1:].split(".")) < W):
                            c = rng.randint(-2, 2)
                            if c:
                                col[t] = Fraction(c)
                    if col:
                        comps[w] = col
                c = Cochain(hoch, arity, tdeg, comps)
                if c.is_zero():
                    continue
                cases += 1
                ac = alt(c, cem, lmap, vmap)
                bar = alt(hoch.diff(c), cem, lmap, vmap).add(
                    cem.diff(ac), scale=-ONE)
                inner = alt(internal_diff(hoch, c), cem, lmap, vmap).add(
                    internal_diff(cem, ac, module_diff=mdiff), scale=-ONE)
                if not bar.is_zero():
                    defects += 1
                if not inner.is_zero():
                    defects += 1
    return {"weight_bound": W, "seed": args.seed, "cases": cases,
            "chain_map_defects": defects, "ok": defects == 0}


def cmd_harrison_split(A, args):
    if A.species != "Com":
        raise InputError("Harrison splitting needs a commutative algebra")
    H, _ = cohomology_algebra(A)
    th = CochainTheory(strict_structure(H))
    degs = sorted(set(H.space.degrees()))
    table = []
    consistent = True
    for arity in range(2, min(args.arity_bound, 4) + 1):
        tmin = -arity * max(degs) if degs else 0
        for tdeg in range(min(-1, tmin), max(degs) + 2):
            basis = th.slice_basis(arity, tdeg)
            if not basis:
                continue
            harr_cols = []
            w_cols = []
            for pair in basis:
                c = th.basis_cochain(arity, tdeg, pair)
                harr_cols.append(th.shuffle_part(c).labels())
                w_cols.append(th.project(c).labels())
            dim_harr = linalg.sparse_rank(harr_cols)
            dim_w = linalg.sparse_rank(w_cols)
            ok = dim_harr + dim_w == len(basis)
            consistent = consistent and ok
            table.append({"arity": arity, "tdeg": tdeg,
                          "dim_hochschild": len(basis),
                          "dim_harrison": dim_harr,
                          "dim_complement": dim_w, "splits": ok})
    return {"slices": table, "splits_everywhere": consistent}


def cmd_compare_com_ass(A, args):
    from .formality import compare_com_vs_ass
    return compare_com_vs_ass(A, _stage_bound(args))


def cmd_compare_lie_ass(A, args):
    from .formality import compare_lie_vs_ass
    rep = compare_lie_vs_ass(A, _stage_bound(args), args.weight_bound)
    for side in ("lie", "envelope"):
        if isinstance(rep.get(side), dict):
            rep[side].pop("structure", None)
    return rep


def cmd_certify(A, args):
    from .formality import degree_bound_certificate, obstruction_sequence
    from .coalgebra import WordCoalgebra
    from .homotopy import KIND_OF
    bound = _stage_bound(args)
    model, _, info = transfer_minimal_model(A, bound)
    unit = info["H_algebra"].unit if A.unit is not None else None
    rep = obstruction_sequence(model, bound, unit=unit)
    rep.pop("structure", None)
    H = model.space
    C = WordCoalgebra(H, KIND_OF[model.species])
    targets = set(H.degrees())
    skip = "s" + unit if unit is not None else None
    table = {}
    for k in range(3, bound + 3):
        n = 0
        for w in C.basis_words(k):
            if skip is not None and skip in w:
                continue
            if sum(H.degree[x] for x in w) + 1 in targets:
                n += 1
        table[str(k)] = n
    rep["obstruction_slice_dims"] = table
    rep["certificate"] = degree_bound_certificate(H, model.species, bound,
                                                  unit=unit)
    return rep


COMMANDS = {
    "check": cmd_check,
    "cohomology": cmd_cohomology,
    "transfer": cmd_transfer,
    "obstructions": cmd_obstructions,
    "envelope": cmd_envelope,
    "alt": cmd_alt,
    "harrison-split": cmd_harrison_split,
    "compare-com-ass": cmd_compare_com_ass,
    "compare-lie-ass": cmd_compare_lie_ass,
    "certify": cmd_certify,
}


def build_parser():
    p = argparse.ArgumentParser(
        prog="homformal",
        description="exact minimal models and formality obstructions")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("file", help=".alg algebra file (or shipped fixture name)")
    p.add_argument("--arity-bound", type=int, default=5)
    p.add_argument("--weight-bound", type=int, default=4)
    p.add_argument("--stage", type=int, default=None)
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        A = load_algebra(args.file)
        result = COMMANDS[args.command](A, args)
        emit(_wrap(args.command, args, A, result), args.format, args.out)
        return 0
    except InvariantError as e:
        emit({"tool": "homformal", "version": __version__,
              "command": args.command,
              "error": {"exit_code": 3, "type": "invariant-violation",
                        "reason": str(e)}}, args.format, args.out)
        return 3
    except InputError as e:
        emit({"tool": "homformal", "version": __version__,
              "command": args.command,
              "error": {"exit_code": 2, "type": "input-error",
                        "reason": str(e)}}, args.format, args.out)
        return 2


if __name__ == "__main__":
    sys.exit(main())
