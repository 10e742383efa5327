"""Command-line driver.

Every operation of the library is reachable as a subcommand reading
named entities from a document file (--input). Results print to stdout
as plain text; complexes, fractions and extensions are printed as
re-parseable document fragments. Diagnostics go to stderr.

Exit codes: 0 ok, 2 parse error, 3 validation (bad document or unknown
entity), 4 mathematical precondition, 5 selftest failure.
"""

from __future__ import annotations

import argparse
import sys

from . import docio
from .complexes import (
    ChainMap,
    cohomology,
    is_quasi_iso,
    mapping_cone,
    truncate_ge_good,
    truncate_le_bad,
    truncate_le_good,
)
from .derived import ExtGroup, class_of_roof, ext_group, free_resolution
from .extensions import (
    baer_sum,
    classify_theta,
    equivalence_witness,
    is_split,
    les_hom,
    les_homotopy,
    realize_psi,
    validate,
)
from .roofs import (
    compose,
    fibered_product_complexes,
    fibered_sum_complexes,
    homotopy_cokernel,
    homotopy_kernel,
    naive_fibered_product,
)
from .zmodule import ZModuleError

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_PRECONDITION = 4
EXIT_SELFTEST = 5


class CliError(Exception):
    def __init__(self, msg, code):
        super().__init__(msg)
        self.code = code


def load_document(path) -> docio.Document:
    if path is None:
        raise CliError("this command needs --input FILE", EXIT_PARSE)
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_PARSE)
    try:
        return docio.parse(text)
    except docio.DocParseError as exc:
        raise CliError(f"parse error: {exc}", EXIT_PARSE)
    except docio.DocSemanticError as exc:
        raise CliError(f"invalid document: {exc}", EXIT_VALIDATION)


def need(doc, kind, name):
    pool = {"group": doc.groups, "complex": doc.complexes, "map": doc.maps,
            "fraction": doc.fractions, "extension": doc.extensions,
            "class": doc.classes}[kind]
    if name not in pool:
        raise CliError(f"unknown {kind} {name!r}", EXIT_VALIDATION)
    return pool[name]


def fraction_or_map(doc, name):
    from .roofs import Fraction
    if name in doc.fractions:
        return doc.fractions[name]
    if name in doc.maps:
        return Fraction.strict(doc.maps[name])
    raise CliError(f"unknown fraction or map {name!r}", EXIT_VALIDATION)


def fmt_divisors(divs):
    return "[" + ", ".join(str(d) for d in divs) + "]"


def print_fragment(build):
    em = docio.Emitter()
    build(em)
    sys.stdout.write(em.text())


# ---------------------------------------------------------------------------
# subcommands


def cmd_cohomology(args):
    doc = load_document(args.input)
    K = need(doc, "complex", args.complex)
    degrees = [args.degree] if args.degree is not None else \
        list(range(K.lo, K.hi + 1)) or [0]
    for i in degrees:
        h = cohomology(K, i)
        print(f"H^{i} {fmt_divisors(h.divisors)}")
    return EXIT_OK


def cmd_qis_check(args):
    doc = load_document(args.input)
    f = need(doc, "map", args.map)
    print("quasi-iso" if is_quasi_iso(f) else "not-quasi-iso")
    return EXIT_OK


def cmd_cone(args):
    doc = load_document(args.input)
    f = need(doc, "map", args.map)
    mc = mapping_cone(f)
    print_fragment(lambda em: em.complex(mc.complex, "MC"))
    return EXIT_OK


def cmd_truncate(args):
    doc = load_document(args.input)
    K = need(doc, "complex", args.complex)
    if args.mode == "le":
        T, _ = truncate_le_good(K, args.degree)
    elif args.mode == "ge":
        T, _ = truncate_ge_good(K, args.degree)
    else:
        T, _ = truncate_le_bad(K, args.degree)
    print_fragment(lambda em: em.complex(T, "T"))
    return EXIT_OK


def cmd_pullback(args):
    doc = load_document(args.input)
    f = need(doc, "map", args.f)
    g = need(doc, "map", args.g)
    if f.dst.terms != g.dst.terms:
        raise CliError("pullback needs a common target", EXIT_PRECONDITION)
    fp = fibered_product_complexes(f, g)
    print_fragment(lambda em: em.complex(fp.complex, "PB"))
    return EXIT_OK


def cmd_pushout(args):
    doc = load_document(args.input)
    f = need(doc, "map", args.f)
    g = need(doc, "map", args.g)
    if f.src.terms != g.src.terms:
        raise CliError("pushout needs a common source", EXIT_PRECONDITION)
    fs = fibered_sum_complexes(f, g)
    print_fragment(lambda em: em.complex(fs.complex, "PO"))
    return EXIT_OK


def cmd_ker(args):
    doc = load_document(args.input)
    fr = fraction_or_map(doc, args.fraction)
    print_fragment(lambda em: em.complex(homotopy_kernel(fr), "KER"))
    return EXIT_OK


def cmd_coker(args):
    doc = load_document(args.input)
    fr = fraction_or_map(doc, args.fraction)
    print_fragment(lambda em: em.complex(homotopy_cokernel(fr), "COK"))
    return EXIT_OK


def cmd_compose_roof(args):
    doc = load_document(args.input)
    g = fraction_or_map(doc, args.g)
    f = fraction_or_map(doc, args.f)
    if f.dst.terms != g.src.terms:
        raise CliError("fractions do not compose", EXIT_PRECONDITION)
    print_fragment(lambda em: em.fraction(compose(g, f), "comp"))
    return EXIT_OK


def cmd_class_of_roof(args):
    doc = load_document(args.input)
    fr = fraction_or_map(doc, args.fraction)
    c = class_of_roof(fr)
    print_fragment(lambda em: em.derived_class(c, "cls"))
    return EXIT_OK


def cmd_ext(args):
    doc = load_document(args.input)
    A = need(doc, "complex", args.A)
    B = need(doc, "complex", args.B)
    g, _ = ext_group(A, B, args.degree)
    print(f"Ext^{args.degree} {fmt_divisors(g.divisors)}")
    return EXIT_OK


def cmd_theta(args):
    doc = load_document(args.input)
    e = need(doc, "extension", args.extension)
    rep = validate(e)
    if not rep.ok:
        raise CliError(f"invalid extension: {rep!r}", EXIT_PRECONDITION)
    th = classify_theta(e)
    print_fragment(lambda em: em.derived_class(th, "theta"))
    return EXIT_OK


def cmd_psi(args):
    doc = load_document(args.input)
    x = need(doc, "class", args.cls)
    if x.degree != 1:
        raise CliError("psi needs a degree-1 class", EXIT_PRECONDITION)
    e = realize_psi(x)
    print_fragment(lambda em: em.extension(e, "PSI"))
    return EXIT_OK


def cmd_baer_sum(args):
    doc = load_document(args.input)
    e1 = need(doc, "extension", args.e1)
    e2 = need(doc, "extension", args.e2)
    if e1.A.terms != e2.A.terms or e1.B.terms != e2.B.terms:
        raise CliError("extensions must share A and B", EXIT_PRECONDITION)
    print_fragment(lambda em: em.extension(baer_sum(e1, e2), "SUM"))
    return EXIT_OK


def cmd_split_check(args):
    doc = load_document(args.input)
    e = need(doc, "extension", args.extension)
    ok, section = is_split(e)
    if ok:
        print("split")
        print_fragment(lambda em: em.fraction(section, "section"))
    else:
        print("nonsplit")
    return EXIT_OK


def cmd_equiv_check(args):
    doc = load_document(args.input)
    e1 = need(doc, "extension", args.e1)
    e2 = need(doc, "extension", args.e2)
    w = equivalence_witness(e1, e2)
    if w is None:
        print("inequivalent")
    else:
        ok = w.validate()
        print("equivalent" if ok else "witness-invalid")
        if not ok:
            raise CliError("constructed witness failed validation",
                           EXIT_PRECONDITION)
    return EXIT_OK


def cmd_les_homotopy(args):
    doc = load_document(args.input)
    e = need(doc, "extension", args.extension)
    rep = les_homotopy(e)
    names = ["pi2(B)", "pi2(E)", "pi2(A)", "pi1(B)", "pi1(E)", "pi1(A)",
             "pi0(B)", "pi0(E)", "pi0(A)"]
    for name, g in zip(names, rep.groups):
        print(f"{name} {fmt_divisors(g.divisors)}")
    print(f"injective-head {rep.injective_head}")
    for k, ok in enumerate(rep.node_exact):
        print(f"exact-at {names[k + 1]} {ok}")
    print(f"surjective-tail {rep.surjective_tail}")
    print(f"ok {rep.ok}")
    return EXIT_OK if rep.ok else EXIT_PRECONDITION


def cmd_les_hom(args):
    doc = load_document(args.input)
    e = need(doc, "extension", args.extension)
    X = need(doc, "complex", args.X)
    rep = les_hom(e, X)
    names = ["Hom(X,B)", "Hom(X,E)", "Hom(X,A)", "Ext1(X,B)"]
    for name, g in zip(names, rep.groups):
        print(f"{name} {fmt_divisors(g.divisors)}")
    for k, ok in enumerate(rep.node_exact):
        print(f"exact-at {names[k + 1]} {ok}")
    if rep.boundary_of_id is not None:
        print("boundary-of-id [" + ", ".join(str(c) for c in
                                             rep.boundary_of_id.coords) + "]")
    print(f"ok {rep.ok}")
    return EXIT_OK if rep.ok else EXIT_PRECONDITION


def cmd_contrast_naive(args):
    doc = load_document(args.input)
    f = need(doc, "map", args.f)
    g = need(doc, "map", args.g)
    naive = naive_fibered_product(f, g)
    good = fibered_product_complexes(f, g).complex
    for i in range(-2, 1):
        dn = cohomology(naive, i).divisors
        dg = cohomology(good, i).divisors
        marker = "" if dn == dg else "  <- differ"
        print(f"H^{i} naive {fmt_divisors(dn)} good {fmt_divisors(dg)}{marker}")
    return EXIT_OK


def cmd_selftest(args):
    from .selftest import run_selftest
    failures = run_selftest(args.seed, args.count, verbose=True)
    if failures:
        print(f"FAILED {failures} case(s)", file=sys.stderr)
        return EXIT_SELFTEST
    print("selftest ok")
    return EXIT_OK


def main(argv=None):
    ap = argparse.ArgumentParser(
        prog="extcomplex",
        description="exact calculus of length-3 complexes: roofs, homotopy "
                    "pullbacks/pushouts, Ext groups, extension classification")
    ap.add_argument("--input", help="document file", default=None)
    ap.add_argument("--format", choices=["text"], default="text")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, *specs):
        p = sub.add_parser(name)
        for spec in specs:
            p.add_argument(**spec)
        p.set_defaults(fn=fn)
        return p

    add("cohomology", cmd_cohomology,
        dict(dest="complex"), dict(dest="degree", nargs="?", type=int,
                                   default=None))
    add("qis-check", cmd_qis_check, dict(dest="map"))
    add("cone", cmd_cone, dict(dest="map"))
    p = sub.add_parser("truncate")
    p.add_argument("complex")
    p.add_argument("mode", choices=["le", "ge", "bad"])
    p.add_argument("degree", type=int)
    p.set_defaults(fn=cmd_truncate)
    add("pullback", cmd_pullback, dict(dest="f"), dict(dest="g"))
    add("pushout", cmd_pushout, dict(dest="f"), dict(dest="g"))
    add("ker", cmd_ker, dict(dest="fraction"))
    add("coker", cmd_coker, dict(dest="fraction"))
    add("compose-roof", cmd_compose_roof, dict(dest="g"), dict(dest="f"))
    add("class-of-roof", cmd_class_of_roof, dict(dest="fraction"))
    add("ext", cmd_ext, dict(dest="A"), dict(dest="B"),
        dict(dest="degree", type=int))
    add("theta", cmd_theta, dict(dest="extension"))
    add("psi", cmd_psi, dict(dest="cls"))
    add("baer-sum", cmd_baer_sum, dict(dest="e1"), dict(dest="e2"))
    add("split-check", cmd_split_check, dict(dest="extension"))
    add("equiv-check", cmd_equiv_check, dict(dest="e1"), dict(dest="e2"))
    add("les-homotopy", cmd_les_homotopy, dict(dest="extension"))
    add("les-hom", cmd_les_hom, dict(dest="extension"), dict(dest="X"))
    add("contrast-naive", cmd_contrast_naive, dict(dest="f"), dict(dest="g"))
    p = sub.add_parser("selftest")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=20)
    p.set_defaults(fn=cmd_selftest)

    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except ZModuleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
