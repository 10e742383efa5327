"""Seeded property suites behind the ``selftest`` CLI command.

Each suite prints one line per case, deterministic for a fixed seed;
the return value counts failures (nonzero means the library broke one
of its own theorems on a generated instance).
"""

from __future__ import annotations

from math import gcd

from .complexes import ChainMap, cohomology, direct_sum, induced_map, single
from .derived import ExtGroup, ext_group, free_resolution
from .extensions import (
    baer_sum,
    classify_theta,
    les_homotopy,
    neutral_extension,
    realize_psi,
    validate,
)
from .randgen import random_chain_map, random_length3, rng_for
from .roofs import fibered_product_complexes, naive_fibered_product
from .zmodule import FpGroup, IntMatrix, is_exact_at, smith_normal_form


def _check_snf(rng):
    m = rng.randint(1, 6)
    n = rng.randint(1, 6)
    M = IntMatrix.from_rows([[rng.randint(-100, 100) for _ in range(n)]
                             for _ in range(m)])
    s = smith_normal_form(M)
    if (s.U * M * s.V).entries != s.S.entries:
        return "UMV != S"
    diag = s.diagonal()
    for i in range(len(diag) - 1):
        if diag[i + 1] and (diag[i] == 0 or diag[i + 1] % diag[i]):
            return "divisibility chain broken"
    if (s.U * s.uinv).entries != IntMatrix.identity(m).entries:
        return "U inverse wrong"
    return None


def _check_ext_table(rng):
    m = rng.randint(2, 12)
    n = rng.randint(2, 12)
    g, _ = ext_group(single(FpGroup.cyclic(m)), single(FpGroup.cyclic(n)), 1)
    want = gcd(m, n)
    if list(g.divisors) != ([want] if want > 1 else []):
        return f"Ext^1(Z/{m},Z/{n}) = {list(g.divisors)}, want Z/{want}"
    return None


def _random_class(rng, ext1):
    return ext1.make_class(tuple(rng.randrange(d) if d else rng.randint(-2, 2)
                                 for d in ext1.divisors))


def _psi_instance(rng):
    while True:
        A = random_length3(rng, max_h_order=8, max_gens=1)
        B = random_length3(rng, max_h_order=8, max_gens=1)
        ext1 = ExtGroup(A, B, 1)
        if ext1.divisors:
            return A, B, ext1


def _check_theta_psi(rng):
    A, B, ext1 = _psi_instance(rng)
    x = _random_class(rng, ext1)
    e = realize_psi(x)
    rep = validate(e)
    if not (rep.cond_a and rep.cond_b and rep.roof_coherence):
        return "Psi output failed validation"
    th = classify_theta(e, ext1)
    if th.coords != x.coords:
        return f"theta(psi(x)) = {th.coords} != {x.coords}"
    return None


def _check_conditions(rng):
    A, B, ext1 = _psi_instance(rng)
    e = realize_psi(_random_class(rng, ext1))
    kind = rng.choice(["keep", "zero_j", "zero_i"])
    if kind == "zero_j":
        from .complexes import ChainHomotopy
        from .extensions import Extension
        pi2 = ChainMap.zero(e.E, e.A)
        comp = pi2.compose(e.i.p)
        e = Extension(e.A, e.B, e.E, e.i, pi2,
                      ChainHomotopy.zero(comp, ChainMap.zero(e.i.apex, e.A)))
    elif kind == "zero_i":
        from .complexes import ChainHomotopy
        from .extensions import Extension
        from .roofs import Fraction
        i2 = Fraction(e.i.q, ChainMap.zero(e.i.apex, e.E), check=False)
        comp = e.pi.compose(i2.p)
        e = Extension(e.A, e.B, e.E, i2, e.pi,
                      ChainHomotopy.zero(comp, ChainMap.zero(i2.apex, e.A)))
    rep = validate(e)
    if rep.cond_a != rep.cond_b:
        return f"cond_a={rep.cond_a} != cond_b={rep.cond_b} ({kind})"
    return None


def _check_les(rng):
    A, B, ext1 = _psi_instance(rng)
    e = realize_psi(_random_class(rng, ext1))
    rep = les_homotopy(e)
    if not rep.ok:
        return "homotopy LES not exact"
    return None


def _check_baer(rng):
    A, B, ext1 = _psi_instance(rng)
    x1, x2 = _random_class(rng, ext1), _random_class(rng, ext1)
    s = classify_theta(baer_sum(realize_psi(x1), realize_psi(x2)), ext1)
    want = (x1 + x2).coords
    if s.coords != want:
        return f"theta(sum) = {s.coords}, want {want}"
    return None


def _check_mayer_vietoris(rng):
    A = random_length3(rng, max_h_order=16, max_gens=1)
    B = random_length3(rng, max_h_order=16, max_gens=1)
    P = random_length3(rng, max_h_order=16, max_gens=1)
    f = random_chain_map(rng, A, P)
    g = random_chain_map(rng, B, P)
    from .complexes import mapping_cone, transport_on_h
    fp = fibered_product_complexes(f, g)
    S, i1, i2, p1, p2 = direct_sum(A, B)
    u = ChainMap(S, P, (f.compose(p1) - g.compose(p2)).comps)
    cc = fp.pre_truncation.complex
    mc = mapping_cone(u)
    for i in range(-2, 1):
        pr = induced_map(fp.pre_truncation.pr_src, i)
        um = induced_map(u, i)
        hm = cohomology(mc.complex, i)
        hcc1 = cohomology(cc, i + 1)
        step = induced_map(mc.inclusion, i, cohomology(P, i), hm)
        conn = transport_on_h(hm, hcc1, lambda v: v).compose(step)
        if not is_exact_at(pr, um) or not is_exact_at(um, conn):
            return f"MV fails at degree {i}"
    return None


SUITES = [
    ("snf", _check_snf),
    ("ext-table", _check_ext_table),
    ("theta-psi", _check_theta_psi),
    ("conditions", _check_conditions),
    ("les", _check_les),
    ("baer", _check_baer),
    ("mayer-vietoris", _check_mayer_vietoris),
]


def run_selftest(seed: int, count: int, verbose=False) -> int:
    failures = 0
    for name, fn in SUITES:
        for case in range(count):
            rng = rng_for((seed, name, case))
            msg = fn(rng)
            status = "ok" if msg is None else f"FAIL {msg}"
            if verbose:
                print(f"{name} case {case}: {status}")
            if msg is not None:
                failures += 1
    return failures
