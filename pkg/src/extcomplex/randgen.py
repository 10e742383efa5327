"""Seeded random generators for groups, complexes, maps and extensions.

Used by both the pytest property suites and the CLI ``selftest``
command. Everything is driven by an explicit ``random.Random`` so that
identical seeds reproduce identical instances byte for byte.
"""

from __future__ import annotations

import random

from .complexes import ChainMap, Complex, cohomology
from .zmodule import (
    FpGroup,
    GroupMorphism,
    IntMatrix,
    MatrixSystem,
    admissible_matrix_lattice,
    unvec_matrix,
)


def rng_for(seed) -> random.Random:
    return random.Random(seed)


def random_unimodular(rng, n, ops=4):
    m = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    for _ in range(ops):
        i, j = rng.randrange(n), rng.randrange(n)
        if i == j:
            continue
        q = rng.choice([-2, -1, 1, 2])
        for k in range(n):
            m[i][k] += q * m[j][k]
    return IntMatrix.from_rows(m, cols=n)


def random_fp_group(rng, max_gens=2, torsion_pool=(2, 2, 3, 4), free_ok=False):
    """Small group with a scrambled (non-diagonal) presentation."""
    n = rng.randint(1, max_gens)
    divs = []
    for _ in range(n):
        if free_ok and rng.random() < 0.2:
            divs.append(0)
        else:
            divs.append(rng.choice(torsion_pool))
    rows = [[divs[i] if j == i else 0 for j in range(n)]
            for i in range(n) if divs[i] != 0]
    rels = IntMatrix.from_rows(rows, cols=n)
    if rels.rows:
        rels = rels * random_unimodular(rng, n)
    return FpGroup(n, rels)


def random_morphism(rng, src: FpGroup, dst: FpGroup, extra_vectors=(), bound=2):
    """Random well-defined morphism, optionally killing extra vectors."""
    basis = admissible_matrix_lattice(src, dst, extra_vectors)
    mat = IntMatrix.zero(dst.n_gens, src.n_gens)
    for v in basis:
        c = rng.randint(-bound, bound)
        if c:
            mat = mat + unvec_matrix(v, dst.n_gens, src.n_gens).scale(c)
    return GroupMorphism(src, dst, mat)


def random_complex(rng, lo=-2, hi=0, max_gens=2, torsion_pool=(2, 2, 3, 4),
                   free_ok=False):
    """Random bounded complex with nontrivial differentials, d o d = 0."""
    terms = {}
    for n in range(lo, hi + 1):
        if rng.random() < 0.15:
            continue  # allow gaps
        terms[n] = random_fp_group(rng, max_gens, torsion_pool, free_ok)
    diffs = {}
    prev = None
    for n in range(lo, hi):
        src = terms.get(n)
        dst = terms.get(n + 1)
        if src is None or dst is None:
            prev = None
            continue
        extra = []
        if prev is not None:
            extra = [prev.matrix.col(j) for j in range(prev.src.n_gens)]
        d = random_morphism(rng, src, dst, extra)
        diffs[n] = d
        prev = d
    return Complex(terms, diffs)


def random_length3(rng, max_h_order=64, max_gens=2, tries=200, free_ok=False):
    """Length-3 complex whose cohomology groups are finite of small order."""
    for _ in range(tries):
        K = random_complex(rng, -2, 0, max_gens, free_ok=free_ok)
        if K.is_zero():
            continue
        ok = True
        for i in range(-2, 1):
            o = cohomology(K, i).pres.order()
            if o is None or o > max_h_order:
                ok = False
                break
        if ok:
            return K
    raise RuntimeError("could not generate a suitable length-3 complex")


def chain_map_lattice(K: Complex, L: Complex):
    """Basis of the lattice of chain maps K -> L (as component dicts)."""
    lo = min(K.lo, L.lo)
    hi = max(K.hi, L.hi)
    sys = MatrixSystem()
    degs = [n for n in range(lo, hi + 1)
            if K.term(n).n_gens and L.term(n).n_gens]
    for n in degs:
        sys.add_unknown(n, L.term(n).n_gens, K.term(n).n_gens)
    for n in degs:
        # well-definedness: f^n maps src relations into dst lattice
        rel = K.term(n).relations
        if rel.rows:
            sys.add_constraint([(None, n, rel.transpose())],
                               lattice_rows=L.term(n).lattice)
    for n in range(lo, hi):
        # commuting: d_L f^n - f^{n+1} d_K = 0 mod relations of L^{n+1}
        terms = []
        if n in degs and L.term(n + 1).n_gens:
            terms.append((L.diff(n).matrix, n, None))
        if (n + 1) in degs and K.term(n).n_gens:
            terms.append((IntMatrix.identity(L.term(n + 1).n_gens).scale(-1),
                          n + 1, K.diff(n).matrix))
        if not terms:
            continue
        sys.add_constraint(terms, lattice_rows=L.term(n + 1).lattice)
    basis = sys.kernel()
    out = []
    for sol in basis:
        comps = {n: GroupMorphism(K.term(n), L.term(n), sol[n]) for n in degs}
        out.append(comps)
    return out


def random_chain_map(rng, K: Complex, L: Complex, bound=1) -> ChainMap:
    basis = chain_map_lattice(K, L)
    lo = min(K.lo, L.lo)
    hi = max(K.hi, L.hi)
    acc = {n: GroupMorphism.zero(K.term(n), L.term(n)) for n in range(lo, hi + 1)}
    for comps in basis:
        c = rng.randint(-bound, bound)
        if not c:
            continue
        for n, f in comps.items():
            acc[n] = acc[n] + GroupMorphism(f.src, f.dst, f.matrix.scale(c))
    return ChainMap(K, L, acc)
