"""Derived-category computations via free resolutions.

``Ext^i(A, B)`` is computed as ``H^i(Hom(P, B))`` for a bounded free
resolution ``P -> A``; over the integers (hereditary, punctual site)
this equals the derived Hom groups in every degree. Degree-i cocycles
of the Hom complex are exactly chain maps ``P -> B[i]`` under the
pinned shift sign, so classes, roofs and connecting maps all move
through one representation.

All lifting problems ("find s with w o s homotopic to t") are solved
as one joint integer linear system over the unknown components of s
and of the homotopy; sources are free, so no well-definedness
constraints arise on s.
"""

from __future__ import annotations

from .complexes import (
    ChainHomotopy,
    ChainMap,
    CohomologyGroup,
    Complex,
    cohomology,
    is_quasi_iso,
    shift,
    shift_map,
)
from .roofs import Fraction
from .zmodule import (
    FpGroup,
    GroupMorphism,
    IntMatrix,
    MatrixSystem,
    ZModuleError,
    lattice_basis,
    solve_linear,
)


# ---------------------------------------------------------------------------
# free resolutions


class FreeResolution:
    def __init__(self, of: Complex, P: Complex, eps: ChainMap):
        self.of = of
        self.P = P
        self.eps = eps


def free_resolution(A: Complex, variant: int = 0) -> FreeResolution:
    """Bounded free resolution P -> A with P^n = F_n (+) K_{n+1}.

    F_n is the free cover of A^n on its generators and K_{n+1} the
    relation lattice of A^{n+1}; the correction block of the
    differential kills d~ o d~ inside the lattice. ``variant > 0``
    direct-sums a contractible two-term free summand, producing a
    genuinely different resolution of the same complex (used by the
    independence tests).
    """
    if A.is_zero():
        P = Complex({}, {})
        return FreeResolution(A, P, ChainMap(P, A, {}, check=False))
    lo, hi = A.lo, A.hi
    kb = {}   # degree -> IntMatrix whose columns span the relation lattice
    for n in range(lo, hi + 1):
        rows = lattice_basis(A.term(n).relations.entries, A.term(n).n_gens)
        kb[n] = IntMatrix.from_rows(rows, cols=A.term(n).n_gens).transpose()
    terms, eps_comps = {}, {}
    rank_f = {n: A.term(n).n_gens for n in range(lo, hi + 1)}
    rank_k = {n: kb[n].cols for n in range(lo, hi + 1)}
    for n in range(lo - 1, hi + 1):
        r = rank_f.get(n, 0) + rank_k.get(n + 1, 0)
        if r:
            terms[n] = FpGroup.free(r)
    diffs = {}
    for n in range(lo - 1, hi):
        if n not in terms or (n + 1) not in terms:
            continue
        rf, rk = rank_f.get(n, 0), rank_k.get(n + 1, 0)
        rf1, rk1 = rank_f.get(n + 1, 0), rank_k.get(n + 2, 0)
        dt = A.diff(n).matrix if rf and rf1 else IntMatrix.zero(rf1, rf)
        top = dt.hstack(kb.get(n + 1, IntMatrix.zero(rf1, 0))
                        if rk else IntMatrix.zero(rf1, 0))
        if rk1:
            cols = []
            d_next = A.diff(n + 1).matrix
            for j in range(rf):
                v = d_next.apply(dt.col(j)) if rf1 else \
                    tuple([0] * A.term(n + 2).n_gens)
                c = solve_linear(kb[n + 2], v)
                if c is None:
                    raise ZModuleError("d o d escapes the relation lattice")
                cols.append(c)
            for j in range(rk):
                v = d_next.apply(kb[n + 1].col(j)) if rf1 else \
                    tuple([0] * A.term(n + 2).n_gens)
                c = solve_linear(kb[n + 2], v)
                if c is None:
                    raise ZModuleError("lattice image escapes the relation lattice")
                cols.append(c)
            bottom = IntMatrix.from_rows(cols, cols=rk1).transpose().scale(-1)
        else:
            bottom = IntMatrix.zero(0, rf + rk)
        diffs[n] = GroupMorphism(terms[n], terms[n + 1], top.vstack(bottom))
    for n in range(lo, hi + 1):
        if n not in terms:
            continue
        rf, rk = rank_f.get(n, 0), rank_k.get(n + 1, 0)
        mat = IntMatrix.identity(rf).hstack(IntMatrix.zero(rf, rk))
        eps_comps[n] = GroupMorphism(terms[n], A.term(n), mat)
    P = Complex(terms, diffs)
    eps = ChainMap(P, A, eps_comps)
    if variant:
        # direct-sum a contractible free two-term pad: a different
        # resolution of the same complex
        from .complexes import direct_sum
        pad_deg = -1 - (variant % 2)
        pad_rank = 1 + variant % 3
        F = FpGroup.free(pad_rank)
        pad = Complex({pad_deg - 1: F, pad_deg: F},
                      {pad_deg - 1: GroupMorphism(F, F, IntMatrix.identity(pad_rank))})
        S, injP, injpad, prjP, prjpad = direct_sum(P, pad)
        P = S
        eps = eps.compose(prjP)
    if not is_quasi_iso(eps):
        raise ZModuleError("resolution augmentation failed to be a quasi-iso")
    return FreeResolution(A, P, eps)


# ---------------------------------------------------------------------------
# Hom complexes


class HomComplex:
    """Hom(P, B) for free bounded P: term^n = (+)_k Hom(P^k, B^{k+n}).

    Summands are ordered by increasing k; within the k-summand the
    generators are the matrix entries of a map P^k -> B^{k+n} laid out
    column-major (columns of the matrix are the images of the P^k
    basis). Packing converts map families to element vectors and back.
    """

    def __init__(self, P: Complex, B: Complex):
        for n in P.degrees():
            if P.term(n).relations.rows:
                raise ZModuleError("Hom complex needs a free source")
        self.P = P
        self.B = B
        lo = B.lo - P.hi
        hi = B.hi - P.lo
        self.layout = {}     # n -> list of (k, rank P^k, gens B^{k+n}, offset)
        terms = {}
        for n in range(lo, hi + 1):
            off = 0
            lay = []
            rels = []
            for k in P.degrees():
                rk = P.term(k).n_gens
                g = B.term(k + n)
                if rk == 0 or g.n_gens == 0:
                    continue
                lay.append((k, rk, g.n_gens, off))
                rels.extend([IntMatrix.from_rows(g.relations.entries, cols=g.n_gens)]
                            * rk)
                off += rk * g.n_gens
            self.layout[n] = lay
            if off:
                terms[n] = FpGroup(off, IntMatrix.block_diag(rels)
                                   if rels else IntMatrix.zero(0, off))
        diffs = {}
        for n in range(lo, hi):
            if n not in terms or (n + 1) not in terms:
                continue
            src_t, dst_t = terms[n], terms[n + 1]
            rows = [[0] * src_t.n_gens for _ in range(dst_t.n_gens)]
            sign = -1 if n % 2 else 1
            src_lay = {k: (rk, g, off) for k, rk, g, off in self.layout[n]}
            dst_lay = {k: (rk, g, off) for k, rk, g, off in self.layout[n + 1]}
            for k, (rk, gsz, off) in src_lay.items():
                # postcomposition d_B o f_k : contributes to output summand k
                if k in dst_lay:
                    dB = self.B.diff(k + n).matrix
                    orf, ogsz, ooff = dst_lay[k]
                    for j in range(rk):
                        for a in range(ogsz):
                            for b in range(gsz):
                                if dB[a, b]:
                                    rows[ooff + j * ogsz + a][off + j * gsz + b] \
                                        += dB[a, b]
                # precomposition -(-1)^n f_k o d_P : output summand k-1
                if (k - 1) in dst_lay:
                    dP = self.P.diff(k - 1).matrix
                    orf, ogsz, ooff = dst_lay[k - 1]
                    for j in range(orf):
                        for l in range(rk):
                            c = dP[l, j]
                            if c:
                                for a in range(gsz):
                                    rows[ooff + j * ogsz + a][off + l * gsz + a] \
                                        += -sign * c
            diffs[n] = GroupMorphism(src_t, dst_t,
                                     IntMatrix.from_rows(rows, cols=src_t.n_gens))
        self.complex = Complex(terms, diffs)

    def pack(self, comps, n):
        """Element vector of term^n from {k: GroupMorphism P^k -> B^{k+n}}."""
        vec = [0] * self.complex.term(n).n_gens
        for k, rk, gsz, off in self.layout.get(n, []):
            f = comps.get(k)
            if f is None:
                continue
            for j in range(rk):
                col = f.matrix.col(j)
                for a in range(gsz):
                    vec[off + j * gsz + a] = col[a]
        return tuple(vec)

    def unpack(self, vec, n):
        out = {}
        for k, rk, gsz, off in self.layout.get(n, []):
            cols = [[vec[off + j * gsz + a] for a in range(gsz)] for j in range(rk)]
            mat = IntMatrix.from_rows(cols, cols=gsz).transpose()
            out[k] = GroupMorphism(self.P.term(k), self.B.term(k + n), mat)
        return out

    def pack_chain_map(self, f: ChainMap, n):
        """Pack a chain map P -> B[n] as a degree-n element."""
        return self.pack({k: f.comp(k) for k in self.P.degrees()}, n)

    def unpack_chain_map(self, vec, n) -> ChainMap:
        """Degree-n cocycle as a chain map P -> shift(B, n)."""
        comps = self.unpack(vec, n)
        tgt = shift(self.B, n)
        return ChainMap(self.P, tgt,
                        {k: GroupMorphism(self.P.term(k), tgt.term(k), m.matrix)
                         for k, m in comps.items()})


def hom_complex(P: Complex, B: Complex) -> HomComplex:
    return HomComplex(P, B)


# ---------------------------------------------------------------------------
# Ext groups and derived classes


class ExtGroup:
    """Ext^i(A, B) = H^i(Hom(P_A, B)) with cocycle conversion."""

    def __init__(self, A: Complex, B: Complex, i: int, res: FreeResolution = None):
        self.A = A
        self.B = B
        self.i = i
        self.res = res if res is not None else free_resolution(A)
        self.hom = hom_complex(self.res.P, B)
        self.h = cohomology(self.hom.complex, i)
        self.group = self.h.group
        self.divisors = self.h.divisors

    def coords_of(self, f: ChainMap):
        """Class coordinates of a cocycle chain map P -> B[i]."""
        return self.h.coords_of(self.hom.pack_chain_map(f, self.i))

    def cocycle_of(self, coords) -> ChainMap:
        return self.hom.unpack_chain_map(self.h.lift(coords), self.i)

    def zero(self):
        return (0,) * len(self.divisors)

    def classes(self):
        """All class coordinate tuples (finite groups only)."""
        return self.group.elements()

    def make_class(self, coords) -> "DerivedClass":
        coords = tuple(c % d if d else c for c, d in zip(coords, self.divisors))
        return DerivedClass(self, coords)


class DerivedClass:
    """Element of Ext^i(src, dst) with an explicit cocycle representative."""

    def __init__(self, ext: ExtGroup, coords, cocycle: ChainMap = None):
        self.ext = ext
        self.coords = tuple(coords)
        self._cocycle = cocycle

    @property
    def src(self):
        return self.ext.A

    @property
    def dst(self):
        return self.ext.B

    @property
    def degree(self):
        return self.ext.i

    @property
    def group(self):
        return self.ext.group

    @property
    def cocycle(self) -> ChainMap:
        if self._cocycle is None:
            self._cocycle = self.ext.cocycle_of(self.coords)
        return self._cocycle

    def is_zero(self):
        return all(c == 0 for c in self.coords)

    def __add__(self, other):
        return self.ext.make_class(tuple(a + b for a, b in
                                         zip(self.coords, other.coords)))

    def __sub__(self, other):
        return self.ext.make_class(tuple(a - b for a, b in
                                         zip(self.coords, other.coords)))

    def __neg__(self):
        return self.ext.make_class(tuple(-a for a in self.coords))

    def __repr__(self):
        return (f"DerivedClass(degree={self.degree}, coords={list(self.coords)},"
                f" divisors={list(self.ext.divisors)})")


def ext_group(A: Complex, B: Complex, i: int):
    """Spec surface: the group plus generator cocycles."""
    ext = ExtGroup(A, B, i)
    gens = []
    for j in range(len(ext.divisors)):
        e = tuple(1 if k == j else 0 for k in range(len(ext.divisors)))
        gens.append(ext.cocycle_of(e))
    return ext.group, gens


# ---------------------------------------------------------------------------
# lifting and homotopy solvers


def lift_through_map(target: ChainMap, w: ChainMap):
    """Find s: P -> Y and h: w o s ~ target, for free bounded P.

    Returns (s, h) or None when the class of ``target`` does not lift
    through ``w`` (for quasi-iso w a solution always exists).
    """
    P = target.src
    Y, Z = w.src, w.dst
    if Z.terms != target.dst.terms:
        raise ZModuleError("lift target mismatch")
    sys = MatrixSystem()
    s_degs = [k for k in P.degrees() if P.term(k).n_gens and Y.term(k).n_gens]
    h_degs = [k for k in range(min(P.lo, Z.lo), max(P.hi, Z.hi) + 2)
              if P.term(k).n_gens and Z.term(k - 1).n_gens]
    for k in s_degs:
        sys.add_unknown(("s", k), Y.term(k).n_gens, P.term(k).n_gens)
    for k in h_degs:
        sys.add_unknown(("h", k), Z.term(k - 1).n_gens, P.term(k).n_gens)
    # s is a chain map: d_Y s_k - s_{k+1} d_P = 0 mod rel(Y^{k+1})
    for k in range(P.lo - 1, P.hi + 1):
        terms = []
        if k in s_degs and Y.term(k + 1).n_gens:
            terms.append((Y.diff(k).matrix, ("s", k), None))
        if (k + 1) in s_degs and P.term(k).n_gens:
            terms.append((IntMatrix.identity(Y.term(k + 1).n_gens).scale(-1),
                          ("s", k + 1), P.diff(k).matrix))
        if terms:
            sys.add_constraint(terms, lattice_rows=Y.term(k + 1).lattice)
    # homotopy: d_Z h_k + h_{k+1} d_P + w_k s_k = target_k mod rel(Z^k)
    for k in range(P.lo, P.hi + 1):
        if not P.term(k).n_gens or not Z.term(k).n_gens:
            continue
        terms = []
        if k in h_degs:
            terms.append((Z.diff(k - 1).matrix, ("h", k), None))
        if (k + 1) in h_degs:
            terms.append((None, ("h", k + 1), P.diff(k).matrix))
        if k in s_degs:
            terms.append((w.comp(k).matrix, ("s", k), None))
        if not terms:
            if not target.comp(k).is_zero_morphism():
                return None
            continue
        sys.add_constraint(terms, rhs=target.comp(k).matrix,
                           lattice_rows=Z.term(k).lattice)
    sol = sys.solve()
    if sol is None:
        return None
    s = ChainMap(P, Y, {k: GroupMorphism(P.term(k), Y.term(k), sol[("s", k)])
                        for k in s_degs})
    ws = w.compose(s)
    h = ChainHomotopy(ws, target,
                      {k: GroupMorphism(P.term(k), Z.term(k - 1), sol[("h", k)])
                       for k in h_degs})
    return s, h


def lift_through_qis(target: ChainMap, q: ChainMap):
    """Lift through a quasi-isomorphism; always solvable for free source."""
    out = lift_through_map(target, q)
    if out is None:
        raise ZModuleError("lift through quasi-isomorphism failed "
                           "(is the left leg really a quasi-iso?)")
    return out


def homotopic(f: ChainMap, g: ChainMap):
    """A homotopy h with g - f = d h + h d, or None.

    Works for arbitrary (not necessarily free) sources; each component
    must itself be a well-defined morphism, which adds congruence
    constraints on the relation rows.
    """
    X, Y = f.src, g.dst
    diffm = g - f
    sys = MatrixSystem()
    degs = [k for k in range(min(X.lo, Y.lo), max(X.hi, Y.hi) + 2)
            if X.term(k).n_gens and Y.term(k - 1).n_gens]
    for k in degs:
        sys.add_unknown(k, Y.term(k - 1).n_gens, X.term(k).n_gens)
        rel = X.term(k).relations
        if rel.rows:
            sys.add_constraint([(None, k, rel.transpose())],
                               lattice_rows=Y.term(k - 1).lattice)
    for k in range(min(X.lo, Y.lo), max(X.hi, Y.hi) + 1):
        if not X.term(k).n_gens or not Y.term(k).n_gens:
            if not diffm.comp(k).is_zero_morphism():
                return None
            continue
        terms = []
        if k in degs:
            terms.append((Y.diff(k - 1).matrix, k, None))
        if (k + 1) in degs:
            terms.append((None, k + 1, X.diff(k).matrix))
        if not terms:
            if not diffm.comp(k).is_zero_morphism():
                return None
            continue
        sys.add_constraint(terms, rhs=diffm.comp(k).matrix,
                           lattice_rows=Y.term(k).lattice)
    sol = sys.solve()
    if sol is None:
        return None
    return ChainHomotopy(f, g, {k: GroupMorphism(X.term(k), Y.term(k - 1), sol[k])
                                for k in degs})


# ---------------------------------------------------------------------------
# roofs <-> classes


def class_of_roof(f: Fraction, dst_base: Complex = None, degree: int = 0,
                  res: FreeResolution = None, ext: ExtGroup = None) -> DerivedClass:
    """Derived class of a roof.

    By default the class lives in Ext^0(src, dst); pass ``dst_base``
    and ``degree`` when ``f.dst`` is structurally ``shift(dst_base,
    degree)`` to land in Ext^degree(src, dst_base).
    """
    if dst_base is None:
        dst_base, degree = f.dst, 0
    if ext is None:
        ext = ExtGroup(f.src, dst_base, degree, res=res)
    s, _ = lift_through_qis(ext.res.eps, f.q)
    cocycle = f.p.compose(s)
    coords = ext.h.coords_of(ext.hom.pack_chain_map(cocycle, degree))
    return DerivedClass(ext, coords, cocycle)


def roof_of_class(c: DerivedClass) -> Fraction:
    """Normal-form roof (eps, P, cocycle): src <- P -> shift(dst, degree)."""
    return Fraction(c.ext.res.eps, c.cocycle, check=False)


def transfer_class(x: DerivedClass, ext_new: ExtGroup) -> DerivedClass:
    """The same class expressed against another resolution of the source."""
    if x.src.terms != ext_new.A.terms or x.dst.terms != ext_new.B.terms \
            or x.degree != ext_new.i:
        raise ZModuleError("class transfer needs matching (src, dst, degree)")
    c, _ = lift_through_qis(ext_new.res.eps, x.ext.res.eps)
    cocycle = x.cocycle.compose(c)
    coords = ext_new.h.coords_of(ext_new.hom.pack_chain_map(cocycle, ext_new.i))
    return DerivedClass(ext_new, coords, cocycle)


def compose_classes(g: DerivedClass, f: DerivedClass) -> DerivedClass:
    """Composite class g o f in Ext^{i+j}(f.src, g.dst).

    f: Ext^i(A, B), g: Ext^j(B, C); f's cocycle is lifted through the
    shifted resolution of B and then composed with g's shifted cocycle.
    """
    if f.dst.terms != g.src.terms:
        raise ZModuleError("classes do not compose")
    i = f.degree
    eps_i = shift_map(g.ext.res.eps, i)
    s, _ = lift_through_qis(f.cocycle, eps_i)
    cocycle = shift_map(g.cocycle, i).compose(s)
    ext = ExtGroup(f.src, g.dst, i + g.degree, res=f.ext.res)
    coords = ext.h.coords_of(ext.hom.pack_chain_map(cocycle, ext.i))
    return DerivedClass(ext, coords, cocycle)
