"""Bounded cochain complexes of finitely presented abelian groups.

A complex stores one FpGroup per degree in a bounded window plus the
differentials; d o d = 0 is re-checked on every construction. Length-3
complexes (degrees -2..0) are the user-facing case, but cones, shifts
and resolutions move through wider windows, so nothing here assumes the
window.

Sign conventions are pinned to fixed matrix shapes and never inferred:

* shift:         (K[i])^n = K^{n+i},  d_{K[i]} = (-1)^i d_K
* mapping cone:  MC(u)^n = src^{n+1} (+) dst^n,
                 d(x, y) = (d x, u(x) - d y)
* cocone:        CC(u)^n = src^n (+) dst^{n-1},
                 d(x, p) = (d x, u(x) - d p)

With these shapes MC matches the printed push-out matrices
[[d_src, 0], [u, -d_dst]] and CC matches the printed pull-back
matrices; CC(u) equals MC(u)[-1] up to the alternating-sign
isomorphism (-1)^n id, which ``cocone`` returns explicitly.  The
canonical inclusion dst -> MC(u) needs the alternating sign
(-1)^{n+1} to be a chain map, matching the sign pattern of the
printed descent data for the push-out inclusions.
"""

from __future__ import annotations

from .zmodule import (
    FpGroup,
    GroupMorphism,
    IntMatrix,
    ZModuleError,
    babai_reduce,
    cokernel,
    invert_iso,
    is_iso,
    kernel,
    lattice_basis,
    preimage_lattice,
    solve_linear,
)

ZERO_GROUP = FpGroup(0, IntMatrix.zero(0, 0))


def fp_direct_sum(groups):
    """Direct sum of FpGroups with injection and projection matrices."""
    groups = list(groups)
    n = sum(g.n_gens for g in groups)
    rels = IntMatrix.block_diag([g.relations for g in groups])
    total = FpGroup(n, rels)
    injections, projections = [], []
    offset = 0
    for g in groups:
        inj = [[0] * g.n_gens for _ in range(n)]
        prj = [[0] * n for _ in range(g.n_gens)]
        for k in range(g.n_gens):
            inj[offset + k][k] = 1
            prj[k][offset + k] = 1
        injections.append(GroupMorphism(g, total, IntMatrix.from_rows(inj, cols=g.n_gens)))
        projections.append(GroupMorphism(total, g, IntMatrix.from_rows(prj, cols=n)))
        offset += g.n_gens
    return total, injections, projections


class Complex:
    """Bounded cochain complex; immutable by convention after __init__."""

    def __init__(self, terms, diffs, check=True):
        terms = {int(n): g for n, g in terms.items() if g.n_gens > 0}
        self.terms = terms
        self.lo = min(terms) if terms else 0
        self.hi = max(terms) if terms else 0
        self.diffs = {}
        for n, f in diffs.items():
            n = int(n)
            if f.matrix.rows == 0 or f.matrix.cols == 0:
                continue
            self.diffs[n] = f
        if check:
            self.validate()

    def term(self, n):
        return self.terms.get(n, ZERO_GROUP)

    def diff(self, n):
        f = self.diffs.get(n)
        if f is None:
            return GroupMorphism.zero(self.term(n), self.term(n + 1))
        return f

    def degrees(self):
        return range(self.lo, self.hi + 1)

    def is_zero(self):
        return not self.terms

    def is_length3(self):
        return self.is_zero() or (self.lo >= -2 and self.hi <= 0)

    def validate(self):
        for n, f in self.diffs.items():
            if f.src.n_gens != self.term(n).n_gens or f.dst.n_gens != self.term(n + 1).n_gens:
                raise ZModuleError(f"differential at degree {n} has wrong shape")
            f.check()
        for n in self.degrees():
            comp = self.diff(n + 1).compose(self.diff(n))
            if not comp.is_zero_morphism():
                raise ZModuleError(f"d o d != 0 at degree {n}")
        return self

    def total_order(self):
        """Product of all term orders; None if any term is infinite."""
        total = 1
        for g in self.terms.values():
            o = g.order()
            if o is None:
                return None
            total *= o
        return total

    def __repr__(self):
        parts = [f"{n}:{list(self.term(n).divisors)}" for n in self.degrees()]
        return "Complex(" + ", ".join(parts) + ")"


def single(G, degree=0):
    """Complex with one group concentrated in a single degree."""
    return Complex({degree: G}, {})


def zero_complex():
    return Complex({}, {})


class ChainMap:
    """Degreewise morphisms commuting with the differentials."""

    def __init__(self, src, dst, comps, check=True):
        self.src = src
        self.dst = dst
        self.comps = {}
        for n, f in comps.items():
            if f.matrix.rows == 0 or f.matrix.cols == 0:
                continue
            self.comps[int(n)] = f
        if check:
            self.validate()

    @staticmethod
    def identity(K):
        return ChainMap(K, K, {n: GroupMorphism.identity(K.term(n))
                               for n in K.degrees()}, check=False)

    @staticmethod
    def zero(src, dst):
        return ChainMap(src, dst, {}, check=False)

    def comp(self, n):
        f = self.comps.get(n)
        if f is None:
            return GroupMorphism.zero(self.src.term(n), self.dst.term(n))
        return f

    def validate(self):
        for n, f in self.comps.items():
            if (f.matrix.cols != self.src.term(n).n_gens
                    or f.matrix.rows != self.dst.term(n).n_gens):
                raise ZModuleError(f"chain map component at {n} has wrong shape")
            f.check()
        lo = min(self.src.lo, self.dst.lo)
        hi = max(self.src.hi, self.dst.hi)
        for n in range(lo, hi + 1):
            left = self.dst.diff(n).compose(self.comp(n))
            right = self.comp(n + 1).compose(self.src.diff(n))
            if not (left - right).is_zero_morphism():
                raise ZModuleError(f"chain map does not commute with d at degree {n}")
        return self

    def compose(self, other):
        lo = min(other.src.lo, self.dst.lo)
        hi = max(other.src.hi, self.dst.hi)
        comps = {}
        for n in range(lo, hi + 1):
            comps[n] = self.comp(n).compose(other.comp(n))
        return ChainMap(other.src, self.dst, comps, check=False)

    def __add__(self, other):
        lo = min(self.src.lo, other.src.lo, self.dst.lo, other.dst.lo)
        hi = max(self.src.hi, other.src.hi, self.dst.hi, other.dst.hi)
        return ChainMap(self.src, self.dst,
                        {n: self.comp(n) + other.comp(n) for n in range(lo, hi + 1)},
                        check=False)

    def __sub__(self, other):
        lo = min(self.src.lo, other.src.lo, self.dst.lo, other.dst.lo)
        hi = max(self.src.hi, other.src.hi, self.dst.hi, other.dst.hi)
        return ChainMap(self.src, self.dst,
                        {n: self.comp(n) - other.comp(n) for n in range(lo, hi + 1)},
                        check=False)

    def __neg__(self):
        return ChainMap(self.src, self.dst,
                        {n: -f for n, f in self.comps.items()}, check=False)

    def is_zero_map(self):
        return all(f.is_zero_morphism() for f in self.comps.values())

    def equal(self, other):
        return (self - other).is_zero_map()

    def __repr__(self):
        return f"ChainMap({self.src!r} -> {self.dst!r})"


class ChainHomotopy:
    """h with to - frm = d o h + h o d; components src^n -> dst^{n-1}."""

    def __init__(self, frm, to, comps, check=True):
        self.frm = frm
        self.to = to
        self.comps = {int(n): f for n, f in comps.items()
                      if f.matrix.rows and f.matrix.cols}
        if check and not self.is_valid():
            raise ZModuleError("invalid chain homotopy")

    @staticmethod
    def zero(frm, to):
        return ChainHomotopy(frm, to, {}, check=False)

    def comp(self, n):
        f = self.comps.get(n)
        if f is None:
            return GroupMorphism.zero(self.frm.src.term(n), self.frm.dst.term(n - 1))
        return f

    def is_valid(self):
        src, dst = self.frm.src, self.frm.dst
        lo = min(src.lo, dst.lo)
        hi = max(src.hi, dst.hi)
        for n in range(lo, hi + 1):
            want = self.to.comp(n) - self.frm.comp(n)
            got = (dst.diff(n - 1).compose(self.comp(n))
                   + self.comp(n + 1).compose(src.diff(n)))
            if not (want - got).is_zero_morphism():
                return False
        return True


def homotopy_check(h: ChainHomotopy) -> bool:
    return h.is_valid()


# ---------------------------------------------------------------------------
# cohomology


class CohomologyGroup:
    """H^i with cocycle-lifting data.

    ``group`` is the canonical (diagonal-relation) presentation; the
    basis of the cocycle lattice and the quotient presentation are kept
    so that arbitrary cocycle representatives can be converted to
    canonical coordinates and back.
    """

    def __init__(self, K, degree):
        self.complex = K
        self.degree = degree
        g = K.term(degree)
        d_out = K.diff(degree)
        d_in = K.diff(degree - 1)
        zrows = preimage_lattice(d_out.matrix, d_out.dst.lattice)
        self.ambient = g.n_gens
        self.zbasis = IntMatrix.from_rows(zrows, cols=g.n_gens).transpose()
        bnd = [d_in.matrix.col(j) for j in range(d_in.src.n_gens)]
        bnd += list(g.relations.entries)
        rel_rows = []
        for v in bnd:
            c = solve_linear(self.zbasis, v)
            if c is None:
                raise ZModuleError("boundary escapes cocycle lattice")
            rel_rows.append(c)
        self.pres = FpGroup(len(zrows), IntMatrix.from_rows(rel_rows, cols=len(zrows)))
        self.divisors = self.pres.divisors
        self.group = self.pres.canonical
        # lattice of trivial representatives, for reducing lifted cocycles
        self._triv = lattice_basis(bnd, g.n_gens)

    def is_cocycle(self, vec):
        return solve_linear(self.zbasis, vec) is not None

    def coords_of(self, vec):
        """Canonical coordinates of a cocycle representative."""
        c = solve_linear(self.zbasis, vec)
        if c is None:
            raise ZModuleError("vector is not a cocycle")
        return self.pres.canon_coords(c)

    def lift(self, coords):
        """A small cocycle representative of canonical coordinates."""
        return babai_reduce(self.zbasis.apply(self.pres.canon_lift(coords)),
                            self._triv)

    def zero_coords(self):
        return (0,) * len(self.divisors)

    def is_trivial(self):
        return not self.divisors


def cohomology(K: Complex, i: int) -> CohomologyGroup:
    return CohomologyGroup(K, i)


def transport_on_h(hsrc: CohomologyGroup, hdst: CohomologyGroup, apply_fn) -> GroupMorphism:
    """Map on canonical cohomology induced by a cocycle-level function."""
    cols = []
    n = len(hsrc.divisors)
    for j in range(n):
        e = tuple(1 if k == j else 0 for k in range(n))
        cols.append(hdst.coords_of(apply_fn(hsrc.lift(e))))
    mat = (IntMatrix.from_rows(cols, cols=len(hdst.divisors)).transpose()
           if n else IntMatrix.zero(len(hdst.divisors), 0))
    return GroupMorphism(hsrc.group, hdst.group, mat).check()


def induced_map(f: ChainMap, i: int, hsrc=None, hdst=None) -> GroupMorphism:
    """H^i(f) between canonical cohomology presentations."""
    hsrc = hsrc or cohomology(f.src, i)
    hdst = hdst or cohomology(f.dst, i)
    return transport_on_h(hsrc, hdst, f.comp(i))


def is_quasi_iso(f: ChainMap) -> bool:
    lo = min(f.src.lo, f.dst.lo)
    hi = max(f.src.hi, f.dst.hi)
    for i in range(lo, hi + 1):
        if not is_iso(induced_map(f, i)):
            return False
    return True


# ---------------------------------------------------------------------------
# shift and truncations


def shift(K: Complex, i: int) -> Complex:
    terms = {n - i: K.term(n) for n in K.degrees()}
    sign = -1 if i % 2 else 1
    diffs = {}
    for n, f in K.diffs.items():
        g = GroupMorphism(f.src, f.dst, f.matrix.scale(sign))
        diffs[n - i] = g
    return Complex(terms, diffs, check=False)


def shift_map(f: ChainMap, i: int) -> ChainMap:
    return ChainMap(shift(f.src, i), shift(f.dst, i),
                    {n - i: g for n, g in f.comps.items()}, check=False)


def truncate_le_bad(K: Complex, n: int):
    """Stupid truncation: zero out degrees above n.

    Comes with the canonical projection K -> sigma_{<=n} K (the graded
    inclusion the other way is not a chain map unless d^n = 0).
    """
    terms = {m: K.term(m) for m in K.degrees() if m <= n}
    diffs = {m: f for m, f in K.diffs.items() if m < n}
    T = Complex(terms, diffs, check=False)
    proj = ChainMap(K, T, {m: GroupMorphism.identity(K.term(m)) for m in terms})
    return T, proj


def truncate_le_good(K: Complex, n: int):
    """Good truncation: degree-n term becomes ker(d^n).

    Returns (complex, canonical inclusion into K).
    """
    ker_grp, incl = kernel(K.diff(n))
    terms = {m: K.term(m) for m in K.degrees() if m < n}
    if ker_grp.n_gens:
        terms[n] = ker_grp
    diffs = {m: f for m, f in K.diffs.items() if m < n - 1}
    if K.term(n - 1).n_gens and ker_grp.n_gens:
        # factor d^{n-1} through the kernel lattice (exact solve)
        cols = []
        for j in range(K.term(n - 1).n_gens):
            v = K.diff(n - 1).matrix.col(j)
            c = solve_linear(incl.matrix, v)
            if c is None:
                raise ZModuleError("d^{n-1} escapes ker(d^n) lattice")
            cols.append(c)
        mat = IntMatrix.from_rows(cols, cols=ker_grp.n_gens).transpose()
        diffs[n - 1] = GroupMorphism(K.term(n - 1), ker_grp, mat)
    T = Complex(terms, diffs)
    comps = {m: GroupMorphism.identity(K.term(m)) for m in terms if m < n}
    if ker_grp.n_gens:
        comps[n] = incl
    return T, ChainMap(T, K, comps)


def truncate_ge_good(K: Complex, n: int):
    """Good truncation from below: degree-n term becomes coker(d^{n-1}).

    Returns (complex, canonical projection from K).
    """
    cok, proj = cokernel(K.diff(n - 1))
    terms = {m: K.term(m) for m in K.degrees() if m > n}
    if cok.n_gens:
        terms[n] = cok
    diffs = {m: f for m, f in K.diffs.items() if m > n}
    if cok.n_gens and K.term(n + 1).n_gens:
        diffs[n] = GroupMorphism(cok, K.term(n + 1), K.diff(n).matrix)
    T = Complex(terms, diffs)
    comps = {m: GroupMorphism.identity(K.term(m)) for m in terms if m > n}
    if cok.n_gens:
        comps[n] = proj
    return T, ChainMap(K, T, comps)


def factor_through_le_good(f: ChainMap, T: Complex, inc: ChainMap, n: int) -> ChainMap:
    """Factor f: W -> K through tau_{<=n} K when W vanishes above n.

    ``T, inc`` must come from ``truncate_le_good(f.dst, n)``; the
    degree-n component is recomputed by an exact lattice solve.
    """
    if f.src.hi > n:
        raise ZModuleError("source does not vanish above the truncation degree")
    comps = {m: f.comp(m) for m in f.src.degrees() if m < n}
    if f.src.term(n).n_gens and T.term(n).n_gens:
        cols = []
        for j in range(f.src.term(n).n_gens):
            c = solve_linear(inc.comp(n).matrix, f.comp(n).matrix.col(j))
            if c is None:
                raise ZModuleError("map does not land in ker(d^n) lattice")
            cols.append(c)
        comps[n] = GroupMorphism(f.src.term(n), T.term(n),
                                 IntMatrix.from_rows(cols, cols=T.term(n).n_gens).transpose())
    return ChainMap(f.src, T, comps)


def factor_through_ge_good(f: ChainMap, T: Complex, proj: ChainMap, n: int) -> ChainMap:
    """Descend f: K -> W to tau_{>=n} K when W vanishes below n."""
    if f.dst.lo < n:
        raise ZModuleError("target does not vanish below the truncation degree")
    comps = {m: f.comp(m) for m in f.src.degrees() if m > n}
    if T.term(n).n_gens and f.dst.term(n).n_gens:
        comps[n] = GroupMorphism(T.term(n), f.dst.term(n), f.comp(n).matrix)
    return ChainMap(T, f.dst, comps)


# ---------------------------------------------------------------------------
# cones


class ConeResult:
    """Mapping cone with its structure maps.

    ``inclusion``: dst -> MC(u), alternating sign (-1)^{n+1}.
    ``projection``: MC(u) -> src[1], alternating sign (-1)^n.
    ``src_part``/``dst_part``: raw injection/projection matrices per degree.
    """

    def __init__(self, cx, inclusion, projection, inj_src, inj_dst, prj_src, prj_dst):
        self.complex = cx
        self.inclusion = inclusion
        self.projection = projection
        self.inj_src = inj_src
        self.inj_dst = inj_dst
        self.prj_src = prj_src
        self.prj_dst = prj_dst


def mapping_cone(u: ChainMap) -> ConeResult:
    """MC(u)^n = src^{n+1} (+) dst^n, d(x,y) = (d x, u(x) - d y)."""
    src, dst = u.src, u.dst
    lo = min(src.lo - 1, dst.lo)
    hi = max(src.hi - 1, dst.hi)
    terms, inj_s, inj_d, prj_s, prj_d = {}, {}, {}, {}, {}
    for n in range(lo, hi + 1):
        total, (i1, i2), (p1, p2) = fp_direct_sum([src.term(n + 1), dst.term(n)])
        terms[n] = total
        inj_s[n], inj_d[n], prj_s[n], prj_d[n] = i1, i2, p1, p2
    diffs = {}
    for n in range(lo, hi):
        a, b = terms[n], terms[n + 1]
        d_top = inj_s[n + 1].compose(src.diff(n + 1)).compose(prj_s[n])
        d_mid = inj_d[n + 1].compose(u.comp(n + 1)).compose(prj_s[n])
        d_bot = inj_d[n + 1].compose(-dst.diff(n)).compose(prj_d[n])
        diffs[n] = GroupMorphism(a, b, (d_top + d_mid + d_bot).matrix)
    cx = Complex(terms, diffs)
    inc = ChainMap(dst, cx,
                   {n: GroupMorphism(dst.term(n), terms[n],
                                     inj_d[n].matrix.scale(-1 if n % 2 == 0 else 1))
                    for n in range(lo, hi + 1)})
    srcsh = shift(src, 1)
    proj = ChainMap(cx, srcsh,
                    {n: GroupMorphism(terms[n], srcsh.term(n),
                                      prj_s[n].matrix.scale(1 if n % 2 == 0 else -1))
                     for n in range(lo, hi + 1)})
    return ConeResult(cx, inc, proj, inj_s, inj_d, prj_s, prj_d)


class CoconeResult:
    """Cocone with projections to src and the alternating iso to MC[-1]."""

    def __init__(self, cx, pr_src, to_shifted_cone, from_shifted_cone,
                 inj_src, inj_dst, prj_src, prj_dst):
        self.complex = cx
        self.pr_src = pr_src
        self.to_shifted_cone = to_shifted_cone
        self.from_shifted_cone = from_shifted_cone
        self.inj_src = inj_src
        self.inj_dst = inj_dst
        self.prj_src = prj_src
        self.prj_dst = prj_dst


def cocone(u: ChainMap) -> CoconeResult:
    """CC(u)^n = src^n (+) dst^{n-1}, d(x,p) = (d x, u(x) - d p)."""
    src, dst = u.src, u.dst
    lo = min(src.lo, dst.lo + 1)
    hi = max(src.hi, dst.hi + 1)
    terms, inj_s, inj_d, prj_s, prj_d = {}, {}, {}, {}, {}
    for n in range(lo, hi + 1):
        total, (i1, i2), (p1, p2) = fp_direct_sum([src.term(n), dst.term(n - 1)])
        terms[n] = total
        inj_s[n], inj_d[n], prj_s[n], prj_d[n] = i1, i2, p1, p2
    diffs = {}
    for n in range(lo, hi):
        d_top = inj_s[n + 1].compose(src.diff(n)).compose(prj_s[n])
        d_mid = inj_d[n + 1].compose(u.comp(n)).compose(prj_s[n])
        d_bot = inj_d[n + 1].compose(-dst.diff(n - 1)).compose(prj_d[n])
        diffs[n] = GroupMorphism(terms[n], terms[n + 1], (d_top + d_mid + d_bot).matrix)
    cx = Complex(terms, diffs)
    pr = ChainMap(cx, src, {n: prj_s[n] for n in range(lo, hi + 1)})
    mc = mapping_cone(u)
    target = shift(mc.complex, -1)
    to = ChainMap(cx, target,
                  {n: GroupMorphism(terms[n], target.term(n),
                                    IntMatrix.identity(terms[n].n_gens).scale(
                                        1 if n % 2 == 0 else -1))
                   for n in range(lo, hi + 1)})
    frm = ChainMap(target, cx,
                   {n: GroupMorphism(target.term(n), terms[n],
                                     IntMatrix.identity(terms[n].n_gens).scale(
                                         1 if n % 2 == 0 else -1))
                    for n in range(lo, hi + 1)})
    return CoconeResult(cx, pr, to, frm, inj_s, inj_d, prj_s, prj_d)


# ---------------------------------------------------------------------------
# sums and (co)diagonals


def tidy_complex(K: Complex):
    """Isomorphic complex on canonical (diagonal) presentations.

    Cone and kernel constructions accumulate redundant generators;
    replacing every term by its Smith canonical form keeps later lattice
    solves small. Returns (K', to: K -> K', frm: K' -> K) with
    to o frm = id exactly and frm o to = id modulo relations.
    """
    to_comps, frm_comps, terms = {}, {}, {}
    for n in K.degrees():
        g = K.term(n)
        if not g.n_gens:
            continue
        snf, keep, divs = g._canon
        canon = FpGroup.from_divisors(divs)
        terms[n] = canon
        to_rows = [snf.U.row(i) for i in keep]
        to_comps[n] = GroupMorphism(g, canon,
                                    IntMatrix.from_rows(to_rows, cols=g.n_gens))
        frm_cols = [snf.uinv.col(i) for i in keep]
        frm_comps[n] = GroupMorphism(canon, g,
                                     IntMatrix.from_rows(frm_cols,
                                                         cols=g.n_gens).transpose())
    diffs = {}
    for n, d in K.diffs.items():
        if n in terms and (n + 1) in terms:
            diffs[n] = to_comps[n + 1].compose(d).compose(frm_comps[n])
    T = Complex(terms, diffs)
    to = ChainMap(K, T, to_comps)
    frm = ChainMap(T, K, frm_comps)
    return T, to, frm


def direct_sum(K: Complex, L: Complex):
    """K (+) L with injection and projection chain maps."""
    lo, hi = min(K.lo, L.lo), max(K.hi, L.hi)
    terms, inj_k, inj_l, prj_k, prj_l = {}, {}, {}, {}, {}
    for n in range(lo, hi + 1):
        total, (i1, i2), (p1, p2) = fp_direct_sum([K.term(n), L.term(n)])
        terms[n] = total
        inj_k[n], inj_l[n], prj_k[n], prj_l[n] = i1, i2, p1, p2
    diffs = {}
    for n in range(lo, hi):
        d = (inj_k[n + 1].compose(K.diff(n)).compose(prj_k[n])
             + inj_l[n + 1].compose(L.diff(n)).compose(prj_l[n]))
        diffs[n] = GroupMorphism(terms[n], terms[n + 1], d.matrix)
    S = Complex(terms, diffs)
    rng = range(lo, hi + 1)
    return (S,
            ChainMap(K, S, {n: inj_k[n] for n in rng}),
            ChainMap(L, S, {n: inj_l[n] for n in rng}),
            ChainMap(S, K, {n: prj_k[n] for n in rng}),
            ChainMap(S, L, {n: prj_l[n] for n in rng}))


def diagonal(K: Complex) -> ChainMap:
    S, i1, i2, _, _ = direct_sum(K, K)
    return i1 + i2


def codiagonal(K: Complex) -> ChainMap:
    S, _, _, p1, p2 = direct_sum(K, K)
    return p1 + p2
