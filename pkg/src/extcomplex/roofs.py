"""Roof calculus: fractions between complexes and homotopy (co)limits.

A fraction K <-q- M -p-> L (q a quasi-isomorphism) is the arrow notion
that survives localization; composition goes through the homotopy
fibered product, never the degreewise one, so the composed left leg is
always a quasi-isomorphism without surjectivity hypotheses.

The fibered product of f: A -> P, g: B -> P is tau_{<=0} CC(f - g) and
the fibered sum of f: P -> A, g: P -> B is tau_{>=-2} MC(f - g), with
the differentials exactly as printed in the source matrices (see
``complexes`` for the pinned sign conventions). The degreewise
("naive") pullback is provided only for the contrast test.
"""

from __future__ import annotations

from .complexes import (
    ChainHomotopy,
    ChainMap,
    Complex,
    cocone,
    cohomology,
    direct_sum,
    factor_through_le_good,
    is_quasi_iso,
    mapping_cone,
    truncate_ge_good,
    truncate_le_good,
)
from .zmodule import (
    GroupMorphism,
    IntMatrix,
    ZModuleError,
    kernel,
    solve_linear,
)


class Fraction:
    """Roof (q, apex, p): src <-q- apex -p-> dst with q a quasi-iso."""

    def __init__(self, q: ChainMap, p: ChainMap, check=True):
        if q.src is not p.src and q.src.terms != p.src.terms:
            raise ZModuleError("roof legs disagree on the apex")
        self.apex = q.src
        self.src = q.dst
        self.dst = p.dst
        self.q = q
        self.p = p
        if check and not is_quasi_iso(q):
            raise ZModuleError("left leg of a fraction must be a quasi-isomorphism")

    @staticmethod
    def strict(f: ChainMap) -> "Fraction":
        """A genuine chain map as a roof with identity left leg."""
        return Fraction(ChainMap.identity(f.src), f, check=False)

    def is_strict(self):
        return self.q.equal(ChainMap.identity(self.src)) if \
            self.apex.terms == self.src.terms else False

    def __repr__(self):
        return f"Fraction({self.src!r} <- {self.apex!r} -> {self.dst!r})"


def identity_fraction(K: Complex) -> Fraction:
    return Fraction.strict(ChainMap.identity(K))


def zero_fraction(B: Complex, A: Complex) -> Fraction:
    """The trivial fraction 0_B = (id_B, B, 0): B -> A."""
    return Fraction(ChainMap.identity(B), ChainMap.zero(B, A), check=False)


class RoofArrow:
    """1-arrow of fractions, coherent up to stored homotopies.

    ``s: mid -> frm.apex`` and ``r: mid -> to.apex`` are quasi-isos;
    ``h_q`` witnesses frm.q o s ~ to.q o r and ``h_p`` witnesses
    frm.p o s ~ to.p o r. Strict arrows carry zero homotopies.
    """

    def __init__(self, frm: Fraction, to: Fraction, s: ChainMap, r: ChainMap,
                 h_q: ChainHomotopy, h_p: ChainHomotopy):
        self.frm = frm
        self.to = to
        self.mid = s.src
        self.s = s
        self.r = r
        self.h_q = h_q
        self.h_p = h_p

    @staticmethod
    def strict(frm, to, s, r):
        h_q = ChainHomotopy.zero(frm.q.compose(s), to.q.compose(r))
        h_p = ChainHomotopy.zero(frm.p.compose(s), to.p.compose(r))
        return RoofArrow(frm, to, s, r, h_q, h_p)

    def is_strict(self):
        return (all(f.is_zero_morphism() for f in self.h_q.comps.values())
                and all(f.is_zero_morphism() for f in self.h_p.comps.values()))

    def validate(self):
        if not is_quasi_iso(self.s) or not is_quasi_iso(self.r):
            return False
        for h, left, right in ((self.h_q, self.frm.q, self.to.q),
                               (self.h_p, self.frm.p, self.to.p)):
            frm_map = left.compose(self.s)
            to_map = right.compose(self.r)
            probe = ChainHomotopy(frm_map, to_map, h.comps, check=False)
            if not probe.is_valid():
                return False
        return True


# ---------------------------------------------------------------------------
# fibered product / sum of complexes (strict maps)


class FiberedProduct:
    """tau_{<=0} CC(f-g) with projections and the homotopy witness."""

    def __init__(self, complex, pr_a, pr_b, witness, pre_truncation, inc,
                 sum_inj=None, sum_prj=None):
        self.complex = complex
        self.pr_a = pr_a
        self.pr_b = pr_b
        self.witness = witness
        self.pre_truncation = pre_truncation  # the untruncated cocone result
        self.inc = inc  # complex -> pre_truncation.complex
        self.sum_inj = sum_inj  # (A -> A(+)B, B -> A(+)B)
        self.sum_prj = sum_prj


def fibered_product_complexes(f: ChainMap, g: ChainMap) -> FiberedProduct:
    """Homotopy pullback of f: A -> P, g: B -> P."""
    if f.dst.terms != g.dst.terms:
        raise ZModuleError("fibered product needs a common target")
    A, B = f.src, g.src
    S, i1, i2, p1, p2 = direct_sum(A, B)
    u = f.compose(p1) - g.compose(p2)
    u = ChainMap(S, f.dst, u.comps)
    cc = cocone(u)
    X, inc = truncate_le_good(cc.complex, 0)
    pr_a = p1.compose(cc.pr_src).compose(inc)
    pr_b = p2.compose(cc.pr_src).compose(inc)
    # witness: h(a, b, p) = -p satisfies (g pr_b) - (f pr_a) = d h + h d
    frm = f.compose(pr_a)
    to = g.compose(pr_b)
    comps = {}
    for n in X.degrees():
        h = cc.prj_dst[n].compose(inc.comp(n))
        comps[n] = GroupMorphism(X.term(n), f.dst.term(n - 1), h.matrix.scale(-1))
    witness = ChainHomotopy(frm, to, comps)
    return FiberedProduct(X, pr_a, pr_b, witness, cc, inc, (i1, i2), (p1, p2))


class FiberedSum:
    """tau_{>=-2} MC(f-g) with inclusions and the homotopy witness."""

    def __init__(self, complex, inc_a, inc_b, witness, pre_truncation, proj,
                 sum_inj=None, sum_prj=None):
        self.complex = complex
        self.inc_a = inc_a
        self.inc_b = inc_b
        self.witness = witness
        self.pre_truncation = pre_truncation
        self.proj = proj  # pre_truncation.complex -> complex
        self.sum_inj = sum_inj
        self.sum_prj = sum_prj


def fibered_sum_complexes(f: ChainMap, g: ChainMap) -> FiberedSum:
    """Homotopy pushout of f: P -> A, g: P -> B."""
    if f.src.terms != g.src.terms:
        raise ZModuleError("fibered sum needs a common source")
    P = f.src
    A, B = f.dst, g.dst
    S, i1, i2, p1, p2 = direct_sum(A, B)
    u = i1.compose(f) - i2.compose(g)
    u = ChainMap(P, S, u.comps)
    mc = mapping_cone(u)
    Y, proj = truncate_ge_good(mc.complex, -2)
    inc_a = proj.compose(mc.inclusion).compose(i1)
    inc_b = proj.compose(mc.inclusion).compose(i2)
    # witness: h(p) = ((-1)^n p, 0) gives (inc_b g) - (inc_a f) = d h + h d
    frm = inc_a.compose(f)
    to = inc_b.compose(g)
    comps = {}
    for n in P.degrees():
        if not Y.term(n - 1).n_gens:
            continue
        h = proj.comp(n - 1).compose(mc.inj_src[n - 1])
        comps[n] = GroupMorphism(P.term(n), Y.term(n - 1),
                                 h.matrix.scale(1 if n % 2 == 0 else -1))
    witness = ChainHomotopy(frm, to, comps)
    return FiberedSum(Y, inc_a, inc_b, witness, mc, proj, (i1, i2), (p1, p2))


# ---------------------------------------------------------------------------
# fraction composition


def compose(g: Fraction, f: Fraction, tidy=True) -> Fraction:
    """g o f through the homotopy fibered product of the apexes over f.dst.

    The apex is re-presented in canonical form (harmless isomorphism,
    keeps later solves small) unless ``tidy`` is disabled.
    """
    if f.dst.terms != g.src.terms:
        raise ZModuleError("fractions do not compose: boundary complexes differ")
    fp = fibered_product_complexes(f.p, g.q)
    q_new = f.q.compose(fp.pr_a)
    p_new = g.p.compose(fp.pr_b)
    if tidy:
        from .complexes import tidy_complex
        _, _, frm = tidy_complex(fp.complex)
        q_new = q_new.compose(frm)
        p_new = p_new.compose(frm)
    return Fraction(q_new, p_new)


# ---------------------------------------------------------------------------
# fractions-level fibered product / sum


class FracFiberedProduct:
    def __init__(self, complex, pr_m, pr_n, leg_a, leg_b, witness, base):
        self.complex = complex
        self.pr_m = pr_m      # to f.apex
        self.pr_n = pr_n      # to g.apex
        self.leg_a = leg_a    # chain map to A through q_f
        self.leg_b = leg_b    # chain map to B through q_g
        self.witness = witness
        self.base = base      # underlying FiberedProduct


def fibered_product_fractions(f: Fraction, g: Fraction) -> FracFiberedProduct:
    """A boxtimes_P B = M x_P N along the p-legs (Def of the roof pullback)."""
    fp = fibered_product_complexes(f.p, g.p)
    leg_a = f.q.compose(fp.pr_a)
    leg_b = g.q.compose(fp.pr_b)
    return FracFiberedProduct(fp.complex, fp.pr_a, fp.pr_b, leg_a, leg_b,
                              fp.witness, fp)


class FracFiberedSum:
    def __init__(self, complex, inc_a, inc_b, witness, over, base):
        self.complex = complex
        self.inc_a = inc_a
        self.inc_b = inc_b
        self.witness = witness
        self.over = over      # the intermediate M x_P N
        self.base = base


def fibered_sum_fractions(f: Fraction, g: Fraction) -> FracFiberedSum:
    """A boxplus^P B: push out along the fibered product of the q-legs."""
    over = fibered_product_complexes(f.q, g.q)
    fa = f.p.compose(over.pr_a)
    gb = g.p.compose(over.pr_b)
    fs = fibered_sum_complexes(fa, gb)
    return FracFiberedSum(fs.complex, fs.inc_a, fs.inc_b, fs.witness,
                          over, fs)


def homotopy_kernel(f: Fraction) -> Complex:
    """tau_{<=0}(CC(p_f)) = tau_{<=0}(MC(p_f)[-1]) up to the pinned iso."""
    cc = cocone(f.p)
    X, _ = truncate_le_good(cc.complex, 0)
    return X


def homotopy_cokernel(f: Fraction) -> Complex:
    """tau_{>=-2}(MC(p_f))."""
    mc = mapping_cone(f.p)
    Y, _ = truncate_ge_good(mc.complex, -2)
    return Y


# ---------------------------------------------------------------------------
# the wrong construction, kept for the contrast test


def naive_fibered_product(f: ChainMap, g: ChainMap) -> Complex:
    """Degreewise pullback {(a, b) : f a = g b}; not derived-correct."""
    from .complexes import fp_direct_sum

    A, B = f.src, g.src
    lo, hi = min(A.lo, B.lo), max(A.hi, B.hi)
    terms, incs, sums = {}, {}, {}
    for n in range(lo, hi + 1):
        S, (i1, i2), (p1, p2) = fp_direct_sum([A.term(n), B.term(n)])
        u_n = f.comp(n).compose(p1) - g.comp(n).compose(p2)
        grp, inc = kernel(u_n)
        terms[n] = grp
        incs[n] = inc
        sums[n] = (S, i1, i2, p1, p2)
    diffs = {}
    for n in range(lo, hi):
        if not terms[n].n_gens or not terms[n + 1].n_gens:
            continue
        S, i1, i2, p1, p2 = sums[n]
        Sn1, j1, j2, q1, q2 = sums[n + 1]
        d_sum = (j1.compose(A.diff(n)).compose(p1)
                 + j2.compose(B.diff(n)).compose(p2))
        cols = []
        for j in range(terms[n].n_gens):
            v = d_sum.matrix.apply(incs[n].matrix.col(j))
            c = solve_linear(incs[n + 1].matrix, v)
            if c is None:
                raise ZModuleError("naive pullback differential escapes kernel lattice")
            cols.append(c)
        mat = IntMatrix.from_rows(cols, cols=terms[n + 1].n_gens).transpose()
        diffs[n] = GroupMorphism(terms[n], terms[n + 1], mat)
    return Complex(terms, diffs)
