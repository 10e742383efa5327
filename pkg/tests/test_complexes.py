"""Complexes: cohomology, shift, truncations, cones, quasi-isomorphisms."""

import pytest

from extcomplex.complexes import (
    ChainHomotopy,
    ChainMap,
    Complex,
    cocone,
    codiagonal,
    cohomology,
    diagonal,
    direct_sum,
    homotopy_check,
    induced_map,
    is_quasi_iso,
    mapping_cone,
    shift,
    single,
    transport_on_h,
    truncate_ge_good,
    truncate_le_bad,
    truncate_le_good,
    zero_complex,
)
from extcomplex.randgen import random_chain_map, random_length3, rng_for
from extcomplex.zmodule import (
    FpGroup,
    GroupMorphism,
    IntMatrix,
    ZModuleError,
    is_exact_at,
    is_iso,
)

Z = FpGroup.free(1)
Z2 = FpGroup.cyclic(2)


def two_term(d, lo=-1):
    """[Z --d--> Z] in degrees (lo, lo+1)."""
    return Complex({lo: Z, lo + 1: Z},
                   {lo: GroupMorphism(Z, Z, IntMatrix.from_rows([[d]]))})


class TestCohomology:
    def test_mod2(self):
        K = two_term(2)
        assert cohomology(K, 0).divisors == (2,)
        assert cohomology(K, -1).is_trivial()

    def test_zero_complex(self):
        K = zero_complex()
        assert all(cohomology(K, i).is_trivial() for i in (-2, -1, 0))

    def test_concentrated(self):
        K = single(Z)
        assert cohomology(K, 0).divisors == (0,)

    def test_cocycle_roundtrip(self):
        K = two_term(2)
        h = cohomology(K, 0)
        v = h.lift((1,))
        assert h.coords_of(v) == (1,)
        assert h.coords_of(tuple(2 * x for x in v)) == (0,)

    def test_dd_checked(self):
        bad = {-1: GroupMorphism(Z, Z, IntMatrix.from_rows([[1]])),
               0: GroupMorphism(Z, Z, IntMatrix.from_rows([[1]]))}
        with pytest.raises(ZModuleError):
            Complex({-1: Z, 0: Z, 1: Z}, bad)


class TestShift:
    def test_identity_shift(self):
        K = two_term(2)
        assert shift(K, 0).diffs[-1].matrix.entries == ((2,),)

    def test_involution(self):
        K = two_term(3)
        KK = shift(shift(K, 1), -1)
        assert KK.terms.keys() == K.terms.keys()
        assert KK.diff(-1).matrix.entries == K.diff(-1).matrix.entries

    def test_sign(self):
        K = two_term(2)
        S = shift(K, 1)
        assert set(S.degrees()) == {-2, -1}
        assert S.diff(-2).matrix.entries == ((-2,),)


class TestTruncations:
    def test_le_good_noop(self):
        K = single(Z2)  # d^0 = 0, nothing above 0
        T, inc = truncate_le_good(K, 0)
        assert is_quasi_iso(inc)
        assert cohomology(T, 0).divisors == (2,)

    def test_ge_good_range(self):
        # tau_{>=-2} MC(f) for f between length-3 complexes lands in [-2, 1]
        rng = rng_for(7)
        A = random_length3(rng)
        B = random_length3(rng)
        f = random_chain_map(rng, A, B)
        mc = mapping_cone(f)
        T, proj = truncate_ge_good(mc.complex, -2)
        assert T.is_zero() or (T.lo >= -2 and T.hi <= 1)

    def test_le_good_of_acyclic(self):
        K = two_term(1)  # cone of id_Z, acyclic
        T, inc = truncate_le_good(shift(K, 1), 0)
        assert all(cohomology(T, i).is_trivial() for i in range(-3, 2))

    def test_le_bad(self):
        K = two_term(2, lo=-1)
        T, proj = truncate_le_bad(K, -1)
        assert set(T.degrees()) == {-1}
        assert proj.comp(-1).matrix.entries == ((1,),)

    def test_truncation_cohomology(self):
        rng = rng_for(11)
        for _ in range(5):
            K = random_length3(rng)
            T, inc = truncate_le_good(K, -1)
            for i in (-2, -1):
                assert is_iso(induced_map(inc, i))
            assert cohomology(T, 0).is_trivial()
            T2, proj = truncate_ge_good(K, -1)
            for i in (-1, 0):
                assert is_iso(induced_map(proj, i))
            assert cohomology(T2, -2).is_trivial()


class TestCones:
    def test_cone_of_zero(self):
        Z0 = single(Z)
        mc = mapping_cone(ChainMap.zero(Z0, Z0))
        assert cohomology(mc.complex, -1).divisors == (0,)
        assert cohomology(mc.complex, 0).divisors == (0,)

    def test_cone_of_identity_acyclic(self):
        rng = rng_for(3)
        K = random_length3(rng)
        mc = mapping_cone(ChainMap.identity(K))
        assert all(cohomology(mc.complex, i).is_trivial() for i in range(-4, 2))

    def test_cone_of_times2(self):
        Z0 = single(Z)
        f = ChainMap(Z0, Z0, {0: GroupMorphism(Z, Z, IntMatrix.from_rows([[2]]))})
        mc = mapping_cone(f)
        assert cohomology(mc.complex, 0).divisors == (2,)
        assert cohomology(mc.complex, -1).is_trivial()

    def test_inclusion_projection_are_chain_maps(self):
        rng = rng_for(5)
        K, L = random_length3(rng), random_length3(rng)
        f = random_chain_map(rng, K, L)
        mc = mapping_cone(f)
        mc.inclusion.validate()
        mc.projection.validate()

    def test_cocone_of_zero_splits(self):
        Z0 = single(Z)
        cc = cocone(ChainMap.zero(Z0, Z0))
        assert cohomology(cc.complex, 0).divisors == (0,)
        assert cohomology(cc.complex, 1).divisors == (0,)

    def test_cocone_of_identity_acyclic(self):
        cc = cocone(ChainMap.identity(single(Z)))
        assert all(cohomology(cc.complex, i).is_trivial() for i in (-1, 0, 1))

    def test_cocone_shift_iso(self):
        rng = rng_for(9)
        K, L = random_length3(rng), random_length3(rng)
        f = random_chain_map(rng, K, L)
        cc = cocone(f)
        to, frm = cc.to_shifted_cone, cc.from_shifted_cone
        to.validate()
        frm.validate()
        assert to.compose(frm).equal(ChainMap.identity(to.dst))
        assert frm.compose(to).equal(ChainMap.identity(cc.complex))

    def test_cone_les(self):
        # ... -> H^i(K) -> H^i(L) -> H^i(MC) -> H^{i+1}(K) -> ... exact
        rng = rng_for(13)
        for _ in range(6):
            K, L = random_length3(rng), random_length3(rng)
            u = random_chain_map(rng, K, L)
            mc = mapping_cone(u)
            for i in range(-3, 1):
                hk, hl = cohomology(K, i), cohomology(L, i)
                hm = cohomology(mc.complex, i)
                hk1 = cohomology(K, i + 1)
                hs1 = cohomology(shift(K, 1), i)
                a = induced_map(u, i, hk, hl)
                b = induced_map(mc.inclusion, i, hl, hm)
                c0 = induced_map(mc.projection, i, hm, hs1)
                conv = transport_on_h(hs1, hk1, lambda v: v)
                c = conv.compose(c0)
                d0 = induced_map(u, i + 1, hk1, cohomology(L, i + 1))
                assert is_exact_at(a, b)
                assert is_exact_at(b, c)
                assert is_exact_at(c, d0)


class TestQuasiIso:
    def test_identity(self):
        K = two_term(2)
        assert is_quasi_iso(ChainMap.identity(K))

    def test_zero_between_acyclic(self):
        A = two_term(1)
        assert is_quasi_iso(ChainMap.zero(A, A))
        assert not is_quasi_iso(ChainMap.zero(two_term(2), two_term(2)))

    def test_projection_resolution(self):
        K = two_term(2)
        proj = ChainMap(K, single(Z2),
                        {0: GroupMorphism(Z, Z2, IntMatrix.from_rows([[1]]))})
        assert is_quasi_iso(proj)


class TestSumsAndHomotopy:
    def test_sum_additivity(self):
        rng = rng_for(21)
        K, L = random_length3(rng), random_length3(rng)
        S, i1, i2, p1, p2 = direct_sum(K, L)
        for i in (-2, -1, 0):
            dk = cohomology(K, i).divisors
            dl = cohomology(L, i).divisors
            ds = cohomology(S, i).divisors
            joined = FpGroup.from_divisors(list(dk) + list(dl)).divisors
            assert joined == ds

    def test_sum_with_zero(self):
        K = two_term(2)
        S, i1, i2, p1, p2 = direct_sum(K, zero_complex())
        assert is_quasi_iso(i1)

    def test_codiag_diag(self):
        K = single(Z)
        assert codiagonal(K).compose(diagonal(K)).comp(0).matrix.entries == ((2,),)
        S, i1, i2, p1, p2 = direct_sum(K, K)
        assert codiagonal(K).compose(i1).comp(0).matrix.entries == ((1,),)

    def test_homotopy_zero_validates_equal_maps(self):
        K = two_term(2)
        f = ChainMap.identity(K)
        assert homotopy_check(ChainHomotopy.zero(f, f))

    def test_homotopy_by_construction(self):
        # perturb f by d h + h d and check the witness validates
        rng = rng_for(33)
        K, L = random_length3(rng), random_length3(rng)
        f = random_chain_map(rng, K, L)
        hcomps = {}
        for n in range(-2, 1):
            src, dst = K.term(n), L.term(n - 1)
            from extcomplex.randgen import random_morphism
            hcomps[n] = random_morphism(rng, src, dst)
        g = f
        for n in range(-2, 1):
            dh = L.diff(n - 1).compose(hcomps[n])
            hd = hcomps.get(n + 1, GroupMorphism.zero(K.term(n + 1), L.term(n))
                            ).compose(K.diff(n))
            add = dh + hd
            comps = dict(g.comps)
            comps[n] = g.comp(n) + add
            g = ChainMap(K, L, comps, check=False)
        g.validate()
        h = ChainHomotopy(f, g, hcomps)
        assert homotopy_check(h)
