"""Exact integer linear algebra and finitely presented abelian groups.

Everything downstream (complexes, roofs, Ext groups) reduces to lattice
arithmetic over Z done here: Smith normal form, integer linear solves,
solves modulo a lattice, kernels/cokernels/images of maps between
finitely presented groups, and Hom groups.

Conventions, fixed once and asserted by tests:

* ``FpGroup(n, R)`` denotes ``Z^n / (row lattice of R)``: relations are
  *rows* of length ``n``.
* A ``GroupMorphism`` acts on *column* vectors of generator coordinates;
  its matrix is ``dst.n_gens x src.n_gens``.
* Elementary divisor lists drop unit divisors, satisfy d1 | d2 | ... and
  list free rank as trailing zeros, e.g. ``Z (+) Z/2`` is ``[2, 0]``.

All values are immutable after construction and every operation is a
pure function; nothing here holds shared mutable state.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache


class ZModuleError(ValueError):
    """Dimension mismatch or ill-defined morphism data."""


# ---------------------------------------------------------------------------
# matrices


@dataclass(frozen=True)
class IntMatrix:
    """Immutable matrix of exact (arbitrary precision) integers.

    >>> m = IntMatrix.from_rows([[1, 2], [3, 4]])
    >>> (m * m).entries
    ((7, 10), (15, 22))
    """

    rows: int
    cols: int
    entries: tuple  # tuple of row tuples

    @staticmethod
    def from_rows(rows, cols=None):
        rows = [tuple(int(x) for x in r) for r in rows]
        if rows:
            ncols = len(rows[0])
            if any(len(r) != ncols for r in rows):
                raise ZModuleError("ragged rows")
        else:
            ncols = 0 if cols is None else cols
        if cols is not None and rows and ncols != cols:
            raise ZModuleError("explicit cols disagrees with row length")
        return IntMatrix(len(rows), ncols, tuple(rows))

    @staticmethod
    def zero(rows, cols):
        return IntMatrix(rows, cols, tuple((0,) * cols for _ in range(rows)))

    @staticmethod
    def identity(n):
        return IntMatrix(n, n, tuple(tuple(1 if i == j else 0 for j in range(n))
                                     for i in range(n)))

    def __post_init__(self):
        if len(self.entries) != self.rows:
            raise ZModuleError("row count mismatch")
        for r in self.entries:
            if len(r) != self.cols:
                raise ZModuleError("col count mismatch")

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def row(self, i):
        return self.entries[i]

    def col(self, j):
        return tuple(r[j] for r in self.entries)

    def transpose(self):
        return IntMatrix(self.cols, self.rows,
                         tuple(tuple(self.entries[i][j] for i in range(self.rows))
                               for j in range(self.cols)))

    def __mul__(self, other):
        if isinstance(other, IntMatrix):
            if self.cols != other.rows:
                raise ZModuleError(
                    f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
            ot = other.transpose().entries
            return IntMatrix(self.rows, other.cols,
                             tuple(tuple(sum(a * b for a, b in zip(r, c)) for c in ot)
                                   for r in self.entries))
        return NotImplemented

    def scale(self, k):
        k = int(k)
        return IntMatrix(self.rows, self.cols,
                         tuple(tuple(k * x for x in r) for r in self.entries))

    def __add__(self, other):
        if self.rows != other.rows or self.cols != other.cols:
            raise ZModuleError("shape mismatch in +")
        return IntMatrix(self.rows, self.cols,
                         tuple(tuple(a + b for a, b in zip(r, s))
                               for r, s in zip(self.entries, other.entries)))

    def __sub__(self, other):
        return self + other.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def apply(self, vec):
        """Matrix times column vector, returned as a tuple."""
        vec = tuple(vec)
        if len(vec) != self.cols:
            raise ZModuleError("vector length mismatch")
        return tuple(sum(a * b for a, b in zip(r, vec)) for r in self.entries)

    def hstack(self, other):
        if self.rows != other.rows:
            raise ZModuleError("hstack row mismatch")
        return IntMatrix(self.rows, self.cols + other.cols,
                         tuple(r + s for r, s in zip(self.entries, other.entries)))

    def vstack(self, other):
        if self.cols != other.cols:
            raise ZModuleError("vstack col mismatch")
        return IntMatrix(self.rows + other.rows, self.cols, self.entries + other.entries)

    @staticmethod
    def block_diag(blocks):
        blocks = list(blocks)
        rows = sum(b.rows for b in blocks)
        cols = sum(b.cols for b in blocks)
        out = [[0] * cols for _ in range(rows)]
        r0 = c0 = 0
        for b in blocks:
            for i in range(b.rows):
                out[r0 + i][c0:c0 + b.cols] = list(b.entries[i])
            r0 += b.rows
            c0 += b.cols
        return IntMatrix.from_rows(out, cols=cols)

    def is_zero(self):
        return all(x == 0 for r in self.entries for x in r)

    def __repr__(self):
        return f"IntMatrix({[list(r) for r in self.entries]!r})"


# ---------------------------------------------------------------------------
# Smith normal form


@dataclass(frozen=True)
class SmithDecomposition:
    """U*M*V = S with U, V unimodular and S = diag(d1 | d2 | ...) >= 0.

    ``uinv`` and ``vinv`` are the exact inverses of U and V, tracked
    during reduction so that no separate matrix inversion is needed.
    """

    U: IntMatrix
    S: IntMatrix
    V: IntMatrix
    uinv: IntMatrix
    vinv: IntMatrix

    @property
    def rank(self):
        return sum(1 for i in range(min(self.S.rows, self.S.cols))
                   if self.S[i, i] != 0)

    def diagonal(self):
        return tuple(self.S[i, i] for i in range(min(self.S.rows, self.S.cols)))


def _xgcd(a, b):
    """g, x, y with x*a + y*b = g = gcd(a, b) >= 0."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


@lru_cache(maxsize=None)
def smith_normal_form(M: IntMatrix) -> SmithDecomposition:
    """Smith normal form with unimodular transforms and their inverses.

    Column/row clearing uses extended-gcd 2x2 transforms (one step per
    entry, bounded fill-in) instead of repeated quotient subtraction;
    pivots are chosen smallest-magnitude-first with lexicographic tie
    break, so runs are deterministic. Only the decomposition contract
    is normative. Results are immutable and cached by matrix value.
    """
    m, n = M.rows, M.cols
    A = [list(r) for r in M.entries]
    U = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    Ui = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    V = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    Vi = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    def row_swap(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]
        for r in Ui:
            r[i], r[j] = r[j], r[i]

    def col_swap(i, j):
        for r in A:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]
        Vi[i], Vi[j] = Vi[j], Vi[i]

    def row_add(dst, src, q):
        Ad, As = A[dst], A[src]
        for k in range(n):
            Ad[k] += q * As[k]
        Ud, Us = U[dst], U[src]
        for k in range(m):
            Ud[k] += q * Us[k]
        for r in Ui:
            r[src] -= q * r[dst]

    def col_add(dst, src, q):
        for r in A:
            r[dst] += q * r[src]
        for r in V:
            r[dst] += q * r[src]
        Vs, Vd = Vi[src], Vi[dst]
        for k in range(n):
            Vs[k] -= q * Vd[k]

    def row_combine(t, i, a, b):
        """Clear A[i][t] (= b) against the pivot A[t][t] (= a).

        Divisible cases use one elementary operation and leave the
        pivot row alone; otherwise a det-1 gcd transform runs, strictly
        shrinking |pivot| (termination argument).
        """
        if b % a == 0:
            row_add(i, t, -(b // a))
            return
        g, x, y = _xgcd(a, b)
        u, v = a // g, b // g
        At, Ai = A[t], A[i]
        for k in range(n):
            s, w = At[k], Ai[k]
            At[k] = x * s + y * w
            Ai[k] = -v * s + u * w
        Ut, Uu = U[t], U[i]
        for k in range(m):
            s, w = Ut[k], Uu[k]
            Ut[k] = x * s + y * w
            Uu[k] = -v * s + u * w
        # inverse of [[x, y], [-v, u]] is [[u, -y], [v, x]] (det 1)
        for r in Ui:
            s, w = r[t], r[i]
            r[t] = u * s + v * w
            r[i] = -y * s + x * w

    def col_combine(t, j, a, b):
        if b % a == 0:
            col_add(j, t, -(b // a))
            return
        g, x, y = _xgcd(a, b)
        u, v = a // g, b // g
        for r in A:
            s, w = r[t], r[j]
            r[t] = x * s + y * w
            r[j] = -v * s + u * w
        for r in V:
            s, w = r[t], r[j]
            r[t] = x * s + y * w
            r[j] = -v * s + u * w
        Vt, Vj = Vi[t], Vi[j]
        for k in range(n):
            s, w = Vt[k], Vj[k]
            Vt[k] = u * s + v * w
            Vj[k] = -y * s + x * w

    def row_negate(i):
        A[i] = [-x for x in A[i]]
        U[i] = [-x for x in U[i]]
        for r in Ui:
            r[i] = -r[i]

    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            Ai = A[i]
            for j in range(t, n):
                x = Ai[j]
                if x != 0 and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
        if best is None:
            break
        _, pi, pj = best
        if pi != t:
            row_swap(t, pi)
        if pj != t:
            col_swap(t, pj)
        if A[t][t] < 0:
            row_negate(t)
        while True:
            for i in range(t + 1, m):
                if A[i][t]:
                    row_combine(t, i, A[t][t], A[i][t])
            col_dirty = False
            for j in range(t + 1, n):
                if A[t][j]:
                    col_combine(t, j, A[t][t], A[t][j])
                    col_dirty = True
            if not col_dirty or all(A[i][t] == 0 for i in range(t + 1, m)):
                break
        if A[t][t] < 0:
            row_negate(t)
        # enforce divisibility: pivot must divide the remaining block
        p = A[t][t]
        fixed = True
        if p not in (0, 1):
            for i in range(t + 1, m):
                if any(x % p for x in A[i][t + 1:]):
                    row_add(t, i, 1)
                    fixed = False
                    break
        if fixed:
            t += 1
    Um = IntMatrix.from_rows(U, cols=m)
    Vm = IntMatrix.from_rows(V, cols=n)
    S = IntMatrix.from_rows(A, cols=n)
    return SmithDecomposition(Um, S, Vm,
                              IntMatrix.from_rows(Ui, cols=m),
                              IntMatrix.from_rows(Vi, cols=n))


# ---------------------------------------------------------------------------
# integer solves and lattices


_BIG = 1 << 20  # entries beyond this trigger lattice size reduction


def _norm2(v):
    return sum(x * x for x in v)


def reduce_lattice_rows(rows, max_passes=64):
    """Pairwise (multidimensional Euclid) size reduction of a basis.

    Elimination can hand back bases whose vectors carry astronomically
    large entries even though the lattice itself is tame; greedy
    mutual reduction recovers short vectors. Only elementary
    operations are used, so the span and the basis property are
    preserved. Bases that are already small pass through untouched so
    small computations stay bit-identical.
    """
    basis = [list(map(int, r)) for r in rows if any(r)]
    if len(basis) <= 1:
        return tuple(tuple(r) for r in basis)
    if all(abs(x) < _BIG for r in basis for x in r):
        return tuple(tuple(r) for r in basis)
    for _ in range(max_passes):
        changed = False
        basis.sort(key=lambda r: (_norm2(r), r))
        for j in range(len(basis)):
            bj = basis[j]
            n2 = _norm2(bj)
            if n2 == 0:
                continue
            for i in range(len(basis)):
                if i == j:
                    continue
                bi = basis[i]
                num = sum(a * b for a, b in zip(bi, bj))
                q = (2 * num + n2) // (2 * n2)
                if q:
                    new = [a - q * b for a, b in zip(bi, bj)]
                    if _norm2(new) < _norm2(bi):
                        basis[i] = new
                        changed = True
        if not changed:
            break
    return tuple(tuple(r) for r in basis)


def babai_reduce(vec, basis_rows, passes=6):
    """Shift vec by lattice vectors to shrink it (nearest-plane style)."""
    v = list(map(int, vec))
    if all(abs(x) < _BIG for x in v):
        return tuple(v)
    for _ in range(passes):
        changed = False
        for b in basis_rows:
            n2 = _norm2(b)
            if n2 == 0:
                continue
            num = sum(a * c for a, c in zip(v, b))
            q = (2 * num + n2) // (2 * n2)
            if q:
                v = [a - q * c for a, c in zip(v, b)]
                changed = True
        if not changed:
            break
    return tuple(v)


def solve_linear(M: IntMatrix, b):
    """One integer solution x of M x = b, or None when none exists.

    Solutions with runaway entries are shifted by kernel vectors back
    into a small representative.
    """
    b = tuple(int(x) for x in b)
    if len(b) != M.rows:
        raise ZModuleError("rhs length mismatch")
    snf = smith_normal_form(M)
    c = snf.U.apply(b)
    r = min(M.rows, M.cols)
    y = [0] * M.cols
    for i in range(M.rows):
        d = snf.S[i, i] if i < r else 0
        if d == 0:
            if c[i] != 0:
                return None
        else:
            if c[i] % d:
                return None
            y[i] = c[i] // d
    x = snf.V.apply(y)
    if any(abs(t) >= _BIG for t in x):
        x = babai_reduce(x, kernel_basis(M))
    return x


def kernel_basis(M: IntMatrix):
    """Basis (list of vectors) of the integer kernel lattice of M."""
    snf = smith_normal_form(M)
    r = snf.rank
    return list(reduce_lattice_rows([snf.V.col(j) for j in range(r, M.cols)]))


def lattice_basis(vectors, ambient):
    """Basis of the lattice in Z^ambient spanned by the given vectors."""
    vecs = [tuple(v) for v in vectors if any(v)]
    if not vecs:
        return ()
    R = IntMatrix.from_rows(vecs, cols=ambient)
    snf = smith_normal_form(R)
    reduced = snf.U * R
    return reduce_lattice_rows([reduced.row(i) for i in range(snf.rank)])


@lru_cache(maxsize=None)
def _rows_matrix_t(rows, ambient):
    """Cached transpose of a rows-tuple, for lattice membership solves."""
    return IntMatrix.from_rows(list(rows), cols=ambient).transpose()


def solve_mod_lattice(M: IntMatrix, b, lattice_rows):
    """Solve M x = b modulo the lattice spanned by ``lattice_rows``.

    Returns x with M x - b in the lattice, or None.
    """
    rows = [tuple(r) for r in lattice_rows]
    if not rows:
        return solve_linear(M, b)
    L = IntMatrix.from_rows(rows, cols=M.rows).transpose()
    sol = solve_linear(M.hstack(L), b)
    if sol is None:
        return None
    return sol[:M.cols]


def preimage_lattice(M: IntMatrix, lattice_rows):
    """Basis of {x : M x lies in the lattice spanned by lattice_rows}."""
    rows = [tuple(r) for r in lattice_rows]
    if rows:
        L = IntMatrix.from_rows(rows, cols=M.rows).transpose()
        big = M.hstack(L)
    else:
        big = M
    proj = [k[:M.cols] for k in kernel_basis(big)]
    return lattice_basis(proj, M.cols)


def in_lattice(v, lattice_rows, ambient):
    rows = tuple(tuple(r) for r in lattice_rows)
    if not rows:
        return all(x == 0 for x in v)
    return solve_linear(_rows_matrix_t(rows, ambient), v) is not None


# ---------------------------------------------------------------------------
# finitely presented abelian groups


@dataclass(frozen=True)
class FpGroup:
    """Z^{n_gens} modulo the row lattice of ``relations``."""

    n_gens: int
    relations: IntMatrix

    @staticmethod
    def free(n):
        return FpGroup(n, IntMatrix.zero(0, n))

    @staticmethod
    def cyclic(d):
        """Z/d, with Z/0 = Z and Z/1 trivial (one collapsed generator)."""
        return FpGroup(1, IntMatrix.from_rows([[d]]) if d else IntMatrix.zero(0, 1))

    @staticmethod
    def from_divisors(divs):
        divs = list(divs)
        rows = [[divs[i] if j == i else 0 for j in range(len(divs))]
                for i in range(len(divs)) if divs[i] != 0]
        return FpGroup(len(divs), IntMatrix.from_rows(rows, cols=len(divs)))

    def __post_init__(self):
        if self.relations.cols != self.n_gens:
            raise ZModuleError("relations must have n_gens columns")

    @cached_property
    def lattice(self):
        """Reduced basis of the relation lattice (list of row vectors)."""
        return lattice_basis(self.relations.entries, self.n_gens)

    @cached_property
    def _canon(self):
        """SNF-reduced canonical data; see ``divisors``/``canon_coords``."""
        N = self.relations.transpose()  # n_gens x n_rels, columns = relations
        snf = smith_normal_form(N)
        r = snf.rank
        keep = []  # indices of generators surviving in canonical form
        divs = []
        for i in range(r):
            d = snf.S[i, i]
            if d != 1:
                keep.append(i)
                divs.append(d)
        for i in range(r, self.n_gens):
            keep.append(i)
            divs.append(0)
        return snf, tuple(keep), tuple(divs)

    @property
    def divisors(self):
        """Elementary divisors: unit-free chain d1 | d2 | ..., trailing 0s."""
        return self._canon[2]

    def canon_coords(self, vec):
        """Coordinates of a Z^{n_gens} vector in the canonical presentation."""
        snf, keep, divs = self._canon
        y = snf.U.apply(vec)
        out = []
        for i, d in zip(keep, divs):
            out.append(y[i] % d if d else y[i])
        return tuple(out)

    def canon_lift(self, coords):
        """A small Z^{n_gens} representative of canonical coordinates."""
        snf, keep, divs = self._canon
        coords = tuple(coords)
        if len(coords) != len(keep):
            raise ZModuleError("canonical coordinate length mismatch")
        y = [0] * self.n_gens
        for i, c in zip(keep, coords):
            y[i] = int(c)
        return babai_reduce(snf.uinv.apply(y), self.lattice)

    @property
    def canonical(self):
        """The canonical FpGroup with diagonal relations."""
        return FpGroup.from_divisors(self.divisors)

    def contains_zero(self, vec):
        """Does the vector represent 0, i.e. lie in the relation lattice?"""
        return in_lattice(vec, self.lattice, self.n_gens)

    def is_trivial(self):
        return not self.divisors

    def order(self):
        """Number of elements, or None for infinite groups."""
        n = 1
        for d in self.divisors:
            if d == 0:
                return None
            n *= d
        return n

    def elements(self):
        """All elements as canonical coordinate tuples (finite groups only)."""
        if self.order() is None:
            raise ZModuleError("infinite group enumeration")
        out = [()]
        for d in self.divisors:
            out = [t + (k,) for t in out for k in range(d)]
        return out

    def __repr__(self):
        return f"FpGroup(divisors={list(self.divisors)})"


def elementary_divisors(G: FpGroup):
    return list(G.divisors)


# ---------------------------------------------------------------------------
# morphisms


@dataclass(frozen=True)
class GroupMorphism:
    """Morphism of FpGroups given by a dst.n_gens x src.n_gens matrix."""

    src: FpGroup
    dst: FpGroup
    matrix: IntMatrix

    @staticmethod
    def zero(src, dst):
        return GroupMorphism(src, dst, IntMatrix.zero(dst.n_gens, src.n_gens))

    @staticmethod
    def identity(G):
        return GroupMorphism(G, G, IntMatrix.identity(G.n_gens))

    def __post_init__(self):
        if self.matrix.rows != self.dst.n_gens or self.matrix.cols != self.src.n_gens:
            raise ZModuleError("morphism matrix shape mismatch")

    def is_well_defined(self):
        """Each src relation row must map into the dst relation lattice."""
        for row in self.src.relations.entries:
            if not in_lattice(self.matrix.apply(row), self.dst.lattice, self.dst.n_gens):
                return False
        return True

    def check(self):
        if not self.is_well_defined():
            raise ZModuleError("ill-defined morphism: relation escapes dst lattice")
        return self

    def __call__(self, vec):
        return self.matrix.apply(vec)

    def compose(self, other):
        """self after other (matrix product)."""
        if other.dst.n_gens != self.src.n_gens:
            raise ZModuleError("composition mismatch")
        return GroupMorphism(other.src, self.dst, self.matrix * other.matrix)

    def __add__(self, other):
        return GroupMorphism(self.src, self.dst, self.matrix + other.matrix)

    def __sub__(self, other):
        return GroupMorphism(self.src, self.dst, self.matrix - other.matrix)

    def __neg__(self):
        return GroupMorphism(self.src, self.dst, -self.matrix)

    def is_zero_morphism(self):
        """Zero as a morphism: every generator image lies in dst relations."""
        return all(self.dst.contains_zero(self.matrix.col(j))
                   for j in range(self.src.n_gens))

    def equal(self, other):
        if self.src.n_gens != other.src.n_gens or self.dst.n_gens != other.dst.n_gens:
            return False
        return (self - other).is_zero_morphism()


def kernel(f: GroupMorphism):
    """Kernel subgroup with its inclusion morphism.

    The kernel of ``[x] -> [f x]`` is K/L_src where K is the lattice of x
    with f(x) inside the dst relation lattice.
    """
    K = preimage_lattice(f.matrix, f.dst.lattice)
    if not K:
        zero = FpGroup(0, IntMatrix.zero(0, 0))
        return zero, GroupMorphism(zero, f.src, IntMatrix.zero(f.src.n_gens, 0))
    basis = IntMatrix.from_rows(K, cols=f.src.n_gens).transpose()  # n x s
    rel_rows = []
    for row in f.src.relations.entries:
        coords = solve_linear(basis, row)
        if coords is None:  # cannot happen for well-defined f
            raise ZModuleError("src relation outside kernel lattice")
        rel_rows.append(coords)
    G = FpGroup(len(K), IntMatrix.from_rows(rel_rows, cols=len(K)))
    return G, GroupMorphism(G, f.src, basis)


def image(f: GroupMorphism):
    """Image subgroup with its inclusion into dst.

    Presented on the src generators: relations are all coordinate vectors
    that f sends into the dst relation lattice.
    """
    rel = preimage_lattice(f.matrix, f.dst.lattice)
    G = FpGroup(f.src.n_gens, IntMatrix.from_rows(rel, cols=f.src.n_gens))
    return G, GroupMorphism(G, f.dst, f.matrix)


def cokernel(f: GroupMorphism):
    """Cokernel with the projection from dst."""
    extra = [f.matrix.col(j) for j in range(f.src.n_gens)]
    rels = IntMatrix.from_rows(list(f.dst.relations.entries) + extra,
                               cols=f.dst.n_gens)
    G = FpGroup(f.dst.n_gens, rels)
    return G, GroupMorphism(f.dst, G, IntMatrix.identity(f.dst.n_gens))


def is_injective(f: GroupMorphism):
    return kernel(f)[0].is_trivial()


def is_surjective(f: GroupMorphism):
    return cokernel(f)[0].is_trivial()


def is_iso(f: GroupMorphism):
    return is_injective(f) and is_surjective(f)


def invert_iso(f: GroupMorphism):
    """Inverse of an isomorphism (solve one lattice problem per generator)."""
    cols = []
    for j in range(f.dst.n_gens):
        e = [1 if i == j else 0 for i in range(f.dst.n_gens)]
        x = solve_mod_lattice(f.matrix, e, f.src.relations.entries)
        if x is None:
            raise ZModuleError("morphism is not surjective; cannot invert")
        cols.append(x)
    mat = IntMatrix.from_rows(cols, cols=f.src.n_gens).transpose()
    g = GroupMorphism(f.dst, f.src, mat)
    if not g.is_well_defined():
        raise ZModuleError("morphism is not injective; inverse ill-defined")
    return g


def morphism_preimage(f: GroupMorphism, vec):
    """Some x with f(x) = vec in dst (i.e. modulo dst relations), or None."""
    return solve_mod_lattice(f.matrix, vec, f.dst.lattice)


def admissible_matrix_lattice(src: FpGroup, dst: FpGroup, extra_vectors=()):
    """Basis of the lattice of well-defined morphism matrices src -> dst.

    A matrix M qualifies when M v lies in the dst relation lattice for
    every relation row v of src and every vector in ``extra_vectors``
    (used e.g. to force M o d = 0 against a previous differential).
    Returned as vec(M) row vectors of length dst.n_gens * src.n_gens.
    """
    bn, an = dst.n_gens, src.n_gens
    nm = bn * an
    if nm == 0:
        return []
    constraints = [tuple(r) for r in src.relations.entries]
    constraints += [tuple(v) for v in extra_vectors]
    blat = dst.lattice
    nl = len(blat)
    rows = []
    for k, r in enumerate(constraints):
        for i in range(bn):
            # sum_j M[i,j] r_j - sum_l y_{k,l} blat[l][i] = 0
            row = [0] * (nm + nl * len(constraints))
            for j in range(an):
                row[i * an + j] = r[j]
            for l, lv in enumerate(blat):
                row[nm + k * nl + l] = -lv[i]
            rows.append(row)
    if not rows:
        return [tuple(1 if k == t else 0 for k in range(nm)) for t in range(nm)]
    big = IntMatrix.from_rows(rows, cols=nm + nl * len(constraints))
    return lattice_basis([v[:nm] for v in kernel_basis(big)], nm)


def unvec_matrix(v, rows, cols):
    return IntMatrix.from_rows([v[i * cols:(i + 1) * cols] for i in range(rows)],
                               cols=cols)


def hom_group(A: FpGroup, B: FpGroup):
    """Hom(A, B) as an FpGroup together with basis morphisms.

    Admissible matrices M (each src relation lands in the dst lattice)
    form a lattice in Z^{B.n x A.n}; matrices whose columns all lie in
    the dst lattice act as zero. Hom(A, B) is the quotient.
    """
    bn, an = B.n_gens, A.n_gens
    nm = bn * an
    admissible = admissible_matrix_lattice(A, B)
    if not admissible:
        G = FpGroup(0, IntMatrix.zero(0, 0))
        return G, []
    basis_mat = IntMatrix.from_rows(admissible, cols=nm).transpose()  # nm x s
    # trivial homs: all columns in the dst lattice
    triv = []
    for j in range(an):
        for lv in B.lattice:
            v = [0] * nm
            for i in range(bn):
                v[i * an + j] = lv[i]
            triv.append(tuple(v))
    rel_out = []
    for v in triv:
        coords = solve_linear(basis_mat, v)
        if coords is None:
            raise ZModuleError("trivial hom outside admissible lattice")
        rel_out.append(coords)
    G = FpGroup(len(admissible), IntMatrix.from_rows(rel_out, cols=len(admissible)))
    gens = [GroupMorphism(A, B, unvec_matrix(v, bn, an)) for v in admissible]
    return G, gens


class MatrixSystem:
    """Joint integer linear system over unknown matrices with congruences.

    Unknown blocks are matrices; a constraint states

        sum_k  L_k * X_{name_k} * R_k  ==  C   (mod column lattice)

    where the lattice rows come from the relation lattice of the target
    group (empty for exact equality). Slack unknowns for the lattice
    part are added internally. ``solve`` returns one solution as a dict
    of IntMatrix, ``kernel`` returns a basis of the homogeneous
    solution lattice in the same shape.
    """

    def __init__(self):
        self.blocks = {}   # name -> (offset, rows, cols)
        self.nvars = 0
        self.rows = []
        self.rhs = []

    def add_unknown(self, name, rows, cols):
        if name in self.blocks:
            raise ZModuleError(f"duplicate unknown {name!r}")
        self.blocks[name] = (self.nvars, rows, cols)
        self.nvars += rows * cols
        return name

    def _slack(self, n):
        off = self.nvars
        self.nvars += n
        return off

    def add_constraint(self, terms, rhs=None, lattice_rows=()):
        """terms: iterable of (left, name, right) with left/right IntMatrix or None."""
        shapes = set()
        prepared = []
        for left, name, right in terms:
            off, r, c = self.blocks[name]
            lrows = left.rows if left is not None else r
            rcols = right.cols if right is not None else c
            if left is not None and left.cols != r:
                raise ZModuleError("left factor shape mismatch")
            if right is not None and right.rows != c:
                raise ZModuleError("right factor shape mismatch")
            shapes.add((lrows, rcols))
            prepared.append((left, off, r, c, right))
        if len(shapes) != 1:
            raise ZModuleError("constraint terms have inconsistent shapes")
        out_r, out_c = shapes.pop()
        if rhs is None:
            rhs = IntMatrix.zero(out_r, out_c)
        lat = [tuple(v) for v in lattice_rows]
        slack_off = self._slack(len(lat) * out_c) if lat else None
        # pad all previously added rows
        for row in self.rows:
            row.extend([0] * (self.nvars - len(row)))
        for i in range(out_r):
            for j in range(out_c):
                row = [0] * self.nvars
                for left, off, r, c, right in prepared:
                    # coefficient of X[a,b] in (L X R)[i,j] is L[i,a]*R[b,j]
                    for a in range(r):
                        la = left[i, a] if left is not None else (1 if i == a else 0)
                        if la == 0:
                            continue
                        for b in range(c):
                            rb = right[b, j] if right is not None else (1 if b == j else 0)
                            if rb:
                                row[off + a * c + b] += la * rb
                for l, lv in enumerate(lat):
                    row[slack_off + l * out_c + j] = -lv[i]
                self.rows.append(row)
                self.rhs.append(rhs[i, j])

    def _padded_matrix(self):
        rows = [row + [0] * (self.nvars - len(row)) for row in self.rows]
        return IntMatrix.from_rows(rows, cols=self.nvars)

    def _unpack(self, vec):
        out = {}
        for name, (off, r, c) in self.blocks.items():
            out[name] = unvec_matrix(vec[off:off + r * c], r, c)
        return out

    def solve(self):
        if not self.rows:
            return self._unpack((0,) * self.nvars)
        sol = solve_linear(self._padded_matrix(), self.rhs)
        if sol is None:
            return None
        return self._unpack(sol)

    def kernel(self):
        if not self.rows:
            basis = [tuple(1 if k == t else 0 for k in range(self.nvars))
                     for t in range(self.nvars)]
        else:
            basis = kernel_basis(self._padded_matrix())
        return [self._unpack(v) for v in basis]


def is_exact_at(f: GroupMorphism, g: GroupMorphism) -> bool:
    """Exactness of src -f-> mid -g-> dst at mid: im f = ker g."""
    if not g.compose(f).is_zero_morphism():
        return False
    ker_grp, incl = kernel(g)
    for j in range(ker_grp.n_gens):
        e = [1 if i == j else 0 for i in range(ker_grp.n_gens)]
        if morphism_preimage(f, incl(e)) is None:
            return False
    return True
