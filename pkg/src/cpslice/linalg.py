"""Exact integer linear algebra.

Smith normal form, finitely generated abelian groups given by relation
matrices, homomorphisms between them, kernels/images/cokernels,
subquotients and homology of chain complexes of groups.

Everything is built on Python integers, so no entry can overflow.  Matrices
are immutable (:class:`IntMatrix`); groups are immutable and are kept in a
simplified "diagonal" presentation whenever they are produced by one of the
constructions below, which keeps all later matrices small.

>>> G = FgAbGroup.from_orders([2, 4])
>>> G.canonical_form()
(0, (2, 4))
>>> f = GroupHom(FgAbGroup.free(1), FgAbGroup.free(1), IntMatrix([[3]]))
>>> cokernel(f)[0].canonical_form()
(0, (3,))
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence


class IllDefinedError(ValueError):
    """A matrix does not define a homomorphism between the given groups."""


class NotAComplexError(ValueError):
    """Consecutive differentials do not compose to zero."""


# ---------------------------------------------------------------------------
# matrices


class IntMatrix:
    """Immutable integer matrix stored row-major as a tuple of tuples."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, data: Iterable[Iterable[int]] = (), rows: int | None = None,
                 cols: int | None = None):
        data = tuple(tuple(int(x) for x in row) for row in data)
        if rows is None:
            rows = len(data)
        if cols is None:
            cols = len(data[0]) if data else 0
        if len(data) != rows or any(len(r) != cols for r in data):
            raise ValueError("ragged matrix or shape mismatch")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "data", data)

    def __setattr__(self, name, value):
        raise AttributeError("IntMatrix is immutable")

    @classmethod
    def _make(cls, data, rows: int, cols: int) -> "IntMatrix":
        # trusted constructor: data is already a rectangular nest of ints
        obj = cls.__new__(cls)
        object.__setattr__(obj, "rows", rows)
        object.__setattr__(obj, "cols", cols)
        object.__setattr__(obj, "data", tuple(tuple(r) for r in data))
        return obj

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls._make([(0,) * cols] * rows, rows, cols)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls._make([[int(i == j) for j in range(n)] for i in range(n)], n, n)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: int) -> "IntMatrix":
        return cls([[c[i] for c in columns] for i in range(rows)], rows, len(columns))

    @classmethod
    def diagonal(cls, entries: Sequence[int]) -> "IntMatrix":
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)], n, n)

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.data]

    def columns(self) -> list[list[int]]:
        return [[self.data[i][j] for i in range(self.rows)] for j in range(self.cols)]

    def column(self, j: int) -> list[int]:
        return [self.data[i][j] for i in range(self.rows)]

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def T(self) -> "IntMatrix":
        return IntMatrix._make(list(zip(*self.data)) if self.rows else
                               [() for _ in range(self.cols)], self.cols, self.rows)

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        ocols = list(zip(*other.data)) if other.rows else [()] * other.cols
        out = []
        for row in self.data:
            nz = [(k, a) for k, a in enumerate(row) if a]
            out.append([sum(a * col[k] for k, a in nz) for col in ocols])
        return IntMatrix._make(out, self.rows, other.cols)

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return IntMatrix._make([[a + b for a, b in zip(r, s)] for r, s in zip(self.data, other.data)],
                               self.rows, self.cols)

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        return self + (-other)

    def __neg__(self) -> "IntMatrix":
        return IntMatrix._make([[-a for a in r] for r in self.data], self.rows, self.cols)

    def scale(self, c: int) -> "IntMatrix":
        return IntMatrix([[c * a for a in r] for r in self.data], self.rows, self.cols)

    def __eq__(self, other) -> bool:
        return isinstance(other, IntMatrix) and self.shape == other.shape and self.data == other.data

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self.data))

    def __repr__(self) -> str:
        return f"IntMatrix({self.tolist()!r}, rows={self.rows}, cols={self.cols})"

    def is_zero(self) -> bool:
        return all(a == 0 for r in self.data for a in r)

    def hstack(self, *others: "IntMatrix") -> "IntMatrix":
        mats = (self,) + others
        rows = self.rows
        if any(m.rows != rows for m in mats):
            raise ValueError("hstack row mismatch")
        return IntMatrix._make([sum((m.data[i] for m in mats), ()) for i in range(rows)], rows,
                               sum(m.cols for m in mats))

    def vstack(self, *others: "IntMatrix") -> "IntMatrix":
        mats = (self,) + others
        cols = self.cols
        if any(m.cols != cols for m in mats):
            raise ValueError("vstack column mismatch")
        return IntMatrix._make([r for m in mats for r in m.data], sum(m.rows for m in mats), cols)

    def submatrix(self, rows: Sequence[int] | None = None, cols: Sequence[int] | None = None) -> "IntMatrix":
        rows = range(self.rows) if rows is None else rows
        cols = range(self.cols) if cols is None else cols
        return IntMatrix._make([[self.data[i][j] for j in cols] for i in rows], len(rows), len(cols))

    def det(self) -> int:
        if self.rows != self.cols:
            raise ValueError("det of non-square matrix")
        d = smith_normal_form(self)
        sign = _det_unimodular(d.U) * _det_unimodular(d.Vt)
        prod = 1
        for i in range(self.rows):
            prod *= d.D.data[i][i]
        return sign * prod


def block_diagonal(blocks: Sequence[IntMatrix]) -> IntMatrix:
    rows = sum(b.rows for b in blocks)
    cols = sum(b.cols for b in blocks)
    out = [[0] * cols for _ in range(rows)]
    r0 = c0 = 0
    for b in blocks:
        for i in range(b.rows):
            out[r0 + i][c0:c0 + b.cols] = b.data[i]
        r0 += b.rows
        c0 += b.cols
    return IntMatrix(out, rows, cols)


def kronecker(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    out = []
    for i in range(a.rows):
        for k in range(b.rows):
            out.append([a.data[i][j] * b.data[k][l] for j in range(a.cols) for l in range(b.cols)])
    return IntMatrix(out, a.rows * b.rows, a.cols * b.cols)


# ---------------------------------------------------------------------------
# Smith normal form


@dataclass(frozen=True)
class SmithDecomposition:
    """``U @ A @ Vt == D`` with ``U``, ``Vt`` unimodular and ``D`` diagonal.

    ``Uinv`` is the inverse of ``U``; it is tracked during elimination since
    column spans are read off from it.
    """

    U: IntMatrix
    D: IntMatrix
    Vt: IntMatrix
    Uinv: IntMatrix

    @property
    def diagonal(self) -> list[int]:
        return [self.D.data[i][i] for i in range(min(self.D.rows, self.D.cols))]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d)


def _min_pivot(D, t, m, n):
    best = None
    for i in range(t, m):
        row = D[i]
        for j in range(t, n):
            a = row[j]
            if a and (best is None or abs(a) < best[0]):
                best = (abs(a), i, j)
                if best[0] == 1:
                    return best
    return best


def _snf_lists(A: list[list[int]], m: int, n: int):
    D = [row[:] for row in A]
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    Ui = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]
        for row in Ui:
            row[i], row[j] = row[j], row[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):
        # row_dst -= q * row_src
        rs, rd = D[src], D[dst]
        for k in range(n):
            if rs[k]:
                rd[k] -= q * rs[k]
        us, ud = U[src], U[dst]
        for k in range(m):
            if us[k]:
                ud[k] -= q * us[k]
        for row in Ui:
            if row[dst]:
                row[src] += q * row[dst]

    def add_col(dst, src, q):
        # col_dst -= q * col_src
        for row in D:
            if row[src]:
                row[dst] -= q * row[src]
        for row in V:
            if row[src]:
                row[dst] -= q * row[src]

    t = 0
    while t < min(m, n):
        piv = _min_pivot(D, t, m, n)
        if piv is None:
            break
        _, i, j = piv
        if i != t:
            swap_rows(t, i)
        if j != t:
            swap_cols(t, j)
        while True:
            changed = False
            p = D[t][t]
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(i, t, D[i][t] // p)
                    if D[i][t]:
                        changed = True
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(j, t, D[t][j] // p)
                    if D[t][j]:
                        changed = True
            if changed:
                # move the smallest remainder in row/column t into the pivot
                best = (abs(D[t][t]), t, t)
                for i in range(t + 1, m):
                    a = D[i][t]
                    if a and abs(a) < best[0]:
                        best = (abs(a), i, t)
                for j in range(t + 1, n):
                    a = D[t][j]
                    if a and abs(a) < best[0]:
                        best = (abs(a), t, j)
                _, i, j = best
                if i != t:
                    swap_rows(t, i)
                if j != t:
                    swap_cols(t, j)
                continue
            p = D[t][t]
            bad = None
            for i in range(t + 1, m):
                row = D[i]
                for j in range(t + 1, n):
                    if row[j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(t, bad, -1)
        if D[t][t] < 0:
            D[t] = [-a for a in D[t]]
            U[t] = [-a for a in U[t]]
            for row in Ui:
                row[t] = -row[t]
        t += 1
    return U, D, V, Ui


@lru_cache(maxsize=8192)
def smith_normal_form(A: IntMatrix) -> SmithDecomposition:
    """Smith normal form with deterministic pivoting.

    The pivot is always the first entry (row-major) of minimal nonzero
    absolute value in the remaining block, so the output is reproducible.
    Results are memoized; matrices are immutable so this is safe.
    """
    m, n = A.rows, A.cols
    U, D, V, Ui = _snf_lists([list(r) for r in A.data], m, n)
    mk = IntMatrix._make
    return SmithDecomposition(mk(U, m, m), mk(D, m, n), mk(V, n, n), mk(Ui, m, m))


def _det_unimodular(U: IntMatrix) -> int:
    # determinant of a unimodular matrix by fraction-free elimination
    n = U.rows
    if n == 0:
        return 1
    M = [list(r) for r in U.data]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k]:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


# ---------------------------------------------------------------------------
# lattice helpers (all in terms of column vectors)


def kernel_basis(A: IntMatrix) -> IntMatrix:
    """Basis (as columns) of ``{x in Z^n : A x = 0}``."""
    snf = smith_normal_form(A)
    r = snf.rank
    return snf.Vt.submatrix(None, list(range(r, A.cols)))


def column_span_basis(A: IntMatrix) -> IntMatrix:
    """A basis (as columns) of the lattice spanned by the columns of ``A``."""
    snf = smith_normal_form(A)
    d = snf.diagonal
    cols = []
    for i, di in enumerate(d):
        if di:
            cols.append([snf.Uinv.data[k][i] * di for k in range(A.rows)])
    return IntMatrix.from_columns(cols, A.rows)


class _Solver:
    """Solves ``A x = b`` over the integers for many right-hand sides."""

    def __init__(self, A: IntMatrix):
        self.A = A
        self.snf = smith_normal_form(A)
        self.diag = self.snf.diagonal
        self._urows = [[(k, a) for k, a in enumerate(row) if a] for row in self.snf.U.data]
        self._vcols = self.snf.Vt.columns()

    def solve(self, b: Sequence[int]) -> list[int] | None:
        ub = [sum(a * b[k] for k, a in row) for row in self._urows]
        out = [0] * self.snf.Vt.rows
        for i, d in enumerate(self.diag):
            u = ub[i]
            if not u:
                continue
            if d == 0:
                return None
            q, rem = divmod(u, d)
            if rem:
                return None
            for k, v in enumerate(self._vcols[i]):
                if v:
                    out[k] += v * q
        for i in range(len(self.diag), len(ub)):
            if ub[i]:
                return None
        return out


# ---------------------------------------------------------------------------
# groups


class FgAbGroup:
    """``Z^ngens / (column span of relations)``.

    ``relations`` has one column per relator.  The canonical form
    ``(free rank, torsion coefficients)`` is computed once and cached.
    """

    __slots__ = ("ngens", "relations", "_canon", "_orders", "_solver")

    def __init__(self, ngens: int, relations: IntMatrix | None = None):
        if relations is None:
            relations = IntMatrix.zeros(ngens, 0)
        if relations.rows != ngens:
            raise ValueError("relation matrix must have one row per generator")
        self.ngens = ngens
        self.relations = relations
        self._canon = None
        self._orders = _diagonal_orders(relations)
        self._solver = None

    @classmethod
    def free(cls, rank: int) -> "FgAbGroup":
        return cls(rank)

    @classmethod
    def zero(cls) -> "FgAbGroup":
        return cls(0)

    @classmethod
    def from_orders(cls, orders: Sequence[int]) -> "FgAbGroup":
        """Direct sum of cyclic groups ``Z/o`` (``o == 0`` meaning ``Z``)."""
        n = len(orders)
        cols = [[o if k == i else 0 for k in range(n)] for i, o in enumerate(orders) if o]
        return cls(n, IntMatrix.from_columns(cols, n))

    @property
    def orders(self) -> list[int] | None:
        """Per-generator orders if the presentation is diagonal, else None."""
        return self._orders

    def canonical_form(self) -> tuple[int, tuple[int, ...]]:
        if self._canon is None:
            if self._orders is not None:
                rank = sum(1 for o in self._orders if o == 0)
                tors = _normalize_torsion([o for o in self._orders if o > 1])
            else:
                snf = smith_normal_form(self.relations)
                d = snf.diagonal
                r = sum(1 for x in d if x)
                rank = self.ngens - r
                tors = tuple(x for x in d if x > 1)
            self._canon = (rank, tuple(tors))
        return self._canon

    def order(self) -> int:
        """Cardinality (0 for infinite groups)."""
        rank, tors = self.canonical_form()
        if rank:
            return 0
        out = 1
        for t in tors:
            out *= t
        return out

    def is_zero(self) -> bool:
        return self.canonical_form() == (0, ())

    def contains(self, vec: Sequence[int]) -> bool:
        """Is ``vec`` (in generator coordinates) zero in the group?"""
        if self._orders is not None:
            return all((o == 0 and v == 0) or (o and v % o == 0) for v, o in zip(vec, self._orders))
        if self._solver is None:
            self._solver = _Solver(self.relations)
        return self._solver.solve(vec) is not None

    def reduce(self, vec: Sequence[int]) -> list[int]:
        if self._orders is None:
            return list(vec)
        return [v % o if o else v for v, o in zip(vec, self._orders)]

    def __repr__(self) -> str:
        return f"FgAbGroup({describe_group(self)})"


def _diagonal_orders(rel: IntMatrix) -> list[int] | None:
    orders = [0] * rel.rows
    seen = set()
    for j in range(rel.cols):
        nz = [(i, rel.data[i][j]) for i in range(rel.rows) if rel.data[i][j]]
        if not nz:
            continue
        if len(nz) != 1:
            return None
        i, a = nz[0]
        if i in seen:
            return None
        seen.add(i)
        orders[i] = abs(a)
    return orders


def _normalize_torsion(ords: list[int]) -> tuple[int, ...]:
    """Invariant factors (divisibility chain) of a direct sum of cyclics."""
    if not ords:
        return ()
    snf = smith_normal_form(IntMatrix.diagonal(ords))
    return tuple(x for x in snf.diagonal if x > 1)


def describe_group(G: FgAbGroup) -> str:
    rank, tors = G.canonical_form()
    parts = [f"Z/{t}" for t in tors] + ["Z"] * rank
    return " + ".join(parts) if parts else "0"


def groups_isomorphic(G: FgAbGroup, H: FgAbGroup) -> bool:
    return G.canonical_form() == H.canonical_form()


@dataclass(frozen=True)
class Simplification:
    """A diagonal presentation ``new`` of ``old`` with mutually inverse maps."""

    new: FgAbGroup
    to_new: IntMatrix    # new.ngens x old.ngens
    from_new: IntMatrix  # old.ngens x new.ngens


def simplify(G: FgAbGroup) -> Simplification:
    """Rewrite ``G`` as ``Z/d_1 + ... + Z/d_k + Z^r`` with every ``d_i > 1``."""
    n = G.ngens
    snf = smith_normal_form(G.relations)
    d = snf.diagonal + [0] * (n - len(snf.diagonal))
    keep_t = [i for i in range(n) if d[i] > 1]
    keep_f = [i for i in range(n) if d[i] == 0]
    keep = keep_t + keep_f
    orders = [d[i] for i in keep_t] + [0] * len(keep_f)
    new = FgAbGroup.from_orders(orders)
    to_new = snf.U.submatrix(keep, None)
    to_new = IntMatrix([[x % o if o else x for x in row] for row, o in zip(to_new.data, orders)],
                       len(keep), n)
    from_new = snf.Uinv.submatrix(None, keep)
    return Simplification(new, to_new, from_new)


# ---------------------------------------------------------------------------
# homomorphisms


class GroupHom:
    """Homomorphism given by its matrix on generators (target x source)."""

    __slots__ = ("source", "target", "matrix")

    def __init__(self, source: FgAbGroup, target: FgAbGroup, matrix: IntMatrix, check: bool = True):
        if matrix.shape != (target.ngens, source.ngens):
            raise ValueError(f"matrix shape {matrix.shape} does not match "
                             f"{target.ngens}x{source.ngens}")
        if target.orders is not None:
            matrix = IntMatrix([[x % o if o else x for x in row]
                                for row, o in zip(matrix.data, target.orders)],
                               matrix.rows, matrix.cols)
        self.source = source
        self.target = target
        self.matrix = matrix
        if check and not self.is_well_defined():
            raise IllDefinedError("matrix does not respect the source relations")

    def is_well_defined(self) -> bool:
        img = self.matrix @ self.source.relations
        return all(self.target.contains(c) for c in img.columns())

    @classmethod
    def zero(cls, source: FgAbGroup, target: FgAbGroup) -> "GroupHom":
        return cls(source, target, IntMatrix.zeros(target.ngens, source.ngens), check=False)

    @classmethod
    def identity(cls, G: FgAbGroup) -> "GroupHom":
        return cls(G, G, IntMatrix.identity(G.ngens), check=False)

    def __matmul__(self, other: "GroupHom") -> "GroupHom":
        # self after other
        return GroupHom(other.source, self.target, self.matrix @ other.matrix, check=False)

    def __add__(self, other: "GroupHom") -> "GroupHom":
        return GroupHom(self.source, self.target, self.matrix + other.matrix, check=False)

    def __sub__(self, other: "GroupHom") -> "GroupHom":
        return GroupHom(self.source, self.target, self.matrix - other.matrix, check=False)

    def __neg__(self) -> "GroupHom":
        return GroupHom(self.source, self.target, -self.matrix, check=False)

    def scale(self, c: int) -> "GroupHom":
        return GroupHom(self.source, self.target, self.matrix.scale(c), check=False)

    def power(self, k: int) -> "GroupHom":
        out = GroupHom.identity(self.source)
        for _ in range(k):
            out = self @ out
        return out

    def is_zero(self) -> bool:
        return all(self.target.contains(c) for c in self.matrix.columns())

    def equals(self, other: "GroupHom") -> bool:
        return (self - other).is_zero()

    def apply(self, vec: Sequence[int]) -> list[int]:
        return self.target.reduce([sum(a * v for a, v in zip(row, vec)) for row in self.matrix.data])

    def is_injective(self) -> bool:
        return kernel(self)[0].is_zero()

    def is_surjective(self) -> bool:
        return cokernel(self)[0].is_zero()

    def is_isomorphism(self) -> bool:
        return self.is_injective() and self.is_surjective()

    def __repr__(self) -> str:
        return f"GroupHom({describe_group(self.source)} -> {describe_group(self.target)}, {self.matrix.tolist()})"


def _relation_kernel(F: IntMatrix, target: FgAbGroup) -> IntMatrix:
    """Generators of ``{x : F x in span(target relations)}``."""
    big = F.hstack(target.relations)
    K = kernel_basis(big)
    return K.submatrix(list(range(F.cols)), None)


def _present(ngens: int, relations: IntMatrix) -> Simplification:
    return simplify(FgAbGroup(ngens, relations))


def kernel(f: GroupHom) -> tuple[FgAbGroup, GroupHom]:
    """Kernel of ``f`` with its inclusion into ``f.source``."""
    K = _relation_kernel(f.matrix, f.target)
    sq = Subquotient(f.source, K, IntMatrix.zeros(f.source.ngens, 0))
    return sq.group, GroupHom(sq.group, f.source, sq.lift, check=False)


def image(f: GroupHom) -> tuple[FgAbGroup, GroupHom, GroupHom]:
    """Image of ``f``: ``(group, surjection from source, inclusion into target)``."""
    sq = Subquotient(f.target, f.matrix, IntMatrix.zeros(f.target.ngens, 0))
    surj = GroupHom(f.source, sq.group, sq.coords(f.matrix), check=False)
    return sq.group, surj, GroupHom(sq.group, f.target, sq.lift, check=False)


def cokernel(f: GroupHom) -> tuple[FgAbGroup, GroupHom]:
    """Cokernel of ``f`` with the projection from ``f.target``."""
    sq = Subquotient(f.target, IntMatrix.identity(f.target.ngens), f.matrix)
    return sq.group, GroupHom(f.target, sq.group, sq.coords(IntMatrix.identity(f.target.ngens)),
                              check=False)


class Subquotient:
    """``num / den`` inside ``ambient``; both given by generating columns.

    ``group`` is a simplified presentation, ``lift`` sends its generators to
    representatives in ambient coordinates and :meth:`coords` goes back.
    """

    __slots__ = ("ambient", "num", "den", "group", "lift", "_solver", "_to_new", "_na",
                 "_den_solver")

    def __init__(self, ambient: FgAbGroup, num: IntMatrix, den: IntMatrix):
        if num.rows != ambient.ngens or den.rows != ambient.ngens:
            raise ValueError("generators must be given in ambient coordinates")
        self.ambient = ambient
        self.num = num
        self.den = den
        big = num.hstack(den, ambient.relations)
        self._solver = _Solver(big)
        for c in den.columns():
            if self._solver.solve(c) is None:
                raise IllDefinedError("denominator not contained in numerator")
        a = num.cols
        self._na = a
        snf = self._solver.snf
        r = snf.rank
        K = snf.Vt.submatrix(list(range(a)), list(range(r, big.cols)))
        pres = _present(a, K)
        self.group = pres.new
        self._to_new = pres.to_new
        self.lift = ambient_reduce(ambient, num @ pres.from_new)
        self._den_solver = None

    def den_solver(self) -> "_Solver":
        if self._den_solver is None:
            self._den_solver = _Solver(self.den.hstack(self.ambient.relations))
        return self._den_solver

    @classmethod
    def whole(cls, G: FgAbGroup) -> "Subquotient":
        """``G`` inside itself, keeping the presentation of ``G`` as coordinates."""
        obj = cls.__new__(cls)
        n = G.ngens
        one = IntMatrix.identity(n)
        obj.ambient, obj.num, obj.den = G, one, IntMatrix.zeros(n, 0)
        obj._solver = _Solver(one.hstack(G.relations))
        obj._na = n
        obj.group, obj._to_new, obj.lift = G, one, one
        obj._den_solver = None
        return obj

    def coords(self, vectors: IntMatrix) -> IntMatrix:
        """Coordinates in ``group`` of ambient vectors lying in the numerator."""
        cols = []
        for v in vectors.columns():
            sol = self._solver.solve(v)
            if sol is None:
                raise IllDefinedError("vector not in the numerator subgroup")
            cols.append(sol[:self._na])
        C = IntMatrix.from_columns(cols, self._na)
        out = self._to_new @ C
        return IntMatrix([self.group.reduce(c) for c in out.columns()], out.cols, out.rows).T \
            if out.cols else out

    def contains(self, v: Sequence[int]) -> bool:
        return self._solver.solve(v) is not None

    def is_zero(self) -> bool:
        return self.group.is_zero()


def ambient_reduce(G: FgAbGroup, M: IntMatrix) -> IntMatrix:
    if G.orders is None:
        return M
    return IntMatrix([[x % o if o else x for x in row] for row, o in zip(M.data, G.orders)],
                     M.rows, M.cols)


def induced_hom(F: IntMatrix, source: Subquotient, target: Subquotient) -> GroupHom:
    """Map on subquotients induced by the ambient matrix ``F``.

    Raises :class:`IllDefinedError` when ``F`` does not carry the source
    numerator into the target numerator or the source denominator into the
    target denominator.
    """
    if F.shape != (target.ambient.ngens, source.ambient.ngens):
        raise ValueError("ambient map has the wrong shape")
    for c in (F @ source.den).columns():
        if any(c) and target.den_solver().solve(c) is None:
            raise IllDefinedError("denominator is not carried into the target denominator")
    mat = target.coords(F @ source.lift)
    return GroupHom(source.group, target.group, mat, check=True)


def _in_span(v: Sequence[int], gens: IntMatrix, ambient: FgAbGroup) -> bool:
    if all(x == 0 for x in v):
        return True
    return _Solver(gens.hstack(ambient.relations)).solve(v) is not None


def subgroup_le(A: IntMatrix, B: IntMatrix, ambient: FgAbGroup) -> bool:
    """Is span(A) contained in span(B) + relations?"""
    solver = _Solver(B.hstack(ambient.relations))
    return all(solver.solve(c) is not None for c in A.columns() if any(c))


# ---------------------------------------------------------------------------
# chain complexes


@dataclass(frozen=True)
class GroupChainComplex:
    """Groups indexed by position with differentials ``d[k]: C_k -> C_{k-1}``."""

    groups: dict
    differentials: dict

    def group(self, k: int) -> FgAbGroup:
        return self.groups.get(k, FgAbGroup.zero())

    def d(self, k: int) -> GroupHom:
        if k in self.differentials:
            return self.differentials[k]
        return GroupHom.zero(self.group(k), self.group(k - 1))

    def check(self) -> None:
        for k in self.groups:
            if k in self.differentials and (k - 1) in self.differentials:
                if not (self.differentials[k - 1] @ self.differentials[k]).is_zero():
                    raise NotAComplexError(f"d o d != 0 at position {k}")


def homology_at(C: GroupChainComplex, k: int) -> Subquotient:
    """``ker d_k / im d_{k+1}`` as a subquotient of ``C_k``."""
    dk, dk1 = C.d(k), C.d(k + 1)
    if not (dk @ dk1).is_zero():
        raise NotAComplexError(f"d o d != 0 at position {k}")
    K = _relation_kernel(dk.matrix, dk.target)
    return Subquotient(C.group(k), K, dk1.matrix)


def exact_at(f: GroupHom, g: GroupHom) -> bool:
    """Exactness of ``A -f-> B -g-> C`` at ``B``."""
    if not (g @ f).is_zero():
        return False
    K = _relation_kernel(g.matrix, g.target)
    return subgroup_le(K, f.matrix, f.target)
