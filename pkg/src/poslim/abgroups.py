"""Exact integer linear algebra.

Smith normal form over Z with unimodular transforms, finitely generated
abelian groups in invariant-factor form, homomorphisms between them, and
homology of integer chain complexes.  Everything uses Python's
arbitrary-precision integers; no floating point.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import IllDefined, NotAComplex


# ---------------------------------------------------------------------------
# matrices


@dataclass(frozen=True)
class IntMatrix:
    """Immutable integer matrix; shape is stored so 0xn and nx0 work."""

    rows: int
    cols: int
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if self.rows != len(self.entries):
            raise ValueError("row count mismatch")
        for row in self.entries:
            if len(row) != self.cols:
                raise ValueError("column count mismatch")

    @staticmethod
    def from_rows(rows: Iterable[Sequence[int]], cols: int | None = None) -> IntMatrix:
        data = tuple(tuple(int(v) for v in row) for row in rows)
        if cols is None:
            if not data:
                raise ValueError("cannot infer column count of an empty matrix")
            cols = len(data[0])
        return IntMatrix(len(data), cols, data)

    @staticmethod
    def identity(n: int) -> IntMatrix:
        return IntMatrix(n, n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @staticmethod
    def zeros(rows: int, cols: int) -> IntMatrix:
        return IntMatrix(rows, cols, tuple((0,) * cols for _ in range(rows)))

    def to_lists(self) -> list[list[int]]:
        return [list(row) for row in self.entries]

    def transpose(self) -> IntMatrix:
        return IntMatrix(self.cols, self.rows,
                         tuple(tuple(self.entries[i][j] for i in range(self.rows))
                               for j in range(self.cols)))

    def col(self, j: int) -> tuple[int, ...]:
        return tuple(row[j] for row in self.entries)

    def is_zero(self) -> bool:
        return all(v == 0 for row in self.entries for v in row)

    def __matmul__(self, other: IntMatrix) -> IntMatrix:
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        ot = other.transpose().entries
        return IntMatrix(self.rows, other.cols,
                         tuple(tuple(sum(a * b for a, b in zip(row, col)) for col in ot)
                               for row in self.entries))

    def __add__(self, other: IntMatrix) -> IntMatrix:
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")
        return IntMatrix(self.rows, self.cols,
                         tuple(tuple(a + b for a, b in zip(r1, r2))
                               for r1, r2 in zip(self.entries, other.entries)))

    def __sub__(self, other: IntMatrix) -> IntMatrix:
        return self + (-other)

    def __neg__(self) -> IntMatrix:
        return IntMatrix(self.rows, self.cols,
                         tuple(tuple(-v for v in row) for row in self.entries))

    def apply(self, vec: Sequence[int]) -> tuple[int, ...]:
        if len(vec) != self.cols:
            raise ValueError("vector length mismatch")
        return tuple(sum(a * b for a, b in zip(row, vec)) for row in self.entries)


def hstack(*mats: IntMatrix) -> IntMatrix:
    mats = tuple(m for m in mats)
    rows = mats[0].rows
    if any(m.rows != rows for m in mats):
        raise ValueError("row mismatch in hstack")
    return IntMatrix(rows, sum(m.cols for m in mats),
                     tuple(tuple(v for m in mats for v in m.entries[i]) for i in range(rows)))


def block_diag(*mats: IntMatrix) -> IntMatrix:
    rows = sum(m.rows for m in mats)
    cols = sum(m.cols for m in mats)
    out = [[0] * cols for _ in range(rows)]
    r0 = c0 = 0
    for m in mats:
        for i, row in enumerate(m.entries):
            for j, v in enumerate(row):
                out[r0 + i][c0 + j] = v
        r0 += m.rows
        c0 += m.cols
    return IntMatrix.from_rows(out, cols=cols)


def bareiss_rank(mat: IntMatrix) -> int:
    """Rank over Q by fraction-free (Bareiss) elimination."""
    a = mat.to_lists()
    m, n = mat.rows, mat.cols
    rank = 0
    prev = 1
    row = 0
    for col in range(n):
        pivot = next((i for i in range(row, m) if a[i][col] != 0), None)
        if pivot is None:
            continue
        a[row], a[pivot] = a[pivot], a[row]
        for i in range(row + 1, m):
            for j in range(col + 1, n):
                a[i][j] = (a[row][col] * a[i][j] - a[i][col] * a[row][j]) // prev
            a[i][col] = 0
        prev = a[row][col]
        rank += 1
        row += 1
        if row == m:
            break
    return rank


def determinant(mat: IntMatrix) -> int:
    """Exact determinant by fraction-free elimination."""
    if mat.rows != mat.cols:
        raise ValueError("determinant of non-square matrix")
    n = mat.rows
    if n == 0:
        return 1
    a = mat.to_lists()
    sign = 1
    prev = 1
    for col in range(n):
        pivot = next((i for i in range(col, n) if a[i][col] != 0), None)
        if pivot is None:
            return 0
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            sign = -sign
        for i in range(col + 1, n):
            for j in range(col + 1, n):
                a[i][j] = (a[col][col] * a[i][j] - a[i][col] * a[col][j]) // prev
            a[i][col] = 0
        prev = a[col][col]
    return sign * a[n - 1][n - 1]


# ---------------------------------------------------------------------------
# Smith normal form


@dataclass(frozen=True)
class SmithDecomposition:
    """U @ M @ V == D with U, V unimodular and D diagonal (divisibility chain).

    Inverse transforms are tracked alongside so callers never have to invert.
    Unpacks as (U, D, V).
    """

    U: IntMatrix
    D: IntMatrix
    V: IntMatrix
    Uinv: IntMatrix
    Vinv: IntMatrix

    def __iter__(self):
        yield self.U
        yield self.D
        yield self.V

    @property
    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.D.entries[i][i] for i in range(min(self.D.rows, self.D.cols)))

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)


def smith_normal_form(mat: IntMatrix) -> SmithDecomposition:
    """Diagonalize an integer matrix by unimodular row/column operations.

    Pivots are chosen with minimal absolute value to curb coefficient growth;
    the diagonal is nonnegative and forms a divisibility chain d1 | d2 | ...
    """
    m, n = mat.rows, mat.cols
    d = mat.to_lists()
    u = IntMatrix.identity(m).to_lists()
    uinv = IntMatrix.identity(m).to_lists()
    v = IntMatrix.identity(n).to_lists()
    vinv = IntMatrix.identity(n).to_lists()

    # Elementary operations applied to d are mirrored on the transforms:
    # row ops update u (same op) and uinv (inverse op on columns);
    # column ops update v (same op) and vinv (inverse op on rows).
    def swap_rows(i, j):
        d[i], d[j] = d[j], d[i]
        u[i], u[j] = u[j], u[i]
        for row in uinv:
            row[i], row[j] = row[j], row[i]

    def swap_cols(i, j):
        for row in d:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]
        vinv[i], vinv[j] = vinv[j], vinv[i]

    def add_row(src, dst, q):
        # row_dst += q * row_src
        d[dst][:] = [a + q * b for a, b in zip(d[dst], d[src])]
        u[dst][:] = [a + q * b for a, b in zip(u[dst], u[src])]
        for row in uinv:
            row[src] -= q * row[dst]

    def add_col(src, dst, q):
        for row in d:
            row[dst] += q * row[src]
        for row in v:
            row[dst] += q * row[src]
        vinv[src][:] = [a - q * b for a, b in zip(vinv[src], vinv[dst])]

    def negate_row(i):
        d[i][:] = [-a for a in d[i]]
        u[i][:] = [-a for a in u[i]]
        for row in uinv:
            row[i] = -row[i]

    def find_pivot(t):
        best = None
        for i in range(t, m):
            row = d[i]
            for j in range(t, n):
                val = row[j]
                if val:
                    a = abs(val)
                    if best is None or a < best[0]:
                        best = (a, i, j)
                        if a == 1:
                            return best
        return best

    t = 0
    limit = min(m, n)
    while t < limit:
        best = find_pivot(t)
        if best is None:
            break
        _, pi, pj = best
        if pi != t:
            swap_rows(t, pi)
        if pj != t:
            swap_cols(t, pj)
        # Clear row and column t; a non-dividing residue re-enters the loop
        # with a strictly smaller pivot, so this terminates.
        dirty = True
        while dirty:
            dirty = False
            pivot = d[t][t]
            for i in range(t + 1, m):
                if d[i][t]:
                    q = d[i][t] // pivot
                    add_row(t, i, -q)
                    if d[i][t]:
                        swap_rows(t, i)
                        dirty = True
                        pivot = d[t][t]
            pivot = d[t][t]
            for j in range(t + 1, n):
                if d[t][j]:
                    q = d[t][j] // pivot
                    add_col(t, j, -q)
                    if d[t][j]:
                        swap_cols(t, j)
                        dirty = True
                        pivot = d[t][t]
            if dirty:
                continue
            # Enforce divisibility: pull a non-divisible entry into row t.
            pivot = d[t][t]
            for i in range(t + 1, m):
                row = d[i]
                if any(val % pivot for val in row[t + 1:n]):
                    add_row(i, t, 1)
                    dirty = True
                    break
        if d[t][t] < 0:
            negate_row(t)
        t += 1
    for i in range(limit):
        if d[i][i] < 0:
            negate_row(i)
    return SmithDecomposition(
        IntMatrix.from_rows(u, cols=m),
        IntMatrix.from_rows(d, cols=n),
        IntMatrix.from_rows(v, cols=n),
        IntMatrix.from_rows(uinv, cols=m),
        IntMatrix.from_rows(vinv, cols=n),
    )


def kernel_lattice(mat: IntMatrix) -> IntMatrix:
    """Basis of the integer kernel {x : mat @ x = 0}, as matrix columns."""
    snf = smith_normal_form(mat)
    diag = snf.diagonal
    free = [j for j in range(mat.cols) if j >= len(diag) or diag[j] == 0]
    cols = [snf.V.col(j) for j in free]
    return IntMatrix(mat.cols, len(cols),
                     tuple(tuple(c[i] for c in cols) for i in range(mat.cols)))


def preimage_lattice(mat: IntMatrix, relations: IntMatrix) -> IntMatrix:
    """Generators of {x : mat @ x lies in the column lattice of relations}."""
    if relations.cols == 0:
        return kernel_lattice(mat)
    ker = kernel_lattice(hstack(mat, -relations))
    return IntMatrix(mat.cols, ker.cols, ker.entries[: mat.cols])


# ---------------------------------------------------------------------------
# finitely generated abelian groups


@dataclass(frozen=True)
class FgAbGroup:
    """Z^free_rank plus cyclic factors Z/d1 + ... with d1 | d2 | ... (each >= 2).

    Equality is equality of the invariant data, i.e. of isomorphism classes.
    The implied presentation has the free generators first, then one generator
    of order d_i per torsion factor.
    """

    free_rank: int
    torsion: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.free_rank < 0:
            raise ValueError("negative rank")
        prev = None
        for d in self.torsion:
            if d < 2:
                raise ValueError("torsion factors must be >= 2")
            if prev is not None and d % prev:
                raise ValueError("torsion factors must form a divisibility chain")
            prev = d

    @staticmethod
    def zero() -> FgAbGroup:
        return FgAbGroup(0, ())

    @staticmethod
    def free(n: int) -> FgAbGroup:
        return FgAbGroup(n, ())

    @staticmethod
    def cyclic(d: int) -> FgAbGroup:
        return FgAbGroup(0, (d,))

    @staticmethod
    def from_cokernel(n_gens: int, diag: Sequence[int]) -> FgAbGroup:
        """Z^n_gens modulo a lattice with the given SNF diagonal."""
        nonzero = [d for d in diag if d != 0]
        torsion = tuple(d for d in nonzero if d >= 2)
        return FgAbGroup(n_gens - len(nonzero), torsion)

    @property
    def n_gens(self) -> int:
        return self.free_rank + len(self.torsion)

    @property
    def orders(self) -> tuple[int, ...]:
        """Per-generator order, 0 meaning infinite."""
        return (0,) * self.free_rank + self.torsion

    def is_zero(self) -> bool:
        return self.n_gens == 0

    def relation_columns(self) -> IntMatrix:
        """Relation matrix: one column d_i * e_i per torsion generator."""
        n, t = self.n_gens, len(self.torsion)
        cols = [[0] * t for _ in range(n)]
        for i, d in enumerate(self.torsion):
            cols[self.free_rank + i][i] = d
        return IntMatrix.from_rows(cols, cols=t)

    def contains_relation(self, vec: Sequence[int]) -> bool:
        """True iff vec lies in the relation lattice (i.e. is zero in the group)."""
        if len(vec) != self.n_gens:
            raise ValueError("vector length mismatch")
        if any(vec[i] != 0 for i in range(self.free_rank)):
            return False
        return all(vec[self.free_rank + i] % d == 0 for i, d in enumerate(self.torsion))

    def reduce(self, vec: Sequence[int]) -> tuple[int, ...]:
        """Canonical representative: torsion coordinates reduced mod their order."""
        out = list(vec)
        for i, d in enumerate(self.torsion):
            out[self.free_rank + i] %= d
        return tuple(out)

    def __str__(self) -> str:
        parts: list[str] = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"Z/{d}" for d in self.torsion)
        return " + ".join(parts) if parts else "0"


def group_of_presentation(n_gens: int, relations: IntMatrix) -> FgAbGroup:
    """Z^n_gens modulo the column lattice of relations, normalized."""
    if n_gens == 0:
        return FgAbGroup.zero()
    if relations.cols == 0:
        return FgAbGroup.free(n_gens)
    return FgAbGroup.from_cokernel(n_gens, smith_normal_form(relations).diagonal)


def orders_columns(orders: Sequence[int]) -> IntMatrix:
    """Relation columns for a generator-orders vector (0 = free generator)."""
    idx = [i for i, d in enumerate(orders) if d != 0]
    n = len(orders)
    cols = [[0] * len(idx) for _ in range(n)]
    for j, i in enumerate(idx):
        cols[i][j] = orders[i]
    return IntMatrix.from_rows(cols, cols=len(idx))


# ---------------------------------------------------------------------------
# subquotients with generator tracking


@dataclass(frozen=True)
class Subquotient:
    """lattice(num) / lattice(den) inside Z^n, with coordinate machinery.

    generator_reps holds one ambient column per generator of `group`, free
    generators first; coords_of expresses any ambient vector of lattice(num)
    in those generators.
    """

    group: FgAbGroup
    ambient: int
    _basis: IntMatrix = field(repr=False)          # n x s, basis of lattice(num)
    _u_num: IntMatrix = field(repr=False)          # SNF row transform of num
    _d_num: tuple[int, ...] = field(repr=False)    # nonzero invariant factors of num
    _u_den: IntMatrix = field(repr=False)          # SNF row transform of W (s x s)
    _e_den: tuple[int, ...] = field(repr=False)    # diagonal of W padded to length s
    _kept: tuple[int, ...] = field(repr=False)     # indices into Z^s, free first
    generator_reps: IntMatrix = field(repr=False)

    def coords_of(self, vec: Sequence[int]) -> tuple[int, ...]:
        """Coordinates of an ambient vector (must lie in lattice(num))."""
        uv = self._u_num.apply(vec)
        s = len(self._d_num)
        for i in range(s, self.ambient):
            if uv[i] != 0:
                raise ValueError("vector not in the numerator lattice")
        z = []
        for i in range(s):
            q, r = divmod(uv[i], self._d_num[i])
            if r:
                raise ValueError("vector not in the numerator lattice")
            z.append(q)
        w = self._u_den.apply(z)
        out = []
        for i in self._kept:
            e = self._e_den[i]
            out.append(w[i] % e if e >= 2 else w[i])
        return tuple(out)


def subquotient_data(num: IntMatrix, den: IntMatrix) -> Subquotient:
    """Present lattice(num)/lattice(den); den columns must lie in lattice(num)."""
    n = num.rows
    snf_num = smith_normal_form(num)
    diag = [d for d in snf_num.diagonal if d != 0]
    s = len(diag)
    basis_cols = [[diag[j] * snf_num.Uinv.entries[i][j] for j in range(s)] for i in range(n)]
    basis = IntMatrix.from_rows(basis_cols, cols=s)
    if s == 0:
        zero = FgAbGroup.zero()
        empty = IntMatrix.zeros(n, 0)
        return Subquotient(zero, n, basis, snf_num.U, (), IntMatrix.identity(0), (), (), empty)
    # Express den in the basis: rows i >= s of U@den must vanish and row i < s
    # must be divisible by diag[i]; both fail only if den is not inside num.
    uden = (snf_num.U @ den).entries
    w_rows = []
    for i in range(s):
        row = []
        for j in range(den.cols):
            q, r = divmod(uden[i][j], diag[i])
            if r:
                raise ValueError("denominator lattice not contained in numerator lattice")
            row.append(q)
        w_rows.append(row)
    for i in range(s, n):
        if any(uden[i][j] != 0 for j in range(den.cols)):
            raise ValueError("denominator lattice not contained in numerator lattice")
    w = IntMatrix.from_rows(w_rows, cols=den.cols)
    snf_w = smith_normal_form(w)
    e = list(snf_w.diagonal) + [0] * (s - len(snf_w.diagonal))
    kept = tuple([i for i in range(s) if e[i] == 0] + [i for i in range(s) if e[i] >= 2])
    group = FgAbGroup(sum(1 for v in e if v == 0), tuple(v for v in e if v >= 2))
    reps = basis @ IntMatrix(s, len(kept),
                             tuple(tuple(snf_w.Uinv.entries[i][j] for j in kept) for i in range(s)))
    return Subquotient(group, n, basis, snf_num.U, tuple(diag), snf_w.U, tuple(e), kept, reps)


def subquotient(num: IntMatrix, den: IntMatrix) -> FgAbGroup:
    return subquotient_data(num, den).group


# ---------------------------------------------------------------------------
# chain complexes of free Z-modules


@dataclass(frozen=True)
class ChainComplexZ:
    """Free chain complex: ranks per degree, boundary[n] : C_n -> C_{n-1}."""

    ranks: tuple[int, ...]
    boundaries: tuple[IntMatrix, ...]

    def __post_init__(self) -> None:
        if len(self.boundaries) != max(len(self.ranks) - 1, 0):
            raise ValueError("need one boundary matrix per degree pair")
        for n, b in enumerate(self.boundaries, start=1):
            if (b.rows, b.cols) != (self.ranks[n - 1], self.ranks[n]):
                raise ValueError(f"boundary {n} has shape {b.rows}x{b.cols}")
        for n in range(2, len(self.ranks)):
            if not (self.boundaries[n - 2] @ self.boundaries[n - 1]).is_zero():
                raise NotAComplex(f"d o d != 0 between degrees {n} and {n - 2}")

    @property
    def top(self) -> int:
        return len(self.ranks) - 1

    def boundary(self, n: int) -> IntMatrix:
        """Boundary C_n -> C_{n-1}; zero map outside the stored range."""
        if 1 <= n <= self.top:
            return self.boundaries[n - 1]
        lower = self.ranks[n - 1] if 0 <= n - 1 <= self.top else 0
        upper = self.ranks[n] if 0 <= n <= self.top else 0
        return IntMatrix.zeros(lower, upper)


def homology(complex_: ChainComplexZ, n: int) -> FgAbGroup:
    """H_n = ker(boundary_n) / im(boundary_{n+1}) in invariant-factor form."""
    if n < 0 or n > complex_.top or complex_.ranks[n] == 0:
        return FgAbGroup.zero()
    cycles = IntMatrix.identity(complex_.ranks[n]) if n == 0 else kernel_lattice(complex_.boundary(n))
    return subquotient(cycles, complex_.boundary(n + 1))


def cohomology(complex_: ChainComplexZ, n: int) -> FgAbGroup:
    """H^n of the dual cochain complex (transposed boundaries)."""
    if n < 0 or n > complex_.top or complex_.ranks[n] == 0:
        return FgAbGroup.zero()
    delta_out = complex_.boundary(n + 1).transpose()   # C^n -> C^{n+1}
    delta_in = complex_.boundary(n).transpose()        # C^{n-1} -> C^n
    cycles = kernel_lattice(delta_out) if delta_out.rows else IntMatrix.identity(complex_.ranks[n])
    return subquotient(cycles, delta_in)


# ---------------------------------------------------------------------------
# homomorphisms


@dataclass(frozen=True)
class Homomorphism:
    """Map between presented groups: matrix columns give images of source generators."""

    source: FgAbGroup
    target: FgAbGroup
    matrix: IntMatrix

    def __post_init__(self) -> None:
        if (self.matrix.rows, self.matrix.cols) != (self.target.n_gens, self.source.n_gens):
            raise IllDefined(
                f"matrix shape {self.matrix.rows}x{self.matrix.cols} does not match "
                f"target {self.target.n_gens} x source {self.source.n_gens}")
        # d_j * (image of torsion generator j) must vanish in the target.
        for j, d in enumerate(self.source.torsion):
            col = self.matrix.col(self.source.free_rank + j)
            if not self.target.contains_relation([d * v for v in col]):
                raise IllDefined(f"relation {d}*g_{j} not respected")

    @staticmethod
    def identity(group: FgAbGroup) -> Homomorphism:
        return Homomorphism(group, group, IntMatrix.identity(group.n_gens))

    @staticmethod
    def zero(source: FgAbGroup, target: FgAbGroup) -> Homomorphism:
        return Homomorphism(source, target, IntMatrix.zeros(target.n_gens, source.n_gens))

    def compose(self, first: Homomorphism) -> Homomorphism:
        """self o first."""
        if first.target != self.source:
            raise IllDefined("composition type mismatch")
        return Homomorphism(first.source, self.target, self.matrix @ first.matrix)

    def equal_as_maps(self, other: Homomorphism) -> bool:
        if self.source != other.source or self.target != other.target:
            return False
        diff = self.matrix - other.matrix
        return all(self.target.contains_relation(diff.col(j)) for j in range(diff.cols))

    def kernel(self) -> FgAbGroup:
        num = preimage_lattice(self.matrix, self.target.relation_columns())
        return subquotient(num, self.source.relation_columns())

    def cokernel(self) -> FgAbGroup:
        rel = hstack(self.matrix, self.target.relation_columns())
        return group_of_presentation(self.target.n_gens, rel)

    def image(self) -> FgAbGroup:
        num = hstack(self.matrix, self.target.relation_columns())
        return subquotient(num, self.target.relation_columns())


def kernel(h: Homomorphism) -> FgAbGroup:
    return h.kernel()


def cokernel(h: Homomorphism) -> FgAbGroup:
    return h.cokernel()


def image(h: Homomorphism) -> FgAbGroup:
    return h.image()


def matrix_to_json(mat: IntMatrix) -> list[list[str]]:
    """Rows of decimal strings, the wire format for matrices."""
    return [[str(v) for v in row] for row in mat.entries]


def matrix_from_json(data: Sequence[Sequence[str | int]], cols: int | None = None) -> IntMatrix:
    return IntMatrix.from_rows([[int(v) for v in row] for row in data], cols=cols)
