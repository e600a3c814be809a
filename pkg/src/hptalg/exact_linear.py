"""Exact sparse linear algebra over the integers, the rationals and prime fields.

Everything here is pure Python on arbitrary-precision integers (and
``fractions.Fraction`` for the rationals), so results are exact and
reproducible bit for bit.

>>> Z = CoefficientRing.integers()
>>> A = ExactMatrix.from_dense(Z, [[2, 4], [6, 8]])
>>> smith_normal_form(A).divisors
[2, 4]
>>> subquotient_homology(ExactMatrix.from_dense(Z, [[2]]), ExactMatrix.zeros(Z, 0, 1))
HomologyGroup(free_rank=0, torsion=(2,), reliable=True)
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence, Union

Scalar = Union[int, Fraction]


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    k = 3
    while k * k <= p:
        if p % k == 0:
            return False
        k += 2
    return True


@dataclass(frozen=True)
class CoefficientRing:
    """Ground ring: ``integers``, ``rationals`` or ``prime-field`` with modulus ``p``."""

    kind: str
    p: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("integers", "rationals", "prime-field"):
            raise ValueError(f"unknown ring kind {self.kind!r}")
        if self.kind == "prime-field":
            if self.p is None or not _is_prime(self.p):
                raise ValueError(f"prime field modulus must be prime, got {self.p}")
        elif self.p is not None:
            raise ValueError("modulus only allowed for prime fields")

    @classmethod
    def integers(cls) -> "CoefficientRing":
        return cls("integers")

    @classmethod
    def rationals(cls) -> "CoefficientRing":
        return cls("rationals")

    @classmethod
    def prime_field(cls, p: int) -> "CoefficientRing":
        return cls("prime-field", p)

    @classmethod
    def parse(cls, text: str) -> "CoefficientRing":
        """Parse the command-line spelling ``z``, ``q`` or ``zp:<p>``."""
        t = text.strip().lower()
        if t == "z":
            return cls.integers()
        if t == "q":
            return cls.rationals()
        if t.startswith("zp:"):
            return cls.prime_field(int(t[3:]))
        raise ValueError(f"unknown ring {text!r}; expected z, q or zp:<p>")

    def spelling(self) -> str:
        if self.kind == "integers":
            return "z"
        if self.kind == "rationals":
            return "q"
        return f"zp:{self.p}"

    @property
    def is_field(self) -> bool:
        return self.kind != "integers"

    def coerce(self, x: object) -> Scalar:
        """Bring ``x`` into canonical form for this ring."""
        if isinstance(x, str):
            x = Fraction(x)
        if self.kind == "integers":
            if isinstance(x, Fraction):
                if x.denominator != 1:
                    raise ValueError(f"{x} is not an integer")
                return int(x.numerator)
            return int(x)  # type: ignore[arg-type]
        if self.kind == "rationals":
            f = Fraction(x)  # type: ignore[arg-type]
            return int(f) if f.denominator == 1 else f
        assert self.p is not None
        if isinstance(x, Fraction):
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        return int(x) % self.p  # type: ignore[call-overload]

    def reduce(self, x: Scalar) -> Scalar:
        """Cheap normalisation after ring arithmetic done with Python operators."""
        if self.kind == "prime-field":
            return x % self.p  # type: ignore[operator]
        if self.kind == "rationals" and isinstance(x, Fraction) and x.denominator == 1:
            return int(x)
        return x

    def inverse(self, x: Scalar) -> Scalar:
        if self.kind == "integers":
            if x in (1, -1):
                return x
            raise ZeroDivisionError(f"{x} is not a unit in the integers")
        if self.kind == "rationals":
            return self.reduce(Fraction(1) / x)
        return pow(int(x), -1, self.p)

    def negate(self, x: Scalar) -> Scalar:
        return self.reduce(-x)

    def to_json(self, x: Scalar) -> int | str:
        if isinstance(x, Fraction):
            return f"{x.numerator}/{x.denominator}"
        return int(x)


# --------------------------------------------------------------------------
# sparse matrices


class ExactMatrix:
    """Immutable sparse matrix stored row-major as ``{row: {col: value}}``.

    No stored entry is zero, and iteration is always in row-major order.
    """

    __slots__ = ("ring", "rows", "cols", "_data", "_cols_cache")

    def __init__(self, ring: CoefficientRing, rows: int, cols: int,
                 data: dict[int, dict[int, Scalar]] | None = None) -> None:
        if rows < 0 or cols < 0:
            raise ValueError("matrix dimensions must be nonnegative")
        self.ring = ring
        self.rows = rows
        self.cols = cols
        self._data: dict[int, dict[int, Scalar]] = {}
        self._cols_cache: dict[int, dict[int, Scalar]] | None = None
        if data:
            for r, row in data.items():
                clean = {c: v for c, v in row.items() if v != 0}
                if clean:
                    self._data[r] = clean

    # construction -------------------------------------------------------
    @classmethod
    def zeros(cls, ring: CoefficientRing, rows: int, cols: int) -> "ExactMatrix":
        return cls(ring, rows, cols)

    @classmethod
    def identity(cls, ring: CoefficientRing, n: int) -> "ExactMatrix":
        return cls(ring, n, n, {i: {i: 1} for i in range(n)})

    @classmethod
    def from_dense(cls, ring: CoefficientRing, rows: Sequence[Sequence[object]],
                   ncols: int | None = None) -> "ExactMatrix":
        nrows = len(rows)
        if ncols is None:
            ncols = len(rows[0]) if nrows else 0
        data: dict[int, dict[int, Scalar]] = {}
        for i, row in enumerate(rows):
            if len(row) != ncols:
                raise ValueError("ragged dense matrix")
            d = {}
            for j, v in enumerate(row):
                x = ring.coerce(v)
                if x != 0:
                    d[j] = x
            if d:
                data[i] = d
        return cls(ring, nrows, ncols, data)

    @classmethod
    def from_entries(cls, ring: CoefficientRing, rows: int, cols: int,
                     entries: Iterable[tuple[int, int, object]]) -> "ExactMatrix":
        """Build from ``(row, col, value)`` triplets; duplicates are summed."""
        data: dict[int, dict[int, Scalar]] = {}
        for r, c, v in entries:
            if not (0 <= r < rows and 0 <= c < cols):
                raise ValueError(f"entry ({r}, {c}) outside a {rows}x{cols} matrix")
            x = ring.coerce(v)
            row = data.setdefault(r, {})
            row[c] = ring.reduce(row.get(c, 0) + x)
        return cls(ring, rows, cols, data)

    @classmethod
    def from_columns(cls, ring: CoefficientRing, rows: int,
                     columns: Sequence[dict[int, Scalar]]) -> "ExactMatrix":
        data: dict[int, dict[int, Scalar]] = {}
        for j, col in enumerate(columns):
            for i, v in col.items():
                if v != 0:
                    data.setdefault(i, {})[j] = v
        return cls(ring, rows, len(columns), data)

    # access ---------------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def entries(self) -> list[tuple[int, int, Scalar]]:
        out = []
        for r in sorted(self._data):
            row = self._data[r]
            for c in sorted(row):
                out.append((r, c, row[c]))
        return out

    def nnz(self) -> int:
        return sum(len(r) for r in self._data.values())

    def get(self, r: int, c: int) -> Scalar:
        return self._data.get(r, {}).get(c, 0)

    def row(self, r: int) -> dict[int, Scalar]:
        return self._data.get(r, {})

    def column(self, c: int) -> dict[int, Scalar]:
        if self._cols_cache is None:
            cache: dict[int, dict[int, Scalar]] = {}
            for r in sorted(self._data):
                for cc, v in self._data[r].items():
                    cache.setdefault(cc, {})[r] = v
            self._cols_cache = cache
        return self._cols_cache.get(c, {})

    def to_dense(self) -> list[list[Scalar]]:
        out: list[list[Scalar]] = [[0] * self.cols for _ in range(self.rows)]
        for r, row in self._data.items():
            for c, v in row.items():
                out[r][c] = v
        return out

    def is_zero(self) -> bool:
        return not self._data

    # arithmetic -----------------------------------------------------------
    def _check_ring(self, other: "ExactMatrix") -> None:
        if self.ring != other.ring:
            raise ValueError("ring mismatch")

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check_ring(other)
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        red = self.ring.reduce
        odata = other._data
        data: dict[int, dict[int, Scalar]] = {}
        for r, row in self._data.items():
            acc: dict[int, Scalar] = {}
            for k, a in row.items():
                orow = odata.get(k)
                if orow is None:
                    continue
                for c, b in orow.items():
                    acc[c] = acc.get(c, 0) + a * b
            clean = {}
            for c, v in acc.items():
                v = red(v)
                if v != 0:
                    clean[c] = v
            if clean:
                data[r] = clean
        return ExactMatrix(self.ring, self.rows, other.cols, data)

    def _combine(self, other: "ExactMatrix", sign: int) -> "ExactMatrix":
        self._check_ring(other)
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        red = self.ring.reduce
        data = {r: dict(row) for r, row in self._data.items()}
        for r, row in other._data.items():
            target = data.setdefault(r, {})
            for c, v in row.items():
                target[c] = red(target.get(c, 0) + sign * v)
        return ExactMatrix(self.ring, self.rows, self.cols, data)

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        return self._combine(other, 1)

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        return self._combine(other, -1)

    def __neg__(self) -> "ExactMatrix":
        return self.scale(-1)

    def scale(self, c: object) -> "ExactMatrix":
        c = self.ring.coerce(c)
        if c == 0:
            return ExactMatrix(self.ring, self.rows, self.cols)
        red = self.ring.reduce
        return ExactMatrix(self.ring, self.rows, self.cols,
                           {r: {k: red(v * c) for k, v in row.items()} for r, row in self._data.items()})

    def transpose(self) -> "ExactMatrix":
        data: dict[int, dict[int, Scalar]] = {}
        for r, row in self._data.items():
            for c, v in row.items():
                data.setdefault(c, {})[r] = v
        return ExactMatrix(self.ring, self.cols, self.rows, data)

    def apply(self, vec: dict[int, Scalar]) -> dict[int, Scalar]:
        """Multiply by a sparse column vector ``{index: value}``."""
        red = self.ring.reduce
        acc: dict[int, Scalar] = {}
        for j, x in vec.items():
            for i, a in self.column(j).items():
                acc[i] = acc.get(i, 0) + a * x
        out = {}
        for i, v in acc.items():
            v = red(v)
            if v != 0:
                out[i] = v
        return out

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "ExactMatrix":
        rmap = {r: i for i, r in enumerate(rows)}
        cmap = {c: j for j, c in enumerate(cols)}
        data: dict[int, dict[int, Scalar]] = {}
        for r, row in self._data.items():
            if r not in rmap:
                continue
            d = {cmap[c]: v for c, v in row.items() if c in cmap}
            if d:
                data[rmap[r]] = d
        return ExactMatrix(self.ring, len(rows), len(cols), data)

    @staticmethod
    def block(ring: CoefficientRing, grid: Sequence[Sequence["ExactMatrix"]]) -> "ExactMatrix":
        """Assemble a block matrix; every block in a row shares its row count."""
        data: dict[int, dict[int, Scalar]] = {}
        r0 = 0
        total_cols = sum(b.cols for b in grid[0]) if grid else 0
        for brow in grid:
            c0 = 0
            height = brow[0].rows if brow else 0
            for b in brow:
                if b.rows != height:
                    raise ValueError("block heights disagree")
                for r, row in b._data.items():
                    target = data.setdefault(r0 + r, {})
                    for c, v in row.items():
                        target[c0 + c] = v
                c0 += b.cols
            if c0 != total_cols:
                raise ValueError("block widths disagree")
            r0 += height
        return ExactMatrix(ring, r0, total_cols, data)

    # comparison -----------------------------------------------------------
    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return (self.ring == other.ring and self.shape == other.shape
                and self._data == other._data)

    def __hash__(self) -> int:
        return hash((self.ring, self.rows, self.cols, tuple(self.entries())))

    def __repr__(self) -> str:
        return f"ExactMatrix({self.rows}x{self.cols}, nnz={self.nnz()}, ring={self.ring.spelling()})"


# --------------------------------------------------------------------------
# Smith normal form


@dataclass(frozen=True)
class SmithForm:
    """``D = U A V`` with ``U``, ``V`` invertible over the ring and ``D`` diagonal."""

    U: ExactMatrix
    D: ExactMatrix
    V: ExactMatrix
    divisors: list[Scalar]

    @property
    def rank(self) -> int:
        return len(self.divisors)


def _swap_rows(m: list[list[Scalar]], i: int, j: int) -> None:
    m[i], m[j] = m[j], m[i]


def _swap_cols(m: list[list[Scalar]], i: int, j: int) -> None:
    for row in m:
        row[i], row[j] = row[j], row[i]


def _smith_dense(ring: CoefficientRing, a: list[list[Scalar]], nrows: int, ncols: int
                 ) -> tuple[list[list[Scalar]], list[list[Scalar]], list[list[Scalar]], list[Scalar]]:
    red = ring.reduce
    D = [list(r) for r in a]
    U: list[list[Scalar]] = [[1 if i == j else 0 for j in range(nrows)] for i in range(nrows)]
    # V is kept transposed so column operations become row operations
    Vt: list[list[Scalar]] = [[1 if i == j else 0 for j in range(ncols)] for i in range(ncols)]
    field_mode = ring.is_field
    divisors: list[Scalar] = []

    def row_add(dst: int, src: int, q: Scalar) -> None:
        # row_dst -= q * row_src on D and U
        rd, rs = D[dst], D[src]
        for j in range(ncols):
            if rs[j]:
                rd[j] = red(rd[j] - q * rs[j])
        ud, us = U[dst], U[src]
        for j in range(nrows):
            if us[j]:
                ud[j] = red(ud[j] - q * us[j])

    def col_add(dst: int, src: int, q: Scalar) -> None:
        for row in D:
            if row[src]:
                row[dst] = red(row[dst] - q * row[src])
        vd, vs = Vt[dst], Vt[src]
        for j in range(ncols):
            if vs[j]:
                vd[j] = red(vd[j] - q * vs[j])

    def key(v: Scalar) -> Scalar:
        return abs(v) if not field_mode else (0 if v else 1)

    t = 0
    while t < min(nrows, ncols):
        best = None
        for i in range(t, nrows):
            row = D[i]
            for j in range(t, ncols):
                v = row[j]
                if v != 0 and (best is None or key(v) < best[0]):
                    best = (key(v), i, j)
                    if field_mode or abs(v) == 1:
                        break
            if best is not None and (field_mode or best[0] == 1):
                break
        if best is None:
            break
        _, bi, bj = best
        if bi != t:
            _swap_rows(D, bi, t)
            _swap_rows(U, bi, t)
        if bj != t:
            _swap_cols(D, bj, t)
            Vt[bj], Vt[t] = Vt[t], Vt[bj]
        while True:
            piv = D[t][t]
            if field_mode:
                inv = ring.inverse(piv)
                if inv != 1:
                    D[t] = [red(x * inv) for x in D[t]]
                    U[t] = [red(x * inv) for x in U[t]]
                for i in range(t + 1, nrows):
                    if D[i][t]:
                        row_add(i, t, D[i][t])
                for j in range(t + 1, ncols):
                    if D[t][j]:
                        col_add(j, t, D[t][j])
                break
            dirty = False
            for i in range(t + 1, nrows):
                if D[i][t]:
                    row_add(i, t, D[i][t] // piv)
                    if D[i][t]:
                        dirty = True
            for j in range(t + 1, ncols):
                if D[t][j]:
                    col_add(j, t, D[t][j] // piv)
                    if D[t][j]:
                        dirty = True
            if dirty:
                # bring the smallest remainder in row/column t to the pivot
                cand = None
                for i in range(t + 1, nrows):
                    v = D[i][t]
                    if v and (cand is None or abs(v) < cand[0]):
                        cand = (abs(v), "r", i)
                for j in range(t + 1, ncols):
                    v = D[t][j]
                    if v and (cand is None or abs(v) < cand[0]):
                        cand = (abs(v), "c", j)
                assert cand is not None
                if cand[1] == "r":
                    _swap_rows(D, cand[2], t)
                    _swap_rows(U, cand[2], t)
                else:
                    _swap_cols(D, cand[2], t)
                    Vt[cand[2]], Vt[t] = Vt[t], Vt[cand[2]]
                continue
            # divisibility: the pivot must divide the rest of the matrix
            bad = None
            for i in range(t + 1, nrows):
                row = D[i]
                for j in range(t + 1, ncols):
                    if row[j] % piv:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            row_add(t, bad, -1)
        if not field_mode and D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
        divisors.append(D[t][t])
        t += 1
    V = [[Vt[j][i] for j in range(ncols)] for i in range(ncols)]
    return U, D, V, divisors


def smith_normal_form(A: ExactMatrix) -> SmithForm:
    """Smith normal form ``D = U A V`` with a divisibility chain of divisors.

    Over a field the divisors are all 1 and the result is a rank decomposition.
    Pivots are chosen with minimal absolute value to limit coefficient growth.
    """
    ring = A.ring
    U, D, V, divisors = _smith_dense(ring, A.to_dense(), A.rows, A.cols)
    return SmithForm(ExactMatrix.from_dense(ring, U, A.rows),
                     ExactMatrix.from_dense(ring, D, A.cols),
                     ExactMatrix.from_dense(ring, V, A.cols),
                     divisors)


# --------------------------------------------------------------------------
# echelon forms, rank, kernels, solving


def _echelon_field(ring: CoefficientRing, rows: list[list[Scalar]], ncols: int
                   ) -> tuple[list[list[Scalar]], list[int]]:
    """Reduced row echelon form over a field; returns (nonzero rows, pivot columns)."""
    red = ring.reduce
    m = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = ring.inverse(m[r][c])
        m[r] = [red(x * inv) for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [red(x - f * y) for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def hermite_rows(vectors: list[list[int]], ncols: int) -> list[list[int]]:
    """Row-style Hermite normal form of an integer lattice basis (canonical)."""
    m = [list(v) for v in vectors if any(v)]
    r = 0
    for c in range(ncols):
        while True:
            nz = [i for i in range(r, len(m)) if m[i][c] != 0]
            if not nz:
                break
            p = min(nz, key=lambda i: abs(m[i][c]))
            m[r], m[p] = m[p], m[r]
            done = True
            for i in range(r + 1, len(m)):
                if m[i][c]:
                    q = m[i][c] // m[r][c]
                    m[i] = [x - q * y for x, y in zip(m[i], m[r])]
                    if m[i][c]:
                        done = False
            if done:
                break
        if r < len(m) and m[r][c] != 0:
            if m[r][c] < 0:
                m[r] = [-x for x in m[r]]
            for i in range(r):
                q = m[i][c] // m[r][c]
                if q:
                    m[i] = [x - q * y for x, y in zip(m[i], m[r])]
            r += 1
        if r == len(m):
            break
    return [row for row in m if any(row)]


def rank(A: ExactMatrix) -> int:
    """Rank over the fraction field (equivalently over the field itself)."""
    if A.is_zero():
        return 0
    if A.ring.kind == "prime-field":
        return len(_echelon_field(A.ring, A.to_dense(), A.cols)[1])
    # fraction-free elimination over the integers / rationals
    m = A.to_dense()
    if A.ring.kind == "rationals":
        m = [[Fraction(x) for x in row] for row in m]
    r = 0
    ncols = A.cols
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        pv = m[r][c]
        for i in range(r + 1, len(m)):
            f = m[i][c]
            if f != 0:
                m[i] = [pv * x - f * y for x, y in zip(m[i], m[r])]
                if A.ring.kind == "integers":
                    g = 0
                    for x in m[i]:
                        if x:
                            g = _gcd(g, x)
                    if g > 1:
                        m[i] = [x // g for x in m[i]]
        r += 1
        if r == len(m):
            break
    return r


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def kernel_basis(A: ExactMatrix) -> list[dict[int, Scalar]]:
    """A basis of ``ker A`` as sparse column vectors, in a canonical echelon form.

    Over the integers the vectors form a basis of the kernel lattice.
    """
    ring = A.ring
    n = A.cols
    if ring.is_field:
        rows, pivots = _echelon_field(ring, A.to_dense(), n)
        free = [c for c in range(n) if c not in set(pivots)]
        basis = []
        for f in free:
            v: dict[int, Scalar] = {f: 1}
            for row, pc in zip(rows, pivots):
                if row[f] != 0:
                    v[pc] = ring.reduce(-row[f])
            basis.append(v)
        # canonical: reduced echelon of the basis itself
        dense = [[v.get(i, 0) for i in range(n)] for v in basis]
        rows2, _ = _echelon_field(ring, dense, n)
        return [{i: x for i, x in enumerate(r) if x != 0} for r in rows2]
    snf = smith_normal_form(A)
    V = snf.V.to_dense()
    vecs = [[V[i][j] for i in range(n)] for j in range(snf.rank, n)]
    return [{i: x for i, x in enumerate(r) if x != 0} for r in hermite_rows(vecs, n)]


def solve(A: ExactMatrix, b: dict[int, Scalar]) -> dict[int, Scalar] | None:
    """Return some ``x`` with ``A x = b`` over the ring, or ``None`` if none exists."""
    ring = A.ring
    snf = smith_normal_form(A)
    ub = snf.U.apply(b)
    y: dict[int, Scalar] = {}
    for i, v in ub.items():
        if i >= snf.rank:
            return None
        d = snf.divisors[i]
        if ring.is_field:
            y[i] = ring.reduce(v * ring.inverse(d))
        else:
            if v % d:
                return None
            y[i] = v // d
    return snf.V.apply(y)


def inverse(A: ExactMatrix) -> ExactMatrix:
    """Inverse of a square matrix that is invertible over its ring."""
    if A.rows != A.cols:
        raise ValueError("inverse of a non-square matrix")
    snf = smith_normal_form(A)
    if snf.rank != A.rows or any(abs(d) != 1 for d in snf.divisors if not A.ring.is_field):
        raise ValueError("matrix is not invertible over its ring")
    ring = A.ring
    dinv = ExactMatrix(ring, A.rows, A.rows,
                       {i: {i: ring.inverse(d)} for i, d in enumerate(snf.divisors)})
    return snf.V @ dinv @ snf.U


def determinant(A: ExactMatrix) -> Scalar:
    if A.rows != A.cols:
        raise ValueError("determinant of a non-square matrix")
    ring = A.ring
    m = [[Fraction(x) for x in row] for row in A.to_dense()] if ring.kind != "prime-field" else A.to_dense()
    n = A.rows
    det: Scalar = 1
    for c in range(n):
        p = next((i for i in range(c, n) if m[i][c] != 0), None)
        if p is None:
            return 0
        if p != c:
            m[c], m[p] = m[p], m[c]
            det = -det
        pv = m[c][c]
        det = det * pv
        inv = ring.inverse(pv) if ring.kind == "prime-field" else 1 / pv
        for i in range(c + 1, n):
            f = m[i][c]
            if f != 0:
                m[i] = [ring.reduce(x - f * inv * y) if ring.kind == "prime-field" else x - f * inv * y
                        for x, y in zip(m[i], m[c])]
    return ring.coerce(ring.reduce(det) if ring.kind == "prime-field" else det)


# --------------------------------------------------------------------------
# homology of a subquotient


@dataclass(frozen=True)
class HomologyGroup:
    """``free_rank`` plus a torsion divisibility chain (empty over fields)."""

    free_rank: int
    torsion: tuple[int, ...] = ()
    reliable: bool = True

    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def describe(self, ring: CoefficientRing | None = None) -> str:
        base = "Z" if ring is None or ring.kind == "integers" else (
            "Q" if ring.kind == "rationals" else f"F{ring.p}")
        parts = []
        if self.free_rank == 1:
            parts.append(base)
        elif self.free_rank > 1:
            parts.append(f"{base}^{self.free_rank}")
        parts.extend(f"Z/{t}" for t in self.torsion)
        return " + ".join(parts) if parts else "0"


class CompositionError(ValueError):
    """Raised when consecutive differentials do not compose to zero."""


def subquotient_homology(d_in: ExactMatrix, d_out: ExactMatrix) -> HomologyGroup:
    """Homology ``ker(d_out) / im(d_in)`` at the middle term of ``. -d_in-> X -d_out-> .``."""
    if d_out.cols != d_in.rows:
        raise CompositionError(
            f"composability: d_out has {d_out.cols} columns but d_in has {d_in.rows} rows")
    if not (d_out @ d_in).is_zero():
        raise CompositionError("d^2 != 0: d_out * d_in is nonzero")
    n = d_in.rows
    ring = d_in.ring
    kernel_dim = n - rank(d_out)
    if ring.is_field:
        return HomologyGroup(kernel_dim - rank(d_in))
    if d_in.is_zero():
        return HomologyGroup(kernel_dim)
    divisors = smith_normal_form(d_in).divisors
    torsion = tuple(int(d) for d in divisors if d != 1)
    return HomologyGroup(kernel_dim - len(divisors), torsion)


def iter_nonzero(vec: dict[int, Scalar]) -> Iterator[tuple[int, Scalar]]:
    for k in sorted(vec):
        if vec[k] != 0:
            yield k, vec[k]
