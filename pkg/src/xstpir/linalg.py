"""Vectors and matrices over GF(q), and the Cauchy-Vandermonde decoding matrices.

A decoding matrix row for server n reads

    [ 1/(f_1 - a_n), ..., 1/(f_L - a_n), 1, a_n, a_n^2, ..., a_n^(width-L-1) ]

with the f's and a's drawn from one pool of pairwise distinct field elements.
Every width-row square submatrix of such a matrix is invertible, which is what
makes both plain and error-tolerant decoding work.

Gaussian elimination uses first-nonzero pivoting; arithmetic is exact, so
pivot magnitude is irrelevant.
"""

from __future__ import annotations

from dataclasses import dataclass

from .field import PrimeField


class SingularMatrixError(ValueError):
    """Square matrix has no inverse."""


class FieldMatrix:
    """Dense rows x cols matrix of residues sharing one PrimeField."""

    __slots__ = ("field", "rows", "cols", "data")

    def __init__(self, field: PrimeField, data):
        rows = [[v % field.q for v in row] for row in data]
        if not rows or not rows[0]:
            raise ValueError("matrix must be non-empty")
        cols = len(rows[0])
        if any(len(r) != cols for r in rows):
            raise ValueError("ragged rows")
        self.field = field
        self.rows = len(rows)
        self.cols = cols
        self.data = rows

    @classmethod
    def identity(cls, field: PrimeField, n: int) -> "FieldMatrix":
        return cls(field, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, field: PrimeField, rows: int, cols: int) -> "FieldMatrix":
        return cls(field, [[0] * cols for _ in range(rows)])

    def copy(self) -> "FieldMatrix":
        return FieldMatrix(self.field, [row[:] for row in self.data])

    def __eq__(self, other):
        return (
            isinstance(other, FieldMatrix)
            and other.field == self.field
            and other.data == self.data
        )

    def __repr__(self):
        return f"FieldMatrix(GF({self.field.q}), {self.rows}x{self.cols})"

    def _check_same_field(self, other: "FieldMatrix"):
        if other.field != self.field:
            raise ValueError("matrices live in different fields")

    def add(self, other: "FieldMatrix") -> "FieldMatrix":
        self._check_same_field(other)
        if (other.rows, other.cols) != (self.rows, self.cols):
            raise ValueError("shape mismatch")
        q = self.field.q
        return FieldMatrix(
            self.field,
            [
                [(a + b) % q for a, b in zip(ra, rb)]
                for ra, rb in zip(self.data, other.data)
            ],
        )

    def sub(self, other: "FieldMatrix") -> "FieldMatrix":
        self._check_same_field(other)
        if (other.rows, other.cols) != (self.rows, self.cols):
            raise ValueError("shape mismatch")
        q = self.field.q
        return FieldMatrix(
            self.field,
            [
                [(a - b) % q for a, b in zip(ra, rb)]
                for ra, rb in zip(self.data, other.data)
            ],
        )

    def scale(self, c: int) -> "FieldMatrix":
        q = self.field.q
        c %= q
        return FieldMatrix(self.field, [[(c * v) % q for v in row] for row in self.data])

    def mul(self, other: "FieldMatrix") -> "FieldMatrix":
        self._check_same_field(other)
        if self.cols != other.rows:
            raise ValueError("inner dimensions differ")
        q = self.field.q
        bt = list(zip(*other.data))  # columns of other
        out = [
            [sum(a * b for a, b in zip(row, col)) % q for col in bt]
            for row in self.data
        ]
        return FieldMatrix(self.field, out)

    def matvec(self, vec: list[int]) -> list[int]:
        if len(vec) != self.cols:
            raise ValueError("vector length mismatch")
        q = self.field.q
        return [sum(a * b for a, b in zip(row, vec)) % q for row in self.data]

    def solve(self, rhs: list[int]) -> list[int]:
        """Solve m @ x = rhs exactly; raises SingularMatrixError if singular."""
        if self.rows != self.cols:
            raise ValueError("solve requires a square matrix")
        if len(rhs) != self.rows:
            raise ValueError("rhs length mismatch")
        q = self.field.q
        n = self.rows
        a = [row[:] + [rhs[i] % q] for i, row in enumerate(self.data)]
        for col in range(n):
            piv = next((r for r in range(col, n) if a[r][col] % q), None)
            if piv is None:
                raise SingularMatrixError("singular system")
            if piv != col:
                a[col], a[piv] = a[piv], a[col]
            inv_p = pow(a[col][col], q - 2, q)
            a[col] = [(v * inv_p) % q for v in a[col]]
            for r in range(n):
                if r != col and a[r][col]:
                    f = a[r][col]
                    a[r] = [(vr - f * vc) % q for vr, vc in zip(a[r], a[col])]
        return [a[i][n] for i in range(n)]

    def inverse(self) -> "FieldMatrix":
        """Gauss-Jordan inverse; raises SingularMatrixError if singular."""
        if self.rows != self.cols:
            raise ValueError("inverse requires a square matrix")
        q = self.field.q
        n = self.rows
        a = [row[:] + [1 if i == j else 0 for j in range(n)] for i, row in enumerate(self.data)]
        for col in range(n):
            piv = next((r for r in range(col, n) if a[r][col] % q), None)
            if piv is None:
                raise SingularMatrixError("singular matrix")
            if piv != col:
                a[col], a[piv] = a[piv], a[col]
            inv_p = pow(a[col][col], q - 2, q)
            a[col] = [(v * inv_p) % q for v in a[col]]
            for r in range(n):
                if r != col and a[r][col]:
                    f = a[r][col]
                    a[r] = [(vr - f * vc) % q for vr, vc in zip(a[r], a[col])]
        return FieldMatrix(self.field, [row[n:] for row in a])

    def det(self) -> int:
        """Determinant by elimination (exact)."""
        if self.rows != self.cols:
            raise ValueError("det requires a square matrix")
        q = self.field.q
        n = self.rows
        a = [row[:] for row in self.data]
        det = 1
        for col in range(n):
            piv = next((r for r in range(col, n) if a[r][col] % q), None)
            if piv is None:
                return 0
            if piv != col:
                a[col], a[piv] = a[piv], a[col]
                det = (-det) % q
            det = (det * a[col][col]) % q
            inv_p = pow(a[col][col], q - 2, q)
            for r in range(col + 1, n):
                if a[r][col]:
                    f = (a[r][col] * inv_p) % q
                    a[r] = [(vr - f * vc) % q for vr, vc in zip(a[r], a[col])]
        return det

    def row_submatrix(self, row_indices) -> "FieldMatrix":
        return FieldMatrix(self.field, [self.data[i] for i in row_indices])

    def to_lists(self) -> list[list[int]]:
        """Nested lists of decimal residues (the JSON form)."""
        return [row[:] for row in self.data]


@dataclass(frozen=True)
class EvaluationPoints:
    """The L + N pairwise distinct constants: f_1..f_L and alpha_1..alpha_N."""

    field: PrimeField
    f: tuple[int, ...]
    alpha: tuple[int, ...]

    def __post_init__(self):
        q = self.field.q
        object.__setattr__(self, "f", tuple(v % q for v in self.f))
        object.__setattr__(self, "alpha", tuple(v % q for v in self.alpha))
        pts = self.f + self.alpha
        if len(set(pts)) != len(pts):
            raise ValueError("evaluation points must be pairwise distinct")

    @classmethod
    def default(cls, field: PrimeField, layers: int, num_servers: int) -> "EvaluationPoints":
        """f_l = l and alpha_n = L + n; when q == L + N the last alpha wraps to 0."""
        if field.q < layers + num_servers:
            raise ValueError(
                f"field size {field.q} < L + N = {layers + num_servers}"
            )
        f = tuple(range(1, layers + 1))
        alpha = tuple((layers + n) % field.q for n in range(1, num_servers + 1))
        return cls(field, f, alpha)

    def diff(self, l: int, server: int) -> int:
        """f_l - alpha_n for 1-based layer l and server n."""
        return (self.f[l - 1] - self.alpha[server - 1]) % self.field.q


@dataclass(frozen=True)
class DecodingMatrix:
    """Cauchy-Vandermonde decoding matrix, one row per contributing server.

    ``width`` counts total columns: the first L are Cauchy terms, the remaining
    width - L are the shared Vandermonde span 1, a_n, ..., a_n^(width-L-1).
    Rectangular (rows > width) instances are the robust form whose extra rows
    buy error correction.
    """

    points: EvaluationPoints
    row_servers: tuple[int, ...]
    cauchy_cols: int
    width: int
    entries: tuple[tuple[int, ...], ...]

    @property
    def rows(self) -> int:
        return len(self.row_servers)

    @property
    def field(self) -> PrimeField:
        return self.points.field

    def matrix(self) -> FieldMatrix:
        return FieldMatrix(self.points.field, [list(r) for r in self.entries])

    def to_lists(self) -> list[list[int]]:
        return [list(r) for r in self.entries]


def build_decoding_matrix(
    points: EvaluationPoints,
    row_servers,
    cauchy_cols: int,
    width: int,
) -> DecodingMatrix:
    """Build the rows x width decoding matrix for the given servers.

    Requires 1 <= cauchy_cols <= rows - 1 (the guaranteed-invertibility
    domain) and cauchy_cols <= width <= rows.
    """
    servers = tuple(row_servers)
    rows = len(servers)
    field = points.field
    q = field.q
    if cauchy_cols != len(points.f):
        raise ValueError("cauchy_cols must match the number of f points")
    if not 1 <= cauchy_cols <= rows - 1:
        raise ValueError(f"need 1 <= L <= rows-1, got L={cauchy_cols}, rows={rows}")
    if not cauchy_cols <= width <= rows:
        raise ValueError(f"need L <= width <= rows, got width={width}")
    if any(not 1 <= n <= len(points.alpha) for n in servers):
        raise ValueError("server index out of range")
    ent = []
    for n in servers:
        a_n = points.alpha[n - 1]
        row = [pow((fl - a_n) % q, q - 2, q) for fl in points.f]
        v = 1
        for _ in range(width - cauchy_cols):
            row.append(v)
            v = (v * a_n) % q
        ent.append(tuple(row))
    return DecodingMatrix(points, servers, cauchy_cols, width, tuple(ent))
