"""Sparse exact linear algebra over the Gaussian rationals.

Vectors are plain ``dict[int, Scalar]`` with no stored zeros.  Elimination
is exact Gauss-Jordan with a fixed pivot rule (columns left to right, the
lowest-index remaining row with a nonzero entry), so kernel and image bases
are reproducible bit for bit.
"""

from __future__ import annotations

from typing import Dict, Iterable, List, Sequence, Tuple

from .scalars import ONE, Scalar, as_scalar

Vector = Dict[int, Scalar]

__all__ = [
    "Vector",
    "NotInSpan",
    "SparseMatrix",
    "rank",
    "kernel_basis",
    "image_basis",
    "solve_in_span",
    "SpanSolver",
    "vec_add",
    "vec_scale",
    "vec_sub",
]


class NotInSpan(ValueError):
    """Target vector lies outside the span of the given basis."""


def vec_add(u: Vector, v: Vector) -> Vector:
    out = dict(u)
    for k, x in v.items():
        y = out.get(k)
        if y is None:
            out[k] = x
        else:
            y = y + x
            if y:
                out[k] = y
            else:
                del out[k]
    return out


def vec_scale(c, v: Vector) -> Vector:
    c = as_scalar(c)
    if not c:
        return {}
    return {k: c * x for k, x in v.items()}


def vec_sub(u: Vector, v: Vector) -> Vector:
    return vec_add(u, vec_scale(-1, v))


class SparseMatrix:
    """Immutable ``rows x cols`` matrix stored as ``{(r, c): Scalar}``."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries=None):
        self.rows = rows
        self.cols = cols
        clean = {}
        for (r, c), x in (entries or {}).items():
            if not (0 <= r < rows and 0 <= c < cols):
                raise IndexError(f"entry ({r}, {c}) outside {rows}x{cols}")
            x = as_scalar(x)
            if x:
                clean[(r, c)] = x
        self.entries = clean

    @classmethod
    def identity(cls, n: int) -> "SparseMatrix":
        return cls(n, n, {(k, k): ONE for k in range(n)})

    @classmethod
    def from_columns(cls, columns: Sequence[Vector], rows: int) -> "SparseMatrix":
        ent = {}
        for c, col in enumerate(columns):
            for r, x in col.items():
                ent[(r, c)] = x
        return cls(rows, len(columns), ent)

    @classmethod
    def from_rows(cls, rows_: Sequence[Sequence], cols: int | None = None) -> "SparseMatrix":
        nrows = len(rows_)
        ncols = cols if cols is not None else (len(rows_[0]) if rows_ else 0)
        ent = {(r, c): x for r, row in enumerate(rows_) for c, x in enumerate(row)}
        return cls(nrows, ncols, ent)

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(self.cols, self.rows, {(c, r): x for (r, c), x in self.entries.items()})

    def row_dicts(self) -> List[Vector]:
        out: List[Vector] = [dict() for _ in range(self.rows)]
        for (r, c), x in self.entries.items():
            out[r][c] = x
        return out

    def column(self, c: int) -> Vector:
        return {r: x for (r, cc), x in self.entries.items() if cc == c}

    def columns(self) -> List[Vector]:
        out: List[Vector] = [dict() for _ in range(self.cols)]
        for (r, c), x in self.entries.items():
            out[c][r] = x
        return out

    def apply(self, v: Vector) -> Vector:
        out: Vector = {}
        for (r, c), x in self.entries.items():
            y = v.get(c)
            if y is not None:
                out[r] = out[r] + x * y if r in out else x * y
        return {k: x for k, x in out.items() if x}

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        by_row: Dict[int, List[Tuple[int, Scalar]]] = {}
        for (r, c), x in other.entries.items():
            by_row.setdefault(r, []).append((c, x))
        acc: Dict[Tuple[int, int], Scalar] = {}
        for (r, k), x in self.entries.items():
            for c, y in by_row.get(k, ()):
                key = (r, c)
                acc[key] = acc[key] + x * y if key in acc else x * y
        return SparseMatrix(self.rows, other.cols, acc)

    def __add__(self, other: "SparseMatrix") -> "SparseMatrix":
        self._same_shape(other)
        acc = dict(self.entries)
        for k, x in other.entries.items():
            acc[k] = acc[k] + x if k in acc else x
        return SparseMatrix(self.rows, self.cols, acc)

    def __sub__(self, other: "SparseMatrix") -> "SparseMatrix":
        return self + other.scale(-1)

    def scale(self, c) -> "SparseMatrix":
        c = as_scalar(c)
        return SparseMatrix(self.rows, self.cols, {k: c * x for k, x in self.entries.items()})

    def _same_shape(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")

    def __eq__(self, other):
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return (self.rows, self.cols) == (other.rows, other.cols) and self.entries == other.entries

    def is_zero(self) -> bool:
        return not self.entries

    def nnz(self) -> int:
        return len(self.entries)

    def __repr__(self):
        return f"SparseMatrix({self.rows}x{self.cols}, nnz={len(self.entries)})"


def _rref(rows: List[Vector], pivot_limit: int) -> Tuple[List[int], List[Vector], List[Vector]]:
    """Gauss-Jordan on row dicts, pivoting only on columns ``< pivot_limit``.

    Returns ``(pivot_cols, pivot_rows, rest_rows)`` where ``pivot_rows[k]``
    has a 1 in ``pivot_cols[k]`` and zeros in every other pivot column.
    """
    remaining = [dict(r) for r in rows if r]
    pivot_cols: List[int] = []
    pivot_rows: List[Vector] = []
    cols = sorted({c for r in remaining for c in r if c < pivot_limit})
    for c in cols:
        idx = None
        for k, r in enumerate(remaining):
            if c in r:
                idx = k
                break
        if idx is None:
            continue
        prow = remaining.pop(idx)
        inv = prow[c].inverse()
        if inv != ONE:
            prow = {k: x * inv for k, x in prow.items()}
        # eliminate c from remaining and from earlier pivot rows
        for group in (remaining, pivot_rows):
            for k, r in enumerate(group):
                f = r.get(c)
                if f is None:
                    continue
                for cc, x in prow.items():
                    y = r.get(cc)
                    y = -f * x if y is None else y - f * x
                    if y:
                        r[cc] = y
                    else:
                        r.pop(cc, None)
                group[k] = r
        remaining = [r for r in remaining if r]
        pivot_cols.append(c)
        pivot_rows.append(prow)
    return pivot_cols, pivot_rows, remaining


def rank(M: SparseMatrix) -> int:
    """Exact rank of ``M``."""
    rows = M.row_dicts() if M.rows <= M.cols else M.transpose().row_dicts()
    pc, _, _ = _rref(rows, max(M.rows, M.cols))
    return len(pc)


def kernel_basis(M: SparseMatrix) -> List[Vector]:
    """Basis of ``{v : M v = 0}``, one vector per free column, in column order."""
    pc, prows, _ = _rref(M.row_dicts(), M.cols)
    pivot_set = set(pc)
    basis: List[Vector] = []
    for f in range(M.cols):
        if f in pivot_set:
            continue
        v: Vector = {f: ONE}
        for c, row in zip(pc, prows):
            x = row.get(f)
            if x is not None:
                v[c] = -x
        basis.append(v)
    return basis


def image_basis(M: SparseMatrix) -> List[Vector]:
    """Pivot columns of ``M`` (a basis of its column space)."""
    pc, _, _ = _rref(M.row_dicts(), M.cols)
    cols = M.columns()
    return [cols[c] for c in pc]


class SpanSolver:
    """Reusable exact solver for ``sum_k c_k basis[k] = target``.

    The basis must be linearly independent; ``ValueError`` otherwise.
    """

    def __init__(self, basis: Sequence[Vector], dim: int | None = None):
        self.size = len(basis)
        n = dim if dim is not None else 1 + max((r for v in basis for r in v), default=-1)
        self.dim = n
        k = self.size
        rows: List[Vector] = [dict() for _ in range(n)]
        for c, v in enumerate(basis):
            for r, x in v.items():
                if r >= n:
                    raise IndexError("basis vector exceeds declared dimension")
                rows[r][c] = x
        for r in range(n):
            rows[r][k + r] = ONE
        pc, prows, rest = _rref(rows, k)
        if len(pc) != k:
            raise ValueError("basis vectors are linearly dependent")
        # transform rows: coefficient c_j = T_j . target; consistency rows must vanish
        self._coef = [(c, {col - k: x for col, x in row.items() if col >= k}) for c, row in zip(pc, prows)]
        self._check = [{col - k: x for col, x in row.items() if col >= k} for row in rest]

    def coordinates(self, target: Vector) -> List[Scalar]:
        for row in self._check:
            acc = None
            for r, x in row.items():
                y = target.get(r)
                if y is not None:
                    acc = x * y if acc is None else acc + x * y
            if acc:
                raise NotInSpan("target is not in the span of the basis")
        if any(r >= self.dim for r in target):
            raise NotInSpan("target has support outside the ambient dimension")
        out = [Scalar(0)] * self.size
        for c, row in self._coef:
            acc = Scalar(0)
            for r, x in row.items():
                y = target.get(r)
                if y is not None:
                    acc = acc + x * y
            out[c] = acc
        return out


def solve_in_span(basis: Sequence[Vector], target: Vector, dim: int | None = None) -> List[Scalar]:
    """Exact coefficients of ``target`` in ``basis``; raises :class:`NotInSpan`."""
    if dim is None:
        dim = 1 + max([r for v in basis for r in v] + [r for r in target], default=-1)
    return SpanSolver(basis, dim).coordinates(target)


def combine(basis: Sequence[Vector], coeffs: Iterable) -> Vector:
    out: Vector = {}
    for v, c in zip(basis, coeffs):
        if c:
            out = vec_add(out, vec_scale(c, v))
    return out
