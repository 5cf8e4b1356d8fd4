"""Linear algebra over GF(2) with row-operation logs.

Matrices are stored as lists of Python ints used as bitmasks: bit ``j`` of
``rows[i]`` is the entry in row ``i``, column ``j``.  This keeps row addition
a single xor and makes replaying elimination steps on other objects (CNOT
emission, diagram row sums) a matter of iterating the recorded
:class:`RowOp` list.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence


@dataclass(frozen=True)
class RowOp:
    """A single elementary row operation.

    ``kind`` is ``"swap"`` (exchange rows ``a`` and ``b``) or ``"add"``
    (xor row ``a`` into row ``b``, leaving row ``a`` unchanged).
    """

    kind: str
    a: int
    b: int

    def __post_init__(self) -> None:
        if self.kind not in ("swap", "add"):
            raise ValueError(f"unknown row operation kind: {self.kind!r}")


class Gf2Matrix:
    """A dense matrix over GF(2) backed by int bitmasks.

    Parameters
    ----------
    rows:
        Iterable of int bitmasks, bit ``j`` holding column ``j``.
    ncols:
        Number of columns; must cover every set bit.
    """

    def __init__(self, rows: Iterable[int], ncols: int):
        self.rows = list(rows)
        self.ncols = ncols
        mask = (1 << ncols) - 1
        for r in self.rows:
            if r & ~mask:
                raise ValueError("row has bits outside the declared columns")

    @classmethod
    def from_lists(cls, entries: Sequence[Sequence[int]], ncols: int | None = None) -> "Gf2Matrix":
        """Build a matrix from nested 0/1 lists (row major)."""
        if ncols is None:
            ncols = len(entries[0]) if entries else 0
        rows = []
        for entry in entries:
            if len(entry) != ncols:
                raise ValueError("ragged rows")
            acc = 0
            for j, v in enumerate(entry):
                if v & 1:
                    acc |= 1 << j
            rows.append(acc)
        return cls(rows, ncols)

    def to_lists(self) -> list[list[int]]:
        """Return the matrix as nested 0/1 lists."""
        return [[(r >> j) & 1 for j in range(self.ncols)] for r in self.rows]

    @property
    def nrows(self) -> int:
        return len(self.rows)

    def copy(self) -> "Gf2Matrix":
        return Gf2Matrix(list(self.rows), self.ncols)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Gf2Matrix):
            return NotImplemented
        return self.rows == other.rows and self.ncols == other.ncols

    def __repr__(self) -> str:
        body = ", ".join(format(r, f"0{max(self.ncols, 1)}b")[::-1] for r in self.rows)
        return f"Gf2Matrix([{body}], ncols={self.ncols})"

    def apply_op(self, op: RowOp) -> None:
        """Apply one row operation in place."""
        if op.kind == "swap":
            self.rows[op.a], self.rows[op.b] = self.rows[op.b], self.rows[op.a]
        else:
            self.rows[op.b] ^= self.rows[op.a]

    def apply_ops(self, ops: Iterable[RowOp]) -> None:
        """Replay a sequence of row operations in place."""
        for op in ops:
            self.apply_op(op)

    def rref_with_ops(self) -> list[RowOp]:
        """Reduce to reduced row echelon form in place, returning the op log.

        Pivots are chosen left to right; within a column the topmost
        unplaced row wins.  Elimination is full (Gauss-Jordan): every other
        row with a 1 in the pivot column is cleared, so replaying the log on
        a copy of the original matrix reproduces the reduced form exactly.
        """
        ops: list[RowOp] = []
        pivot_row = 0
        for col in range(self.ncols):
            bit = 1 << col
            src = None
            for i in range(pivot_row, self.nrows):
                if self.rows[i] & bit:
                    src = i
                    break
            if src is None:
                continue
            if src != pivot_row:
                op = RowOp("swap", src, pivot_row)
                self.apply_op(op)
                ops.append(op)
            for i in range(self.nrows):
                if i != pivot_row and self.rows[i] & bit:
                    op = RowOp("add", pivot_row, i)
                    self.apply_op(op)
                    ops.append(op)
            pivot_row += 1
            if pivot_row == self.nrows:
                break
        return ops

    def rank(self) -> int:
        """Return the rank over GF(2)."""
        work = self.copy()
        work.rref_with_ops()
        return sum(1 for r in work.rows if r)

    def zero_rows(self) -> list[int]:
        """Return the indices of all-zero rows."""
        return [i for i, r in enumerate(self.rows) if r == 0]

    def unit_rows(self) -> list[tuple[int, int]]:
        """Return ``(row, column)`` pairs for rows with exactly one 1."""
        out = []
        for i, r in enumerate(self.rows):
            if r != 0 and r & (r - 1) == 0:
                out.append((i, r.bit_length() - 1))
        return out


def solve_many(mat: Gf2Matrix, rhs: Sequence[int]) -> list[int | None]:
    """Solve ``mat @ x = b`` over GF(2) for several right-hand sides at once.

    Each entry of ``rhs`` is an int bitmask over *row* indices.  The result
    holds, per right-hand side, one solution as a bitmask over *column*
    indices, or ``None`` when the system is inconsistent.  Free variables
    are set to 0.
    """
    n, m = mat.nrows, mat.ncols
    k = len(rhs)
    aug = Gf2Matrix(
        [mat.rows[i] | sum(((b >> i) & 1) << (m + t) for t, b in enumerate(rhs)) for i in range(n)],
        m + k,
    )
    # RREF restricted to the original columns: pivots never enter the
    # augmented block, which keeps the right-hand sides readable.
    pivot_row = 0
    pivot_cols: list[int] = []
    for col in range(m):
        bit = 1 << col
        src = None
        for i in range(pivot_row, n):
            if aug.rows[i] & bit:
                src = i
                break
        if src is None:
            continue
        if src != pivot_row:
            aug.apply_op(RowOp("swap", src, pivot_row))
        for i in range(n):
            if i != pivot_row and aug.rows[i] & bit:
                aug.apply_op(RowOp("add", pivot_row, i))
        pivot_cols.append(col)
        pivot_row += 1
        if pivot_row == n:
            break
    col_mask = (1 << m) - 1
    out: list[int | None] = []
    for t in range(k):
        tbit = 1 << (m + t)
        consistent = all(not (aug.rows[i] & tbit) for i in range(pivot_row, n))
        if not consistent:
            out.append(None)
            continue
        x = 0
        for r, col in enumerate(pivot_cols):
            if aug.rows[r] & tbit:
                x |= 1 << col
        assert x & ~col_mask == 0
        out.append(x)
    return out
