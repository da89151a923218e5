"""Exact integer matrix kernels: Smith normal form, ranks, determinants.

Everything here works over arbitrary-precision Python integers; no floating
point is used anywhere.  The dense Smith routine tracks the unimodular
transforms, the sparse one only produces the diagonal (which is all that
homology and abelianization need).
"""

from __future__ import annotations

from dataclasses import dataclass


def identity_matrix(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def matrix_multiply(a: list[list[int]], b: list[list[int]]) -> list[list[int]]:
    if a and b and len(a[0]) != len(b):
        raise ValueError("shape mismatch")
    cols = len(b[0]) if b else 0
    out = []
    for row in a:
        acc = [0] * cols
        for k, v in enumerate(row):
            if v:
                brow = b[k]
                for j in range(cols):
                    if brow[j]:
                        acc[j] += v * brow[j]
        out.append(acc)
    return out


def bareiss_determinant(a: list[list[int]]) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = len(a)
    if n == 0:
        return 1
    if any(len(row) != n for row in a):
        raise ValueError("not square")
    m = [list(row) for row in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k]:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


@dataclass(frozen=True)
class SnfResult:
    """U * A * V = S with U, V unimodular and S diagonal, d_i | d_{i+1}."""

    left: tuple[tuple[int, ...], ...]
    diagonal_matrix: tuple[tuple[int, ...], ...]
    right: tuple[tuple[int, ...], ...]

    @property
    def diagonal(self) -> tuple[int, ...]:
        s = self.diagonal_matrix
        r = min(len(s), len(s[0]) if s else 0)
        return tuple(s[i][i] for i in range(r))

    @property
    def nonzero_diagonal(self) -> tuple[int, ...]:
        return tuple(d for d in self.diagonal if d)

    @property
    def rank(self) -> int:
        return len(self.nonzero_diagonal)

    def verify(self, a: list[list[int]]) -> None:
        """Recompute U*A*V and the structural invariants; raise on mismatch."""
        u = [list(r) for r in self.left]
        v = [list(r) for r in self.right]
        s = matrix_multiply(matrix_multiply(u, [list(r) for r in a]), v)
        if s != [list(r) for r in self.diagonal_matrix]:
            raise AssertionError("U*A*V != S")
        for i, row in enumerate(s):
            for j, entry in enumerate(row):
                if i != j and entry:
                    raise AssertionError("S not diagonal")
        diag = self.diagonal
        for d in diag:
            if d < 0:
                raise AssertionError("negative diagonal entry")
        for x, y in zip(diag, diag[1:]):
            if x == 0 and y != 0:
                raise AssertionError("zero before nonzero on diagonal")
            if x and y % x:
                raise AssertionError("divisibility chain broken")
        if abs(bareiss_determinant(u)) != 1 or abs(bareiss_determinant(v)) != 1:
            raise AssertionError("transform not unimodular")


def _pivot(a, t, m, n):
    best = None
    for i in range(t, m):
        row = a[i]
        for j in range(t, n):
            v = row[j]
            if v and (best is None or abs(v) < best[0]):
                best = (abs(v), i, j)
                if best[0] == 1:
                    return best[1], best[2]
    return (best[1], best[2]) if best else None


def smith_normal_form(a: list[list[int]]) -> SnfResult:
    """Smith normal form with transform tracking.

    Pivoting picks the smallest nonzero |entry|; whenever the pivot fails to
    divide a remaining entry, that row is folded in and the clearing restarts,
    which bounds coefficient growth and yields the divisibility chain
    directly.
    """
    m = len(a)
    n = len(a[0]) if m else 0
    if any(len(row) != n for row in a):
        raise ValueError("ragged matrix")
    s = [list(row) for row in a]
    u = identity_matrix(m)
    v = identity_matrix(n)
    t = 0
    while t < min(m, n):
        pos = _pivot(s, t, m, n)
        if pos is None:
            break
        i, j = pos
        if i != t:
            s[t], s[i] = s[i], s[t]
            u[t], u[i] = u[i], u[t]
        if j != t:
            for row in s:
                row[t], row[j] = row[j], row[t]
            for row in v:
                row[t], row[j] = row[j], row[t]
        while True:
            # clear the pivot column
            restart = False
            for i in range(t + 1, m):
                while s[i][t]:
                    q = s[i][t] // s[t][t]
                    if q:
                        si, st, ui, ut = s[i], s[t], u[i], u[t]
                        for k in range(n):
                            si[k] -= q * st[k]
                        for k in range(m):
                            ui[k] -= q * ut[k]
                    if s[i][t]:
                        # remainder is a strictly smaller pivot
                        s[t], s[i] = s[i], s[t]
                        u[t], u[i] = u[i], u[t]
            # clear the pivot row
            for j in range(t + 1, n):
                while s[t][j]:
                    q = s[t][j] // s[t][t]
                    if q:
                        for row in s:
                            row[j] -= q * row[t]
                        for row in v:
                            row[j] -= q * row[t]
                    if s[t][j]:
                        for row in s:
                            row[t], row[j] = row[j], row[t]
                        for row in v:
                            row[t], row[j] = row[j], row[t]
                        restart = True
                        break
                if restart:
                    break
            if restart:
                continue
            # force the pivot to divide the rest of the block
            culprit = None
            p = s[t][t]
            for i in range(t + 1, m):
                row = s[i]
                for j in range(t + 1, n):
                    if row[j] % p:
                        culprit = i
                        break
                if culprit is not None:
                    break
            if culprit is None:
                break
            si, st, ui, ut = s[culprit], s[t], u[culprit], u[t]
            for k in range(n):
                st[k] += si[k]
            for k in range(m):
                ut[k] += ui[k]
        if s[t][t] < 0:
            for k in range(n):
                s[t][k] = -s[t][k]
            for k in range(m):
                u[t][k] = -u[t][k]
        t += 1
    return SnfResult(
        left=tuple(tuple(r) for r in u),
        diagonal_matrix=tuple(tuple(r) for r in s),
        right=tuple(tuple(r) for r in v),
    )


def _dense_diagonal(rows: list[list[int]]) -> list[int]:
    m = len(rows)
    n = len(rows[0]) if m else 0
    s = [list(r) for r in rows]
    diag = []
    t = 0
    while t < min(m, n):
        pos = _pivot(s, t, m, n)
        if pos is None:
            break
        i, j = pos
        if i != t:
            s[t], s[i] = s[i], s[t]
        if j != t:
            for row in s:
                row[t], row[j] = row[j], row[t]
        while True:
            restart = False
            for i in range(t + 1, m):
                while s[i][t]:
                    q = s[i][t] // s[t][t]
                    if q:
                        si, st = s[i], s[t]
                        for k in range(t, n):
                            si[k] -= q * st[k]
                    if s[i][t]:
                        s[t], s[i] = s[i], s[t]
            for j in range(t + 1, n):
                while s[t][j]:
                    q = s[t][j] // s[t][t]
                    if q:
                        for row in s:
                            row[j] -= q * row[t]
                    if s[t][j]:
                        for row in s:
                            row[t], row[j] = row[j], row[t]
                        restart = True
                        break
                if restart:
                    break
            if restart:
                continue
            culprit = None
            p = s[t][t]
            for i in range(t + 1, m):
                row = s[i]
                for j in range(t + 1, n):
                    if row[j] % p:
                        culprit = i
                        break
                if culprit is not None:
                    break
            if culprit is None:
                break
            si, st = s[culprit], s[t]
            for k in range(t, n):
                st[k] += si[k]
        diag.append(abs(s[t][t]))
        t += 1
    return diag


def sparse_diagonal(entries: dict[tuple[int, int], int], nrows: int, ncols: int) -> list[int]:
    """Nonzero Smith diagonal of a sparse matrix, without transforms.

    Phase one eliminates with +-1 pivots (cheap, no coefficient growth),
    choosing pivots of minimal fill-in; whatever survives is handed to the
    dense routine.  Boundary matrices are almost entirely unit-pivotable, so
    the dense residual stays tiny.
    """
    rows: dict[int, dict[int, int]] = {}
    cols: dict[int, set[int]] = {}
    for (r, c), val in entries.items():
        if not val:
            continue
        if not 0 <= r < nrows or not 0 <= c < ncols:
            raise ValueError("entry out of range")
        rows.setdefault(r, {})[c] = val
        cols.setdefault(c, set()).add(r)
    units = 0
    while True:
        best = None
        for r in rows:
            row = rows[r]
            rlen = len(row)
            for c, val in row.items():
                if val in (1, -1):
                    fill = (rlen - 1) * (len(cols[c]) - 1)
                    key = (fill, r, c)
                    if best is None or key < best:
                        best = key
            if best is not None and best[0] == 0:
                break
        if best is None:
            break
        _, pr, pc = best
        pval = rows[pr][pc]
        prow = dict(rows[pr])
        for r in list(cols[pc]):
            if r == pr:
                continue
            factor = rows[r][pc] * pval  # pval in {1,-1} so this is v/pval
            row = rows[r]
            for c, val in prow.items():
                newv = row.get(c, 0) - factor * val
                if newv:
                    row[c] = newv
                    cols[c].add(r)
                else:
                    row.pop(c, None)
                    cols[c].discard(r)
            if not row:
                del rows[r]
        for c in prow:
            cols[c].discard(pr)
            if not cols[c]:
                del cols[c]
        del rows[pr]
        units += 1
    diag = [1] * units
    if rows:
        live_rows = sorted(rows)
        live_cols = sorted({c for row in rows.values() for c in row})
        cindex = {c: j for j, c in enumerate(live_cols)}
        dense = [[0] * len(live_cols) for _ in live_rows]
        for i, r in enumerate(live_rows):
            for c, val in rows[r].items():
                dense[i][cindex[c]] = val
        diag.extend(_dense_diagonal(dense))
    return diag


def rank_mod2(rows: list[int]) -> int:
    """Rank over GF(2) of rows given as bitmask integers."""
    basis: list[int] = []
    for row in rows:
        for b in basis:
            low = b & -b
            if row & low:
                row ^= b
        if row:
            basis.append(row)
    return len(basis)


def rank_mod_p(rows: list[list[int]], p: int) -> int:
    """Rank over GF(p) by plain Gaussian elimination."""
    if p == 2:
        masks = []
        for row in rows:
            m = 0
            for j, v in enumerate(row):
                if v % 2:
                    m |= 1 << j
            masks.append(m)
        return rank_mod2(masks)
    work = [[v % p for v in row] for row in rows]
    rank = 0
    ncols = len(work[0]) if work else 0
    pivot_row = 0
    for col in range(ncols):
        sel = None
        for r in range(pivot_row, len(work)):
            if work[r][col]:
                sel = r
                break
        if sel is None:
            continue
        work[pivot_row], work[sel] = work[sel], work[pivot_row]
        inv = pow(work[pivot_row][col], p - 2, p)
        work[pivot_row] = [(v * inv) % p for v in work[pivot_row]]
        prow = work[pivot_row]
        for r in range(len(work)):
            if r != pivot_row and work[r][col]:
                f = work[r][col]
                work[r] = [(a - f * b) % p for a, b in zip(work[r], prow)]
        pivot_row += 1
        rank += 1
        if pivot_row == len(work):
            break
    return rank
