"""Smith normal form and the integer linear algebra built on it.

Matrices are two-dimensional numpy arrays.  Exact work uses ``dtype=object``
so that entries are Python integers and never overflow.  Work modulo an
integer ``e`` is done in ``int64`` whenever ``e`` is small enough that no
intermediate product can exceed 63 bits, and falls back to Python integers
otherwise.

Pivoting rule: the nonzero entry of smallest absolute value in the active
block, ties broken by the lowest (row, column) index.  Modulo ``e`` the
absolute value of the symmetric representative is used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConsistencyError

_FLOAT_EXACT = 2**53
_INT64_SAFE = 2**62


def as_int_matrix(data, rows=None, cols=None):
    """Coerce nested sequences or arrays into an exact integer matrix.

    ``rows``/``cols`` are only needed to give empty input a shape.
    """
    if isinstance(data, np.ndarray) and data.ndim == 2 and data.dtype == object:
        out = data.copy()
    elif isinstance(data, np.ndarray) and data.ndim == 2 and data.dtype.kind in "iu":
        out = data.astype(object)
    else:
        arr = np.array(data, dtype=object)
        if arr.size == 0:
            r = rows if rows is not None else (arr.shape[0] if arr.ndim >= 1 else 0)
            c = cols if cols is not None else (arr.shape[1] if arr.ndim == 2 else 0)
            return zeros(r, c)
        if arr.ndim != 2:
            raise ValueError(f"expected a 2-d matrix, got shape {arr.shape}")
        out = np.empty(arr.shape, dtype=object)
        for idx, v in np.ndenumerate(arr):
            if isinstance(v, (bool, np.bool_)) or not isinstance(v, (int, np.integer)):
                raise TypeError(f"matrix entries must be integers, got {v!r}")
            out[idx] = int(v)
    if rows is not None and out.shape[0] != rows:
        raise ValueError(f"expected {rows} rows, got {out.shape[0]}")
    if cols is not None and out.shape[1] != cols:
        raise ValueError(f"expected {cols} columns, got {out.shape[1]}")
    return out


def identity(n):
    return np.eye(n, dtype=np.int64).astype(object)


def zeros(r, c):
    return np.zeros((r, c), dtype=np.int64).astype(object)


def _to_object(A):
    if A.dtype == object:
        return A
    return A.astype(object)


def _max_abs(A):
    if A.size == 0:
        return 0
    return int(np.abs(A).max())


def matmul(A, B, modulus=None):
    """Exact product ``A @ B``, reduced modulo ``modulus`` when given.

    Uses floating-point BLAS only when every partial sum is provably below
    2**53, so the result is exact.
    """
    n = A.shape[1]
    if A.shape[0] == 0 or B.shape[1] == 0 or n == 0:
        return zeros(A.shape[0], B.shape[1])
    if modulus is not None:
        A = A % modulus
        B = B % modulus
        bound = (modulus - 1) ** 2 * n
    else:
        bound = _max_abs(A) * _max_abs(B) * n
    if bound < _FLOAT_EXACT:
        prod = np.rint(A.astype(np.float64) @ B.astype(np.float64)).astype(np.int64)
        out = prod.astype(object)
    elif bound < _INT64_SAFE:
        out = (A.astype(np.int64) @ B.astype(np.int64)).astype(object)
    else:
        out = _to_object(A).dot(_to_object(B))
    if modulus is not None:
        out = out % modulus
    return out


@dataclass
class _Reduction:
    """Raw output of the elimination loop."""

    diagonal: list
    rank: int
    A: np.ndarray
    U: np.ndarray | None = None
    Uinv: np.ndarray | None = None
    V: np.ndarray | None = None
    modulus: int | None = None


def _work_dtype(modulus, size):
    if modulus is not None and modulus * modulus * (size + 2) < _INT64_SAFE:
        return np.int64
    return object


def _eye(n, dtype):
    E = np.eye(n, dtype=np.int64)
    return E if dtype is np.int64 else E.astype(object)


def _reduce(A, e):
    if e is not None:
        A %= e
    return A


def _magnitude(values, e):
    if e is None:
        return np.abs(values)
    return np.minimum(values, e - values) * (values != 0)


def _scalar_magnitude(v, e):
    v = int(v)
    return abs(v) if e is None else min(v, e - v)


def _find_pivot(block, e):
    if block.size == 0:
        return None
    # Magnitude 1 is the global minimum; look in the leading column before scanning the block.
    minus_one = -1 if e is None else e - 1
    lead = block[:, 0]
    hit = (lead == 1) | (lead == minus_one)
    if hit.any():
        return int(np.argmax(hit)), 0
    unit = (block == 1) | (block == minus_one)
    if unit.any():
        return divmod(int(np.argmax(unit)), block.shape[1])
    mag = _magnitude(block, e)
    nz = mag != 0
    if not nz.any():
        return None
    big = (int(mag.max()) if e is None else e) + 1
    masked = np.where(nz, mag, big)
    flat = int(np.argmin(masked))
    return divmod(flat, block.shape[1])


def snf_reduce(A, modulus=None, track_u=False, track_uinv=False, track_v=False):
    """Diagonalize ``A`` by unimodular row and column operations.

    With ``modulus`` set, all arithmetic is in Z/modulus and the invertibility
    of ``U`` and ``V`` is only modulo ``modulus``.  Returns a ``_Reduction``
    whose ``diagonal`` lists the raw pivots; modulo ``e`` the invariant factor
    of pivot ``p`` is ``gcd(p, e)``.
    """
    e = modulus
    A = as_int_matrix(A) if not isinstance(A, np.ndarray) else A
    r, c = A.shape
    dtype = _work_dtype(e, max(r, c))
    W = np.array(A, dtype=object)
    if e is not None:
        W = W % e
    W = W.astype(dtype) if dtype is np.int64 else W.copy()
    U = _eye(r, dtype) if track_u else None
    Ui = _eye(r, dtype) if track_uinv else None
    V = _eye(c, dtype) if track_v else None

    def swap_rows(i, j):
        if i == j:
            return
        W[[i, j]] = W[[j, i]]
        if U is not None:
            U[[i, j]] = U[[j, i]]
        if Ui is not None:
            Ui[:, [i, j]] = Ui[:, [j, i]]

    def swap_cols(i, j):
        if i == j:
            return
        W[:, [i, j]] = W[:, [j, i]]
        if V is not None:
            V[:, [i, j]] = V[:, [j, i]]

    def negate_row(t):
        W[t] = -W[t]
        _reduce(W[t], e)
        if U is not None:
            U[t] = -U[t]
            _reduce(U[t], e)
        if Ui is not None:
            Ui[:, t] = -Ui[:, t]
            _reduce(Ui[:, t], e)

    def quotients(vals, p):
        # In Z/e a unit pivot clears everything in one pass.
        if e is not None and math.gcd(int(p), e) == 1:
            return (vals * pow(int(p), -1, e)) % e
        return vals // p

    diagonal = []
    t = 0
    while t < min(r, c):
        loc = _find_pivot(W[t:, t:], e)
        if loc is None:
            break
        swap_rows(t, t + loc[0])
        swap_cols(t, t + loc[1])
        while True:
            p = W[t, t]
            if (e is None and p < 0) or (e is not None and e - p < p):
                negate_row(t)
                p = W[t, t]
            col = W[t + 1 :, t]
            idx = np.nonzero(col)[0]
            if idx.size:
                q = quotients(col[idx], p)
                rows = idx + t + 1
                W[rows, t:] -= np.multiply.outer(q, W[t, t:])
                if e is not None:
                    W[rows, t:] %= e
                if U is not None:
                    U[rows] -= np.multiply.outer(q, U[t])
                    if e is not None:
                        U[rows] %= e
                if Ui is not None:
                    Ui[:, t] += Ui[:, rows].dot(q)
                    if e is not None:
                        Ui[:, t] %= e
            row = W[t, t + 1 :]
            jdx = np.nonzero(row)[0]
            if jdx.size:
                q = quotients(row[jdx], p)
                cols = jdx + t + 1
                W[t:, cols] -= np.multiply.outer(W[t:, t], q)
                if e is not None:
                    W[t:, cols] %= e
                if V is not None:
                    V[:, cols] -= np.multiply.outer(V[:, t], q)
                    if e is not None:
                        V[:, cols] %= e
            col_left = np.nonzero(W[t + 1 :, t])[0]
            row_left = np.nonzero(W[t, t + 1 :])[0]
            if col_left.size or row_left.size:
                cands = []
                for j in row_left:
                    cands.append((_scalar_magnitude(W[t, t + 1 + j], e), t, t + 1 + j))
                for i in col_left:
                    cands.append((_scalar_magnitude(W[t + 1 + i, t], e), t + 1 + i, t))
                _, i, j = min(cands)
                if j == t:
                    swap_rows(t, i)
                else:
                    swap_cols(t, j)
                continue
            if p != 1 and (e is None or math.gcd(int(p), e) != 1):
                sub = W[t + 1 :, t + 1 :]
                bad = np.nonzero((sub % p).any(axis=1))[0]
                if bad.size:
                    i = t + 1 + int(bad[0])
                    W[t] += W[i]
                    if e is not None:
                        W[t] %= e
                    if U is not None:
                        U[t] += U[i]
                        if e is not None:
                            U[t] %= e
                    if Ui is not None:
                        Ui[:, i] -= Ui[:, t]
                        if e is not None:
                            Ui[:, i] %= e
                    continue
            break
        diagonal.append(int(W[t, t]))
        t += 1

    return _Reduction(
        diagonal=diagonal,
        rank=len(diagonal),
        A=_to_object(W),
        U=None if U is None else _to_object(U),
        Uinv=None if Ui is None else _to_object(Ui),
        V=None if V is None else _to_object(V),
        modulus=e,
    )


@dataclass(frozen=True)
class SmithDecomposition:
    """``U @ source @ V == S`` with ``U``, ``V`` unimodular and ``S`` in Smith form."""

    U: np.ndarray
    S: np.ndarray
    V: np.ndarray
    source: np.ndarray = field(repr=False)

    def diagonal(self):
        k = min(self.S.shape)
        return [int(self.S[i, i]) for i in range(k)]

    def invariant_factors(self):
        """Invariant factors of the cokernel Z^rows / colspan(source)."""
        r = self.S.shape[0]
        diag = self.diagonal() + [0] * (r - min(self.S.shape))
        return [d for d in diag if d != 1]

    def verify(self):
        """Check every invariant; raise ``ConsistencyError`` on the first failure."""
        if not np.array_equal(matmul(matmul(self.U, self.source), self.V), self.S):
            raise ConsistencyError("U @ A @ V != S")
        for name, M in (("U", self.U), ("V", self.V)):
            if abs(integer_determinant(M)) != 1:
                raise ConsistencyError(f"{name} is not unimodular")
        S = self.S
        off = S.copy()
        for i in range(min(S.shape)):
            off[i, i] = 0
        if off.any():
            raise ConsistencyError("S is not diagonal")
        diag = self.diagonal()
        if any(d < 0 for d in diag):
            raise ConsistencyError("negative diagonal entry")
        nonzero = [d for d in diag if d]
        if nonzero != diag[: len(nonzero)]:
            raise ConsistencyError("zero diagonal entry precedes a nonzero one")
        for a, b in zip(nonzero, nonzero[1:]):
            if b % a:
                raise ConsistencyError(f"divisibility chain broken: {a} does not divide {b}")
        return True


def smith_normal_form(A):
    """Exact Smith normal form of an integer matrix.

    >>> smith_normal_form([[2, 0], [0, 3]]).diagonal()
    [1, 6]
    """
    src = as_int_matrix(A)
    red = snf_reduce(src, track_u=True, track_v=True)
    return SmithDecomposition(U=red.U, S=red.A, V=red.V, source=src)


def integer_determinant(M):
    """Determinant by fraction-free (Bareiss) elimination."""
    n = M.shape[0]
    if M.shape != (n, n):
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return 1
    A = [[int(x) for x in row] for row in M]
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for i in range(k + 1, n):
                if A[i][k]:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = A[k][k]
        for i in range(k + 1, n):
            aik = A[i][k]
            rowi, rowk = A[i], A[k]
            for j in range(k + 1, n):
                rowi[j] = (rowi[j] * akk - aik * rowk[j]) // prev
        prev = akk
    return sign * A[n - 1][n - 1]


def kernel_basis(A):
    """Basis of the integer kernel of ``A`` as the columns of a matrix."""
    A = as_int_matrix(A)
    red = snf_reduce(A, track_v=True)
    return red.V[:, red.rank :]


def kernel_mod(A, modulus):
    """Kernel of ``A`` acting on (Z/modulus)^cols.

    Returns ``(gens, orders)``: the kernel is the internal direct sum of the
    cyclic subgroups generated by the columns of ``gens``, of the given orders.
    """
    e = modulus
    A = as_int_matrix(A) % e
    r, c = A.shape
    if e == 1:
        return zeros(c, 0), []
    nz = np.nonzero(A.any(axis=0))[0]
    gens, orders = [], []
    if nz.size:
        red = snf_reduce(A[:, nz], e, track_v=True)
        V = red.V
        for i, p in enumerate(red.diagonal):
            g = math.gcd(p, e)
            if g > 1:
                v = zeros(c, 1)[:, 0]
                v[nz] = (V[:, i] * (e // g)) % e
                gens.append(v)
                orders.append(g)
        for i in range(red.rank, nz.size):
            v = zeros(c, 1)[:, 0]
            v[nz] = V[:, i]
            gens.append(v)
            orders.append(e)
    zero_cols = np.setdiff1d(np.arange(c), nz)
    for j in zero_cols:
        v = zeros(c, 1)[:, 0]
        v[j] = 1
        gens.append(v)
        orders.append(e)
    if not gens:
        return zeros(c, 0), []
    return np.stack(gens, axis=1), orders


def solve(A, b, modulus=None):
    """Some ``x`` with ``A @ x == b`` (modulo ``modulus`` if given), or ``None``."""
    A = as_int_matrix(A)
    r, c = A.shape
    b = np.array([int(v) for v in b], dtype=object)
    e = modulus
    if e is not None:
        A = A % e
        b = b % e
        if e == 1:
            return zeros(c, 1)[:, 0]
        nz = np.nonzero(A.any(axis=0))[0]
    else:
        nz = np.arange(c)
    x = zeros(c, 1)[:, 0]
    if nz.size == 0:
        return x if not (b % e if e else b).any() else None
    red = snf_reduce(A[:, nz], e, track_u=True, track_v=True)
    rhs = red.U.dot(b)
    if e is not None:
        rhs = rhs % e
    u = zeros(nz.size, 1)[:, 0]
    for i, p in enumerate(red.diagonal):
        ci = int(rhs[i])
        if e is None:
            if ci % p:
                return None
            u[i] = ci // p
        else:
            g = math.gcd(p, e)
            if ci % g:
                return None
            eg = e // g
            u[i] = ((ci // g) * pow(p // g, -1, eg)) % eg if eg > 1 else 0
    if any(int(v) for v in rhs[red.rank :]):
        return None
    sol = red.V.dot(u)
    if e is not None:
        sol = sol % e
    x[nz] = sol
    return x
