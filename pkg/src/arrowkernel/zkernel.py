"""Exact integer left nullspaces.

left_kernel computes {x : x A = 0} as a lattice, not just a vector space:
the returned basis is saturated (any integer vector in the rational span is
an integer combination of basis vectors) and Hermite-reduced with positive
pivots, so a given matrix always yields the same basis and the same CSV.

Two engines sit behind the one entry point.  Matrices with few rows go
through pure-integer unimodular elimination, which is saturated by
construction.  Wide tables go through one mod-p LU to locate pivots, Dixon
lifting with rational reconstruction to recover exact kernel vectors, and a
Hermite saturation pass; every vector is then re-verified against every
column in exact arithmetic, so an unlucky prime or column subsample can
only cost a retry, never a wrong answer.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .diagrams import MirrorReport
from .relators import _atomic_write


class DimensionError(ValueError):
    """Raised when a vector's length does not match the ambient space."""


@dataclass(frozen=True)
class IntMatrix:
    """Sparse-by-column integer matrix with exact (arbitrary size) entries.

    columns holds, per column, a tuple of (row, coefficient) pairs with
    strictly increasing rows and nonzero coefficients.
    """

    m: int
    columns: Tuple[Tuple[Tuple[int, int], ...], ...]

    def __post_init__(self) -> None:
        for col in self.columns:
            last = -1
            for row, coef in col:
                if not 0 <= row < self.m:
                    raise IndexError(f"row {row} outside 0..{self.m - 1}")
                if row <= last or coef == 0:
                    raise ValueError("columns must be sorted with nonzero entries")
                last = row

    @property
    def n(self) -> int:
        return len(self.columns)

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence[int]]) -> "IntMatrix":
        m = len(rows)
        n = len(rows[0]) if m else 0
        cols = []
        for j in range(n):
            cols.append(tuple((i, rows[i][j]) for i in range(m) if rows[i][j]))
        return cls(m, tuple(cols))

    @classmethod
    def from_entry_dicts(
        cls, m: int, dicts: Iterable[Dict[int, int]]
    ) -> "IntMatrix":
        cols = []
        for d in dicts:
            cols.append(tuple(sorted((i, c) for i, c in d.items() if c)))
        return cls(m, tuple(cols))

    def dense(self) -> List[List[int]]:
        out = [[0] * self.n for _ in range(self.m)]
        for j, col in enumerate(self.columns):
            for i, v in col:
                out[i][j] = v
        return out


@dataclass(frozen=True)
class KernelBasis:
    """Hermite-reduced basis of a saturated kernel lattice in Z^length."""

    length: int
    vectors: Tuple[Tuple[int, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.vectors)


def _hnf_rows(width: int, rows: Iterable[Sequence[int]]) -> List[List[int]]:
    """Row-style Hermite form: positive pivots, entries above reduced.

    Zero and dependent input rows are dropped; output rows are sorted by
    pivot column, which makes the form canonical for the spanned lattice.
    """
    work = [list(r) for r in rows if any(r)]
    r = 0
    for c in range(width):
        if r == len(work):
            break
        while True:
            nz = [i for i in range(r, len(work)) if work[i][c]]
            if not nz:
                break
            i0 = min(nz, key=lambda i: abs(work[i][c]))
            work[r], work[i0] = work[i0], work[r]
            if work[r][c] < 0:
                work[r] = [-v for v in work[r]]
            pv = work[r][c]
            done = True
            for i in range(r + 1, len(work)):
                if work[i][c]:
                    q = work[i][c] // pv
                    if q:
                        work[i] = [a - q * b for a, b in zip(work[i], work[r])]
                    if work[i][c]:
                        done = False
            if done:
                if work[r][c]:
                    pv = work[r][c]
                    for i in range(r):
                        q = work[i][c] // pv
                        if q:
                            work[i] = [
                                a - q * b for a, b in zip(work[i], work[r])
                            ]
                    r += 1
                break
    return work[:r]


def _canonical_basis(length: int, vectors: Iterable[Sequence[int]]) -> KernelBasis:
    hnf = _hnf_rows(length, vectors)
    return KernelBasis(length, tuple(tuple(row) for row in hnf))


def _annihilates(vector: Sequence[int], column: Tuple[Tuple[int, int], ...]) -> bool:
    return sum(vector[i] * c for i, c in column) == 0


def _verify_kernel(vectors: Sequence[Sequence[int]], A: IntMatrix) -> bool:
    return all(_annihilates(v, col) for col in A.columns for v in vectors)


# ---------------------------------------------------------------------------
# small engine: unimodular row reduction with a tracked transform


_SMALL_ROWS = 300


def _kernel_elimination(A: IntMatrix) -> List[List[int]]:
    m, n = A.m, A.n
    rows = [[0] * n for _ in range(m)]
    for j, col in enumerate(A.columns):
        for i, v in col:
            rows[i][j] = v
    U = [[1 if k == i else 0 for k in range(m)] for i in range(m)]
    r = 0
    for c in range(n):
        if r == m:
            break
        while True:
            nz = [i for i in range(r, m) if rows[i][c]]
            if not nz:
                break
            i0 = min(nz, key=lambda i: abs(rows[i][c]))
            rows[r], rows[i0] = rows[i0], rows[r]
            U[r], U[i0] = U[i0], U[r]
            pv = rows[r][c]
            done = True
            for i in range(r + 1, m):
                if rows[i][c]:
                    q = rows[i][c] // pv
                    rows[i] = [a - q * b for a, b in zip(rows[i], rows[r])]
                    U[i] = [a - q * b for a, b in zip(U[i], U[r])]
                    if rows[i][c]:
                        done = False
            if done:
                r += 1
                break
    # U is unimodular, so the rows mapped onto zero rows of A span the full
    # integer kernel; no separate saturation step is needed.
    return U[r:]


# ---------------------------------------------------------------------------
# large engine: mod-p LU, Dixon lifting, saturation, exact verification


# all below 2**20 so panel products stay exact in float64 blocks
_PRIMES = (1048573, 1048571, 1048559, 1048549, 1048517, 1048507)
_PANEL = 256
_CHUNK_ROWS = 2048
_MAX_INNER = 4096
_SUBSAMPLE_PAD = 512
_SUBSAMPLE_SEED = 0x5EED
_AUGMENT_ROUNDS = 6
_DENSE_CELLS = 400_000_000  # int64 working-set cap, ~3.2 GB


def _lu_mod_p(X: np.ndarray, p: int) -> Tuple[np.ndarray, List[int]]:
    """In-place blocked LU of X (k x m) mod p with partial row pivoting.

    Returns (perm, piv_cols) where perm[t] is the original row now at
    position t and piv_cols lists pivot columns in elimination order.
    Multipliers land below each pivot; U sits on and above the pivot rows.
    """
    k, m = X.shape
    perm = np.arange(k)
    piv_cols: List[int] = []
    r = 0
    c0 = 0
    while c0 < m and r < k:
        c1 = min(c0 + _PANEL, m)
        panel: List[int] = []
        for c in range(c0, c1):
            rr = r + len(panel)
            if rr == k:
                break
            X[rr:, c] %= p
            nz = np.nonzero(X[rr:, c])[0]
            if nz.size == 0:
                continue
            pr = rr + int(nz[0])
            if pr != rr:
                X[[rr, pr]] = X[[pr, rr]]
                perm[[rr, pr]] = perm[[pr, rr]]
            inv = pow(int(X[rr, c]), p - 2, p)
            mult = X[rr + 1:, c] * inv % p
            X[rr + 1:, c] = mult
            if c + 1 < c1:
                X[rr + 1:, c + 1:c1] = (
                    X[rr + 1:, c + 1:c1] - mult[:, None] * X[rr, c + 1:c1]
                ) % p
            panel.append(c)
        pb = len(panel)
        if pb and c1 < m:
            pidx = np.array(panel)
            # push the panel's row operations across the trailing columns:
            # first the pivot rows themselves (unit lower solve), ...
            X[r, c1:] %= p
            for t in range(1, pb):
                f = X[r + t, pidx[:t]]
                X[r + t, c1:] = (X[r + t, c1:] - f @ X[r:r + t, c1:]) % p
            # ... then everything below via exact float64 block products
            if r + pb < k:
                L21 = X[r + pb:, pidx].astype(np.float64)
                Ub = X[r:r + pb, c1:].astype(np.float64)
                for a in range(r + pb, k, _CHUNK_ROWS):
                    b = min(a + _CHUNK_ROWS, k)
                    prod = L21[a - r - pb:b - r - pb] @ Ub
                    X[a:b, c1:] = (X[a:b, c1:] - prod.astype(np.int64)) % p
        piv_cols.extend(panel)
        r += pb
        c0 = c1
    return perm, piv_cols


class _LUSolver:
    """Mod-p triangular solves against a factored matrix, batched by RHS."""

    def __init__(self, X: np.ndarray, piv_cols: Sequence[int], p: int):
        self.X = X
        self.p = p
        self.jarr = np.array(piv_cols, dtype=np.intp)
        self.r = len(piv_cols)
        self.dinv = np.array(
            [pow(int(X[t, piv_cols[t]]) % p, p - 2, p) for t in range(self.r)],
            dtype=np.int64,
        )

    def solve(self, W: np.ndarray) -> np.ndarray:
        X, p, jarr, r = self.X, self.p, self.jarr, self.r
        Z = W % p
        for a in range(0, r, _PANEL):
            b = min(a + _PANEL, r)
            Lb = np.tril(X[a:b][:, jarr[a:b]], -1)
            for t in range(1, b - a):
                Z[a + t] = (Z[a + t] - Lb[t, :t] @ Z[a:a + t]) % p
            if b < r:
                prod = (
                    X[b:r][:, jarr[a:b]].astype(np.float64)
                    @ Z[a:b].astype(np.float64)
                )
                Z[b:r] = (Z[b:r] - prod.astype(np.int64)) % p
        for a in reversed(range(0, r, _PANEL)):
            b = min(a + _PANEL, r)
            if b < r:
                acc = np.zeros_like(Z[a:b])
                for s in range(b, r, _MAX_INNER):
                    e = min(s + _MAX_INNER, r)
                    prod = (
                        X[a:b][:, jarr[s:e]].astype(np.float64)
                        @ Z[s:e].astype(np.float64)
                    )
                    acc = (acc + prod.astype(np.int64)) % p
                Z[a:b] = (Z[a:b] - acc) % p
            for t in reversed(range(a, b)):
                if t + 1 < b:
                    Z[t] = (Z[t] - X[t, jarr[t + 1:b]] @ Z[t + 1:b]) % p
                Z[t] = Z[t] * int(self.dinv[t]) % p
        return Z


def _rational_reconstruct(a: int, modulus: int) -> Optional[Tuple[int, int]]:
    """num/den with |num|, den <= sqrt(modulus/2), or None."""
    a %= modulus
    if a == 0:
        return (0, 1)
    bound = math.isqrt(modulus // 2)
    r0, r1 = modulus, a
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    den = abs(s1)
    num = r1 if s1 > 0 else -r1
    if den == 0 or den > bound or math.gcd(num, den) != 1:
        return None
    return (num, den)


_RECON_SCHEDULE = (6, 10, 16, 26, 40, 64, 100, 150, 220)


def _dixon_solve(
    solver: _LUSolver,
    mrows: List[Tuple[np.ndarray, np.ndarray]],
    wexact: np.ndarray,
) -> Optional[List[Tuple[List[int], int]]]:
    """Exact rational solve of M z = W column by column via p-adic lifting.

    mrows is the sparse exact M (one (positions, values) pair per row);
    wexact the exact right-hand sides.  Returns per column (numerators,
    denominator), or None when the digit budget runs out.
    """
    p = solver.p
    r, nf = wexact.shape
    digits: List[np.ndarray] = []
    solved: Dict[int, Tuple[List[int], int]] = {}
    resid64 = wexact.copy()
    for it in range(_RECON_SCHEDULE[-1]):
        z = solver.solve(resid64 % p)
        digits.append(z)
        mz = np.zeros_like(resid64)
        for t, (pos, val) in enumerate(mrows):
            if pos.size:
                mz[t] = val @ z[pos]
        resid64 = (resid64 - mz) // p
        if it + 1 not in _RECON_SCHEDULE:
            continue
        modulus = p ** len(digits)
        for fi in range(nf):
            if fi in solved:
                continue
            nums: List[Tuple[int, int]] = []
            for t in range(r):
                a = 0
                for dg in reversed(digits):
                    a = a * p + int(dg[t, fi])
                rec = _rational_reconstruct(a, modulus)
                if rec is None:
                    break
                nums.append(rec)
            else:
                den = 1
                for _, dd in nums:
                    den = den * dd // math.gcd(den, dd)
                u = [nu * (den // dd) for nu, dd in nums]
                ok = all(
                    sum(int(v) * u[q] for q, v in zip(pos, val))
                    == den * int(wexact[t, fi])
                    for t, (pos, val) in enumerate(mrows)
                )
                if ok:
                    solved[fi] = (u, den)
        if len(solved) == nf:
            return [solved[fi] for fi in range(nf)]
    return None


def _is_probable_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int) -> int:
    if n % 2 == 0:
        return 2
    rng = random.Random(n)
    while True:
        c = rng.randrange(1, n)
        x = y = rng.randrange(2, n)
        d = 1
        while d == 1:
            x = (x * x + c) % n
            y = (y * y + c) % n
            y = (y * y + c) % n
            d = math.gcd(abs(x - y), n)
        if d != n:
            return d


def _prime_factors(n: int) -> set:
    out: set = set()
    stack = [n]
    while stack:
        v = stack.pop()
        if v <= 1:
            continue
        for q in (2, 3, 5, 7, 11, 13):
            while v % q == 0:
                out.add(q)
                v //= q
        if v == 1:
            continue
        if _is_probable_prime(v):
            out.add(v)
        else:
            d = _pollard_rho(v)
            stack.extend((d, v // d))
    return out


def _left_null_vector_mod(rows: List[List[int]], q: int) -> Optional[List[int]]:
    """Nonzero y over GF(q) with y . rows = 0, if the rows are dependent."""
    k = len(rows)
    if k == 0:
        return None
    a = np.array([[x % q for x in row] for row in rows], dtype=np.int64)
    u = np.eye(k, dtype=np.int64)
    r = 0
    for c in range(a.shape[1]):
        if r == k:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        pr = r + int(nz[0])
        if pr != r:
            a[[r, pr]] = a[[pr, r]]
            u[[r, pr]] = u[[pr, r]]
        inv = pow(int(a[r, c]), q - 2, q)
        f = a[r + 1:, c] * inv % q
        a[r + 1:, c:] = (a[r + 1:, c:] - f[:, None] * a[r, c:]) % q
        u[r + 1:] = (u[r + 1:] - f[:, None] * u[r]) % q
        r += 1
    if r == k:
        return None
    return [int(x) for x in u[r]]


def _saturate(length: int, vectors: List[List[int]]) -> List[List[int]]:
    """Grow the lattice to its saturation by dividing out pivot primes."""
    h = _hnf_rows(length, vectors)
    if not h:
        return h
    prod = 1
    for row in h:
        prod *= next(v for v in row if v)
    for q in sorted(_prime_factors(prod)):
        while True:
            y = _left_null_vector_mod(h, q)
            if y is None:
                break
            new = [
                sum(yi * row[j] for yi, row in zip(y, h)) // q
                for j in range(length)
            ]
            h = _hnf_rows(length, h + [new])
    return h


def _modular_attempt(
    m: int,
    columns: Tuple[Tuple[Tuple[int, int], ...], ...],
    idx: Sequence[int],
    p: int,
) -> Optional[List[List[int]]]:
    k = len(idx)
    X = np.zeros((k, m), dtype=np.int64)
    for t, j in enumerate(idx):
        for row, coef in columns[j]:
            X[t, row] = coef % p
    perm, piv_cols = _lu_mod_p(X, p)
    r = len(piv_cols)
    if r == m:
        return []
    free = sorted(set(range(m)) - set(piv_cols))
    if r == 0:
        return [[1 if t == f else 0 for t in range(m)] for f in free]
    jpos = {c: t for t, c in enumerate(piv_cols)}
    fpos = {c: t for t, c in enumerate(free)}
    mrows: List[Tuple[np.ndarray, np.ndarray]] = []
    wexact = np.zeros((r, len(free)), dtype=np.int64)
    for t in range(r):
        col = columns[idx[int(perm[t])]]
        pos, val = [], []
        for row, coef in col:
            jp = jpos.get(row)
            if jp is not None:
                pos.append(jp)
                val.append(coef)
            else:
                wexact[t, fpos[row]] = -coef
        mrows.append(
            (np.array(pos, dtype=np.intp), np.array(val, dtype=np.int64))
        )
    solver = _LUSolver(X, piv_cols, p)
    sols = _dixon_solve(solver, mrows, wexact)
    if sols is None:
        return None
    vectors = []
    for fi, f in enumerate(free):
        u, den = sols[fi]
        vec = [0] * m
        vec[f] = den
        for t, c in enumerate(piv_cols):
            vec[c] = u[t]
        g = 0
        for x in vec:
            g = math.gcd(g, abs(x))
        if g > 1:
            vec = [x // g for x in vec]
        vectors.append(vec)
    return vectors


def _violated_columns(vectors: Sequence[Sequence[int]], A: IntMatrix) -> List[int]:
    """Indices of columns some vector fails to annihilate, exactly."""
    if not vectors or not A.columns:
        return []
    big = max(max(map(abs, v), default=0) for v in vectors)
    coef = max((max(abs(c) for _, c in col) for col in A.columns if col), default=0)
    width = max(len(col) for col in A.columns)
    if big and coef and big * coef * width >= 1 << 62:
        # int64 dots could wrap; fall back to exact object arithmetic
        return sorted(
            j
            for j, col in enumerate(A.columns)
            if any(not _annihilates(v, col) for v in vectors)
        )
    V = np.array(vectors, dtype=np.int64)
    groups: Dict[int, List[int]] = {}
    for j, col in enumerate(A.columns):
        if col:
            groups.setdefault(len(col), []).append(j)
    bad: List[int] = []
    for length, js in groups.items():
        for a in range(0, len(js), 16384):
            part = js[a:a + 16384]
            rows = np.array(
                [[r for r, _ in A.columns[j]] for j in part], dtype=np.intp
            )
            coefs = np.array(
                [[c for _, c in A.columns[j]] for j in part], dtype=np.int64
            )
            dots = np.einsum("knl,nl->kn", V[:, rows], coefs)
            for t in np.nonzero(dots.any(axis=0))[0]:
                bad.append(part[int(t)])
    return sorted(bad)


def _kernel_modular(A: IntMatrix) -> List[List[int]]:
    m = A.m
    ncols = A.n
    if m == 0:
        return []
    if ncols == 0:
        return [[1 if t == f else 0 for t in range(m)] for f in range(m)]
    cap = min(ncols, max(m + _SUBSAMPLE_PAD, _DENSE_CELLS // m))
    for attempt in range(len(_PRIMES)):
        p = _PRIMES[attempt]
        take = min(cap, m + _SUBSAMPLE_PAD * (attempt + 1))
        chosen = set(range(ncols))
        if take < ncols:
            pool = list(range(ncols))
            random.Random(_SUBSAMPLE_SEED + attempt).shuffle(pool)
            chosen = set(pool[:take])
        # a subsample can miss rank, leaving spurious vectors; checking the
        # raw vectors first is cheap and names the columns that refute them,
        # which are exactly the ones worth adding before the next factorization
        for _ in range(_AUGMENT_ROUNDS):
            raw = _modular_attempt(m, A.columns, sorted(chosen), p)
            if raw is None:
                break
            if not raw:
                # full row rank already modulo p, so the kernel is trivial
                return []
            bad = _violated_columns(raw, A)
            if not bad:
                sat = _saturate(m, raw)
                if len(sat) == len(raw) and _verify_kernel(sat, A):
                    return sat
                break
            fresh = [j for j in bad if j not in chosen]
            room = cap - len(chosen)
            if not fresh or room <= 0:
                break
            chosen.update(fresh[:room])
    raise ArithmeticError("kernel computation failed to certify; matrix entries may be degenerate")


def left_kernel(A: IntMatrix, engine: Optional[str] = None) -> KernelBasis:
    """Saturated integer basis of {x : x A = 0}, Hermite-reduced.

    engine picks "elimination" (exact row reduction) or "modular" (LU plus
    Dixon lifting); by default small matrices use the former.  Both produce
    the identical canonical basis.
    """
    if engine not in (None, "elimination", "modular"):
        raise ValueError(f"unknown engine {engine!r}")
    if engine is None:
        engine = "elimination" if A.m <= _SMALL_ROWS else "modular"
    if engine == "elimination":
        vectors = _kernel_elimination(A)
    else:
        vectors = _kernel_modular(A)
    basis = _canonical_basis(A.m, vectors)
    if len(basis.vectors) != len(vectors) or not _verify_kernel(
        basis.vectors, A
    ):
        raise ArithmeticError("kernel basis failed exact verification")
    return basis


def rank(A: IntMatrix) -> int:
    """Exact rank over the rationals (= rows minus kernel dimension)."""
    return A.m - left_kernel(A).dim


def add_mirror_constraints(
    A: IntMatrix,
    report: MirrorReport,
    reflective_whitelist: Iterable[Tuple[int, int]] = (),
) -> IntMatrix:
    """Append an e_i - e_j column per mirroring pair not whitelisted.

    Pair indices are 1-based table positions, as produced by mirror_pairs;
    whitelisted pairs and self-mirror entries contribute nothing.
    """
    allowed = {tuple(sorted(p)) for p in reflective_whitelist}
    extra = []
    for i, j in report.pairs:
        if not (1 <= i <= A.m and 1 <= j <= A.m):
            raise IndexError(f"mirror pair ({i}, {j}) outside 1..{A.m}")
        if tuple(sorted((i, j))) in allowed:
            continue
        a, b = i - 1, j - 1
        extra.append(((a, 1), (b, -1)) if a < b else ((b, -1), (a, 1)))
    return IntMatrix(A.m, A.columns + tuple(extra))


def contains_vector(basis: KernelBasis, vector: Sequence[int]) -> bool:
    """Whether the vector is an integer combination of basis vectors."""
    if len(vector) != basis.length:
        raise DimensionError(
            f"vector length {len(vector)} != ambient {basis.length}"
        )
    w = list(vector)
    for row in basis.vectors:
        pc = next(j for j, x in enumerate(row) if x)
        q, rem = divmod(w[pc], row[pc])
        if rem:
            return False
        if q:
            w = [a - q * b for a, b in zip(w, row)]
    return not any(w)


def write_basis_csv(path: str, basis: KernelBasis) -> None:
    lines = [",".join(str(x) for x in row) for row in basis.vectors]
    _atomic_write(path, "\n".join(lines) + ("\n" if lines else ""))


def read_basis_csv(path: str, length: Optional[int] = None) -> KernelBasis:
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                rows.append([int(tok) for tok in line.split(",")])
    if length is None:
        if not rows:
            raise ValueError(f"{path} is empty; pass the ambient length")
        length = len(rows[0])
    return _canonical_basis(length, rows)
