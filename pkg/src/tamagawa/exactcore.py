"""Exact arithmetic substrate.

Arbitrary-precision rationals (stdlib Fraction already satisfies the
lowest-terms / positive-denominator invariants, so BigRat is an alias),
integer matrices with Smith and Hermite normal forms, characteristic
polynomials, the Kronecker symbol, and polynomial factorization over F_p.

Everything here is immutable and pure; safe to share between threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import isqrt

from .errors import BudgetExceededError

BigRat = Fraction

# Enumeration cap for exhaustive equal-degree factor search.
_POLY_ENUM_BUDGET = 10 ** 6


def rat_str(q) -> str:
    """Canonical textual rendering "num/den" used in reports."""
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


# ---------------------------------------------------------------------------
# elementary number theory


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Miller-Rabin, deterministic for n < 3.3e24."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@lru_cache(maxsize=32)
def primes_up_to(n: int) -> tuple[int, ...]:
    if n < 2:
        return ()
    sieve = bytearray([1]) * (n + 1)
    sieve[0] = sieve[1] = 0
    for p in range(2, isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p::p] = bytearray(len(range(p * p, n + 1, p)))
    return tuple(i for i, flag in enumerate(sieve) if flag)


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, s, t) with s*a + t*b == g == gcd(a, b) >= 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def valuation(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of 0 is undefined")
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def factorize(n: int) -> dict[int, int]:
    """Prime factorization of |n| as {p: multiplicity}; n must be nonzero."""
    if n == 0:
        raise ValueError("cannot factor 0")
    n = abs(n)
    out: dict[int, int] = {}
    for p in (2, 3):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    f = 5
    while f * f <= n:
        if is_prime(n):
            break
        for p in (f, f + 2):
            while n % p == 0:
                out[p] = out.get(p, 0) + 1
                n //= p
        f += 6
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def squarefree_part(n: int) -> int:
    if n == 0:
        raise ValueError("0 has no squarefree part")
    d = 1
    for p, e in factorize(n).items():
        if e % 2:
            d *= p
    return -d if n < 0 else d


def kronecker_symbol(a: int, n: int) -> int:
    """Kronecker symbol (a|n), the standard extension of Jacobi to all n."""
    if n == 0:
        return 1 if abs(a) == 1 else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    while n % 2 == 0:
        n //= 2
        if a % 2 == 0:
            return 0
        if a % 8 in (3, 5):
            result = -result
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def hensel_lift_root(coeffs: tuple[int, ...], p: int, root: int, k: int) -> int:
    """Lift a simple root of f mod p to a root mod p**k (Newton doubling).

    f'(root) must be a unit mod p.
    """
    f = tuple(coeffs)

    def ev(poly, x, m):
        acc = 0
        for c in reversed(poly):
            acc = (acc * x + c) % m
        return acc

    deriv = tuple(i * c for i, c in enumerate(f))[1:]
    if ev(f, root, p) != 0:
        raise ValueError("not a root mod p")
    if ev(deriv, root, p) % p == 0:
        raise ValueError("root is not simple mod p")
    m = p
    target = p ** k
    r = root % p
    while m < target:
        m = min(m * m, target)
        fr = ev(f, r, m)
        dr = ev(deriv, r, m)
        r = (r - fr * pow(dr, -1, m)) % m
    return r


# ---------------------------------------------------------------------------
# integer matrices


@dataclass(frozen=True)
class IntMatrix:
    """Immutable integer matrix, row-major flat storage."""

    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entry count must equal rows*cols")

    @classmethod
    def from_rows(cls, rows) -> "IntMatrix":
        rows = [list(r) for r in rows]
        nr = len(rows)
        nc = len(rows[0]) if rows else 0
        if any(len(r) != nc for r in rows):
            raise ValueError("ragged rows")
        flat = tuple(int(x) for r in rows for x in r)
        return cls(nr, nc, flat)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(1 if i == j else 0 for i in range(n) for j in range(n)))

    @classmethod
    def zeros(cls, nr: int, nc: int) -> "IntMatrix":
        return cls(nr, nc, (0,) * (nr * nc))

    def get(self, i: int, j: int) -> int:
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def to_rows(self) -> list[list[int]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def transpose(self) -> "IntMatrix":
        return IntMatrix(
            self.cols,
            self.rows,
            tuple(self.entries[i * self.cols + j] for j in range(self.cols) for i in range(self.rows)),
        )

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        self._same_shape(other)
        return IntMatrix(self.rows, self.cols, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        self._same_shape(other)
        return IntMatrix(self.rows, self.cols, tuple(a - b for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, tuple(-a for a in self.entries))

    def _same_shape(self, other):
        if self.rows != other.rows or self.cols != other.cols:
            raise ValueError("shape mismatch")

    def scale(self, k: int) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, tuple(k * a for a in self.entries))

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        if self.cols != other.rows:
            raise ValueError("shape mismatch in product")
        n, m, k = self.rows, other.cols, self.cols
        a, b = self.entries, other.entries
        out = []
        for i in range(n):
            arow = a[i * k:(i + 1) * k]
            for j in range(m):
                out.append(sum(arow[t] * b[t * m + j] for t in range(k)))
        return IntMatrix(n, m, tuple(out))

    __rmul__ = scale

    def apply(self, vec) -> tuple[int, ...]:
        """Matrix times column vector."""
        if len(vec) != self.cols:
            raise ValueError("vector length mismatch")
        return tuple(sum(self.row(i)[j] * vec[j] for j in range(self.cols)) for i in range(self.rows))

    def trace(self) -> int:
        if self.rows != self.cols:
            raise ValueError("trace of non-square matrix")
        return sum(self.get(i, i) for i in range(self.rows))

    def det(self) -> int:
        """Fraction-free Bareiss elimination."""
        if self.rows != self.cols:
            raise ValueError("det of non-square matrix")
        n = self.rows
        if n == 0:
            return 1
        a = self.to_rows()
        sign = 1
        prev = 1
        for k in range(n - 1):
            if a[k][k] == 0:
                for i in range(k + 1, n):
                    if a[i][k]:
                        a[k], a[i] = a[i], a[k]
                        sign = -sign
                        break
                else:
                    return 0
            pivot = a[k][k]
            for i in range(k + 1, n):
                aik = a[i][k]
                rowi = a[i]
                rowk = a[k]
                for j in range(k + 1, n):
                    rowi[j] = (rowi[j] * pivot - aik * rowk[j]) // prev
                rowi[k] = 0
            prev = pivot
        return sign * a[n - 1][n - 1]


def vstack(mats) -> IntMatrix:
    mats = list(mats)
    if not mats:
        raise ValueError("vstack of nothing")
    nc = mats[0].cols
    if any(m.cols != nc for m in mats):
        raise ValueError("column mismatch")
    flat = tuple(x for m in mats for x in m.entries)
    return IntMatrix(sum(m.rows for m in mats), nc, flat)


def hstack(mats) -> IntMatrix:
    mats = list(mats)
    nr = mats[0].rows
    if any(m.rows != nr for m in mats):
        raise ValueError("row mismatch")
    rows = []
    for i in range(nr):
        row = []
        for m in mats:
            row.extend(m.row(i))
        rows.append(row)
    return IntMatrix.from_rows(rows) if rows else IntMatrix(0, sum(m.cols for m in mats), ())


@dataclass(frozen=True)
class SnfResult:
    """u * m * v == diag(d), with d_i | d_{i+1} and d_i >= 0.

    vinv is the inverse of v; it comes out of the same reduction for free and
    cohomology presentations need it.
    """

    d: tuple[int, ...]
    u: IntMatrix | None
    v: IntMatrix
    vinv: IntMatrix

    @property
    def rank(self) -> int:
        return sum(1 for x in self.d if x)


def smith_normal_form(m: IntMatrix, want_u: bool = True) -> SnfResult:
    """SNF by unimodular row/column operations.

    Pivot choice: minimal absolute value among nonzero entries of the working
    submatrix, ties broken row-major. Deterministic for a given input.
    """
    nr, nc = m.rows, m.cols
    a = m.to_rows()
    u = [[1 if i == j else 0 for j in range(nr)] for i in range(nr)] if want_u else None
    v = [[1 if i == j else 0 for j in range(nc)] for i in range(nc)]
    vinv = [[1 if i == j else 0 for j in range(nc)] for i in range(nc)]

    def row_sub(i, j, q):
        # R_i -= q * R_j
        ai, aj = a[i], a[j]
        for t in range(nc):
            ai[t] -= q * aj[t]
        if u is not None:
            ui, uj = u[i], u[j]
            for t in range(nr):
                ui[t] -= q * uj[t]

    def row_swap(i, j):
        a[i], a[j] = a[j], a[i]
        if u is not None:
            u[i], u[j] = u[j], u[i]

    def row_neg(i):
        a[i] = [-x for x in a[i]]
        if u is not None:
            u[i] = [-x for x in u[i]]

    def col_sub(j, i, q):
        # C_j -= q * C_i ; on vinv this is the inverse op R_i += q * R_j
        for r in a:
            r[j] -= q * r[i]
        for r in v:
            r[j] -= q * r[i]
        vi, vj = vinv[i], vinv[j]
        for t in range(nc):
            vi[t] += q * vj[t]

    def col_swap(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]
        vinv[i], vinv[j] = vinv[j], vinv[i]

    def col_neg(j):
        for r in a:
            r[j] = -r[j]
        for r in v:
            r[j] = -r[j]
        vinv[j] = [-x for x in vinv[j]]

    def eliminate(start: int) -> int:
        """Diagonalize the submatrix from (start, start); returns #pivots placed."""
        t = start
        while t < nr and t < nc:
            piv = None
            best = None
            for i in range(t, nr):
                rowi = a[i]
                for j in range(t, nc):
                    x = rowi[j]
                    if x:
                        x = -x if x < 0 else x
                        if best is None or x < best:
                            best = x
                            piv = (i, j)
            if piv is None:
                break
            if piv[0] != t:
                row_swap(t, piv[0])
            if piv[1] != t:
                col_swap(t, piv[1])
            while True:
                if a[t][t] < 0:
                    row_neg(t)
                p = a[t][t]
                restart = False
                for i in range(t + 1, nr):
                    x = a[i][t]
                    if x % p:
                        row_sub(i, t, x // p)
                        row_swap(t, i)
                        restart = True
                        break
                if restart:
                    continue
                for i in range(t + 1, nr):
                    x = a[i][t]
                    if x:
                        row_sub(i, t, x // p)
                restart = False
                for j in range(t + 1, nc):
                    x = a[t][j]
                    if x % p:
                        col_sub(j, t, x // p)
                        col_swap(t, j)
                        restart = True
                        break
                if restart:
                    continue
                for j in range(t + 1, nc):
                    x = a[t][j]
                    if x:
                        col_sub(j, t, x // p)
                break
            t += 1
        return t

    rank = eliminate(0)

    # enforce the divisibility chain
    while True:
        bad = None
        for i in range(rank - 1):
            if a[i + 1][i + 1] % a[i][i]:
                bad = i
                break
        if bad is None:
            break
        col_sub(bad, bad + 1, -1)  # C_bad += C_{bad+1}
        rank = eliminate(bad)

    d = tuple(a[t][t] for t in range(min(nr, nc)))
    umat = IntMatrix.from_rows(u) if want_u and nr else (IntMatrix(0, 0, ()) if want_u else None)
    vmat = IntMatrix.from_rows(v) if nc else IntMatrix(0, 0, ())
    vinvmat = IntMatrix.from_rows(vinv) if nc else IntMatrix(0, 0, ())
    return SnfResult(d, umat, vmat, vinvmat)


def hermite_normal_form(m: IntMatrix) -> tuple[IntMatrix, IntMatrix]:
    """(h, u) with u*m == h, u unimodular, h in row echelon with positive
    pivots and entries above each pivot reduced into [0, pivot)."""
    nr, nc = m.rows, m.cols
    a = m.to_rows()
    u = [[1 if i == j else 0 for j in range(nr)] for i in range(nr)]

    def combine(i, j, s, t, x, y):
        # rows i,j <- (s*Ri + t*Rj, -y*Ri + x*Rj); unimodular since s*x + t*y == 1
        for mat in (a, u):
            ri, rj = mat[i], mat[j]
            for c in range(len(ri)):
                ri[c], rj[c] = s * ri[c] + t * rj[c], -y * ri[c] + x * rj[c]

    pr = 0
    for c in range(nc):
        nz = [i for i in range(pr, nr) if a[i][c]]
        if not nz:
            continue
        i0 = nz[0]
        for i in nz[1:]:
            g, s, t = xgcd(a[i0][c], a[i][c])
            combine(i0, i, s, t, a[i0][c] // g, a[i][c] // g)
        if i0 != pr:
            a[pr], a[i0] = a[i0], a[pr]
            u[pr], u[i0] = u[i0], u[pr]
        if a[pr][c] < 0:
            a[pr] = [-x for x in a[pr]]
            u[pr] = [-x for x in u[pr]]
        p = a[pr][c]
        for i in range(pr):
            q = a[i][c] // p
            if q:
                for mat, src in ((a, a[pr]), (u, u[pr])):
                    row = mat[i]
                    for t in range(len(row)):
                        row[t] -= q * src[t]
        pr += 1
    h = IntMatrix.from_rows(a) if nr else IntMatrix(0, nc, ())
    return h, (IntMatrix.from_rows(u) if nr else IntMatrix(0, 0, ()))


def _pivots(h: IntMatrix) -> list[tuple[int, int]]:
    out = []
    for i in range(h.rows):
        row = h.row(i)
        for j, x in enumerate(row):
            if x:
                out.append((i, j))
                break
    return out


def row_lattice_index(m: IntMatrix) -> int:
    """Index of the row lattice of m inside Z^cols; 0 when not full rank."""
    h, _ = hermite_normal_form(m)
    piv = _pivots(h)
    if len(piv) < m.cols:
        return 0
    idx = 1
    for i, j in piv:
        idx *= h.get(i, j)
    return idx


def in_row_lattice(m: IntMatrix, vec) -> bool:
    """Membership of an integer vector in the row lattice of m."""
    h, _ = hermite_normal_form(m)
    v = list(vec)
    for i, j in _pivots(h):
        p = h.get(i, j)
        if v[j] % p:
            return False
        q = v[j] // p
        if q:
            row = h.row(i)
            for t in range(len(v)):
                v[t] -= q * row[t]
    return not any(v)


def kernel_basis(m: IntMatrix) -> IntMatrix:
    """Basis of {x in Z^cols : m @ x == 0} as the columns of the result."""
    snf = smith_normal_form(m, want_u=False)
    r = snf.rank
    nc = m.cols
    k = nc - r
    cols = []
    for j in range(r, nc):
        cols.append([snf.v.get(i, j) for i in range(nc)])
    if not cols:
        return IntMatrix(nc, 0, ())
    flat = tuple(cols[j][i] for i in range(nc) for j in range(k))
    return IntMatrix(nc, k, flat)


def charpoly(m: IntMatrix) -> tuple[int, ...]:
    """Coefficients c_0..c_n of det(x*I - m), low degree first.

    Faddeev-LeVerrier: all divisions are exact over Z.
    """
    if m.rows != m.cols:
        raise ValueError("charpoly of non-square matrix")
    n = m.rows
    c = [0] * (n + 1)
    c[n] = 1
    mk = IntMatrix.zeros(n, n)
    ident = IntMatrix.identity(n)
    for k in range(1, n + 1):
        mk = m * mk + ident.scale(c[n - k + 1])
        prod = m * mk
        c[n - k] = -prod.trace() // k
    return tuple(c)


def eval_poly(coeffs, x: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


@dataclass(frozen=True)
class AbelianGroupInvariants:
    """Invariant-factor presentation Z^free_rank + Z/d_1 + ... (d_i | d_{i+1})."""

    free_rank: int
    factors: tuple[int, ...]

    def __post_init__(self):
        for a, b in zip(self.factors, self.factors[1:]):
            if b % a:
                raise ValueError("factors must form a divisibility chain")
        if any(f < 2 for f in self.factors):
            raise ValueError("factors must be > 1")

    @property
    def order(self) -> int | None:
        """Group order, or None when infinite."""
        if self.free_rank:
            return None
        n = 1
        for f in self.factors:
            n *= f
        return n

    def describe(self) -> str:
        parts = []
        if self.free_rank:
            parts.append(f"Z^{self.free_rank}" if self.free_rank > 1 else "Z")
        parts.extend(f"Z/{f}" for f in self.factors)
        return " + ".join(parts) if parts else "0"


def invariants_from_relations(ambient_rank: int, relations: IntMatrix) -> AbelianGroupInvariants:
    """Invariants of Z^ambient_rank / column-span(relations)."""
    if relations.rows != ambient_rank:
        raise ValueError("relation matrix must have ambient_rank rows")
    if relations.cols == 0:
        return AbelianGroupInvariants(ambient_rank, ())
    snf = smith_normal_form(relations, want_u=False)
    nonzero = [x for x in snf.d if x]
    return AbelianGroupInvariants(ambient_rank - len(nonzero), tuple(x for x in nonzero if x > 1))


# ---------------------------------------------------------------------------
# polynomials over F_p (tuples of coefficients, low degree first)


def _ptrim(f):
    f = list(f)
    while f and f[-1] == 0:
        f.pop()
    return tuple(f)


def _pdeg(f):
    return len(f) - 1


def _pmul(f, g, p):
    if not f or not g:
        return ()
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] = (out[i + j] + a * b) % p
    return _ptrim(out)


def _pdivmod(f, g, p):
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    f = list(f)
    q = [0] * max(len(f) - len(g) + 1, 0)
    inv_lead = pow(g[-1], -1, p)
    while len(f) >= len(g) and any(f):
        if f[-1] == 0:
            f.pop()
            continue
        shift = len(f) - len(g)
        coef = f[-1] * inv_lead % p
        q[shift] = coef
        for i, b in enumerate(g):
            f[shift + i] = (f[shift + i] - coef * b) % p
        f.pop()
    return _ptrim(q), _ptrim(f)


def _pmonic(f, p):
    if not f:
        return f
    inv = pow(f[-1], -1, p)
    return tuple(c * inv % p for c in f)


def _pgcd(f, g, p):
    f, g = _ptrim(f), _ptrim(g)
    while g:
        f, g = g, _pdivmod(f, g, p)[1]
    return _pmonic(f, p)


def _ppowmod(base, e, mod, p):
    result = (1,)
    base = _pdivmod(base, mod, p)[1]
    while e:
        if e & 1:
            result = _pdivmod(_pmul(result, base, p), mod, p)[1]
        base = _pdivmod(_pmul(base, base, p), mod, p)[1]
        e >>= 1
    return result


def _pderiv(f, p):
    return _ptrim(tuple(i * c % p for i, c in enumerate(f)))[1:] if len(f) > 1 else ()


def _psub(f, g, p):
    n = max(len(f), len(g))
    f = list(f) + [0] * (n - len(f))
    g = list(g) + [0] * (n - len(g))
    return _ptrim(tuple((a - b) % p for a, b in zip(f, g)))


def _squarefree_parts(f, p):
    """[(g, m)] with f = prod g^m, g monic squarefree, pairwise coprime."""
    out: dict[tuple, int] = {}
    df = _pderiv(f, p)
    c = _pgcd(f, df, p) if df else f
    w = _pdivmod(f, c, p)[0]
    i = 1
    while _pdeg(w) > 0:
        y = _pgcd(w, c, p)
        z = _pdivmod(w, y, p)[0]
        if _pdeg(z) > 0:
            out[z] = out.get(z, 0) + i
        w = y
        c = _pdivmod(c, y, p)[0]
        i += 1
    if _pdeg(c) > 0:
        # c is a p-th power: coefficients of x^{jp} survive, a^{1/p} = a in F_p
        root = tuple(c[j] for j in range(0, len(c), p))
        for g, m in _squarefree_parts(_pmonic(root, p), p):
            out[g] = out.get(g, 0) + m * p
    return sorted(out.items())


def _distinct_degree(g, p):
    """[(h, d)]: h = product of the irreducible factors of g of degree d."""
    out = []
    x_poly = (0, 1)
    h = _pdivmod(x_poly, g, p)[1]
    d = 0
    while _pdeg(g) >= 2 * (d + 1):
        d += 1
        h = _ppowmod(h, p, g, p)
        gd = _pgcd(g, _psub(h, x_poly, p), p)
        if _pdeg(gd) > 0:
            out.append((gd, d))
            g = _pdivmod(g, gd, p)[0]
            h = _pdivmod(h, g, p)[1]
    if _pdeg(g) > 0:
        out.append((g, _pdeg(g)))
    return out


def _equal_degree(h, d, p):
    """Split a product of degree-d irreducibles exhaustively."""
    factors = []
    if d == 1:
        for a in range(p):
            if _pdeg(h) == 0:
                break
            if eval_poly(h, a) % p == 0:
                lin = ((-a) % p, 1)
                factors.append(lin)
                h = _pdivmod(h, lin, p)[0]
        return factors
    if _pdeg(h) == d:
        return [h]
    if p ** d > _POLY_ENUM_BUDGET:
        raise BudgetExceededError(f"equal-degree search p^{d} = {p ** d} exceeds {_POLY_ENUM_BUDGET}")
    # enumerate monic candidates of degree d in lexicographic order
    counters = [0] * d
    while _pdeg(h) > d:
        cand = tuple(counters) + (1,)
        q, r = _pdivmod(h, cand, p)
        if not r:
            factors.append(cand)
            h = q
            continue
        for i in range(d):
            counters[i] += 1
            if counters[i] < p:
                break
            counters[i] = 0
        else:
            raise ArithmeticError("exhausted candidates without splitting")
    factors.append(h)
    return factors


def factor_poly_mod_p(coeffs, p: int):
    """Full factorization of a nonzero integer polynomial mod p.

    Returns (leading_unit, ((monic_factor, multiplicity), ...)) with factors
    as low-first coefficient tuples, sorted for determinism.
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    f = _ptrim(tuple(c % p for c in coeffs))
    if not f:
        raise ValueError("polynomial is zero mod p")
    lead = f[-1]
    f = _pmonic(f, p)
    if _pdeg(f) == 0:
        return lead, ()
    out = []
    for g, mult in _squarefree_parts(f, p):
        for h, d in _distinct_degree(g, p):
            for irr in _equal_degree(h, d, p):
                out.append((irr, mult))
    out.sort(key=lambda t: (len(t[0]), t[0]))
    return lead, tuple(out)


def poly_roots_mod_p(coeffs, p: int) -> tuple[int, ...]:
    """Roots in F_p of a nonzero integer polynomial, sorted, without multiplicity."""
    _, factors = factor_poly_mod_p(coeffs, p)
    roots = sorted((-g[0]) % p for g, _ in factors if len(g) == 2)
    return tuple(roots)
