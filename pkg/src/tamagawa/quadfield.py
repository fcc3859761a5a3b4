"""Quadratic fields: discriminants, splitting, class groups, units.

Conventions: K = Q(sqrt(d)) with d squarefree, fundamental discriminant
D = d (d = 1 mod 4) or 4d, ring basis (1, w) with w = (D + sqrt(D))/2, so
N(a + b*w) = a^2 + D*a*b + ((D^2 - D)/4)*b^2 and w has minimal polynomial
x^2 - D*x + (D^2 - D)/4.

Biquadratic composita Q(sqrt(d1), sqrt(d2)) are carried as the triple of
quadratic characters of the three quadratic subfields; no general number
field machinery.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from math import gcd, isqrt

import numpy as np

from .errors import BudgetExceededError
from .exactcore import (
    AbelianGroupInvariants,
    factorize,
    is_prime,
    kronecker_symbol,
    squarefree_part,
    xgcd,
)

_COUNT_BUDGET = 10 ** 8


def is_fundamental_discriminant(D: int) -> bool:
    if D == 0 or D == 1:
        return False
    if D % 4 == 1:
        return squarefree_part(D) == D
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and squarefree_part(m) == m
    return False


@dataclass(frozen=True)
class QuadField:
    d: int
    D: int

    def __post_init__(self):
        if self.d in (0, 1) or squarefree_part(self.d) != self.d:
            raise ValueError(f"d = {self.d} is not squarefree != 1")
        expected = self.d if self.d % 4 == 1 else 4 * self.d
        if self.D != expected:
            raise ValueError("disc does not match d")

    @classmethod
    def from_d(cls, d: int) -> "QuadField":
        d = int(d)
        D = d if d % 4 == 1 else 4 * d
        return cls(d, D)

    @property
    def is_imaginary(self) -> bool:
        return self.d < 0

    def minpoly_omega(self) -> tuple[int, int, int]:
        """Coefficients (c0, c1, c2) of x^2 - D x + (D^2 - D)/4, low first."""
        D = self.D
        return ((D * D - D) // 4, -D, 1)

    def norm(self, a: int, b: int) -> int:
        """N(a + b*w) for the ring basis (1, w)."""
        D = self.D
        return a * a + D * a * b + ((D * D - D) // 4) * b * b

    def ramified_primes(self) -> tuple[int, ...]:
        return tuple(sorted(factorize(self.D)))


@dataclass(frozen=True)
class SplittingData:
    p: int
    kind: str  # "split" | "inert" | "ramified"
    e: tuple[int, ...]
    f: tuple[int, ...]


def splitting_type(field: QuadField, p: int) -> SplittingData:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    chi = kronecker_symbol(field.D, p)
    if chi == 1:
        return SplittingData(p, "split", (1, 1), (1, 1))
    if chi == -1:
        return SplittingData(p, "inert", (1,), (2,))
    return SplittingData(p, "ramified", (2,), (1,))


# ---------------------------------------------------------------------------
# class groups of imaginary quadratic fields via reduced binary forms


def principal_form(D: int) -> tuple[int, int, int]:
    b = D % 2
    return (1, b, (b * b - D) // 4)


def reduced_forms(D: int) -> tuple[tuple[int, int, int], ...]:
    """All reduced positive-definite forms of discriminant D < 0."""
    if D >= 0 or not is_fundamental_discriminant(D):
        raise ValueError(f"{D} is not a negative fundamental discriminant")
    forms = []
    b = D % 2
    while 3 * b * b <= -D:
        m = (b * b - D) // 4
        a = max(b, 1)
        while a * a <= m:
            if m % a == 0:
                c = m // a
                forms.append((a, b, c))
                if 0 < b < a < c:
                    forms.append((a, -b, c))
            a += 1
        b += 2
    return tuple(sorted(forms))


def reduce_form(form: tuple[int, int, int], D: int) -> tuple[int, int, int]:
    a, b, c = form
    if b * b - 4 * a * c != D:
        raise ValueError("form discriminant mismatch")
    while True:
        if c < a:
            a, b, c = c, -b, a
            continue
        if b > a or b <= -a:
            r = b % (2 * a)
            if r > a:
                r -= 2 * a
            b = r
            c = (b * b - D) // (4 * a)
            continue
        break
    if b < 0 and a == c:
        b = -b
    return (a, b, c)


def _transform_form(form, x, y, u, v):
    # substitution (X, Y) -> (x X + u Y, y X + v Y); must have x v - y u = 1
    a, b, c = form
    a2 = a * x * x + b * x * y + c * y * y
    b2 = 2 * a * x * u + b * (x * v + y * u) + 2 * c * y * v
    c2 = a * u * u + b * u * v + c * v * v
    return (a2, b2, c2)


def _coprime_leading_rep(form, n):
    """Equivalent form whose leading coefficient is coprime to n."""
    if gcd(form[0], n) == 1:
        return form
    for r in range(1, 64):
        for x in range(-r, r + 1):
            for y in range(-r, r + 1):
                if max(abs(x), abs(y)) != r or gcd(x, y) != 1:
                    continue
                a, b, c = form
                m = a * x * x + b * x * y + c * y * y
                if m != 0 and gcd(m, n) == 1:
                    g, s, t = xgcd(x, y)
                    # columns (x, y), (-t, s): det = x s + t y = 1
                    return _transform_form(form, x, y, -t, s)
    raise ArithmeticError("no small representative coprime to n")


def _crt(r1, m1, r2, m2):
    g, s, _ = xgcd(m1, m2)
    if (r2 - r1) % g:
        raise ArithmeticError("incompatible congruences")
    lcm = m1 // g * m2
    return (r1 + m1 * ((r2 - r1) // g) * s) % lcm


def compose_forms(f1, f2, D) -> tuple[int, int, int]:
    """Gauss composition (Dirichlet's method), result reduced."""
    a1, b1, _ = f1
    a2, b2, _ = _coprime_leading_rep(f2, f1[0])
    B = _crt(b1, 2 * a1, b2, 2 * a2)
    A = a1 * a2
    if (B * B - D) % (4 * A):
        raise ArithmeticError("composition produced a non-form")
    return reduce_form((A, B, (B * B - D) // (4 * A)), D)


def _abelian_invariants_from_table(elements, compose, identity):
    """Ascending invariant factors of a finite abelian group given by a
    multiplication rule; max-order element extraction + quotient recursion."""
    if len(elements) == 1:
        return ()
    best, best_ord = None, 1
    for g in elements:
        o = 1
        x = g
        while x != identity:
            x = compose(x, g)
            o += 1
        if o > best_ord:
            best, best_ord = g, o
    cyc = []
    x = identity
    for _ in range(best_ord):
        cyc.append(x)
        x = compose(x, best)
    coset_of = {}
    reps = []
    for g in elements:
        if g in coset_of:
            continue
        members = sorted(compose(g, z) for z in cyc)
        rep = members[0]
        reps.append(rep)
        for m in members:
            coset_of[m] = rep

    def qcompose(u, v):
        return coset_of[compose(u, v)]

    rest = _abelian_invariants_from_table(sorted(reps), qcompose, coset_of[identity])
    return rest + (best_ord,)


@dataclass(frozen=True)
class ClassGroupData:
    D: int
    h: int
    invariants: AbelianGroupInvariants
    forms: tuple[tuple[int, int, int], ...]


@lru_cache(maxsize=256)
def class_group(D: int) -> ClassGroupData:
    forms = reduced_forms(D)

    def compose(f, g):
        return compose_forms(f, g, D)

    factors = _abelian_invariants_from_table(list(forms), compose, principal_form(D))
    inv = AbelianGroupInvariants(0, factors)
    if inv.order != len(forms):
        raise ArithmeticError("composition table inconsistent with form count")
    return ClassGroupData(D, len(forms), inv, forms)


# ---------------------------------------------------------------------------
# fundamental units of real quadratic fields via continued fractions


@dataclass(frozen=True)
class UnitData:
    """Fundamental (or derived) unit of O_K, D > 0.

    (x, y): coordinates w.r.t. (1, w); (hx, hy): the same unit written as
    (hx + hy*sqrt(D))/2. norm in {+1, -1}; regulator = log of the unit under
    the embedding with sqrt(D) > 0 (the larger absolute value).
    """

    D: int
    x: int
    y: int
    hx: int
    hy: int
    norm: int
    regulator: float


def _unit_from_halves(D: int, hx: int, hy: int) -> UnitData:
    nrm = (hx * hx - D * hy * hy) // 4
    if nrm not in (1, -1):
        raise ArithmeticError("not a unit")
    if (hx - hy * D) % 2:
        raise ArithmeticError("not integral in the ring basis")
    x = (hx - hy * D) // 2
    reg = math.log((hx + hy * math.sqrt(D)) / 2)
    return UnitData(D, x, hy, hx, hy, nrm, reg)


def fundamental_unit(D: int) -> UnitData:
    """Continued-fraction expansion of the ring generator, one full period."""
    if D <= 0 or not is_fundamental_discriminant(D):
        raise ValueError(f"{D} is not a positive fundamental discriminant")
    if D % 4 == 0:
        P, Q, N = 0, 1, D // 4
    else:
        P, Q, N = 1, 2, D
    s = isqrt(N)
    seen: dict[tuple[int, int], int] = {}
    seq = []
    while (P, Q) not in seen:
        seen[(P, Q)] = len(seq)
        a = (P + s) // Q
        seq.append((P, Q, a))
        P = a * Q - P
        Q = (N - P * P) // Q
    j = seen[(P, Q)]
    Pj, Qj = seq[j][0], seq[j][1]
    km2, km1 = 1, 0  # convergent denominators k_{-2}, k_{-1}
    for _, _, a in seq[j:]:
        km2, km1 = km1, a * km1 + km2
    A = km1 * Pj + km2 * Qj
    B = km1
    if D % 4 == 0:
        if (2 * A) % Qj or B % Qj:
            raise ArithmeticError("period did not close on an integral unit")
        hx, hy = 2 * A // Qj, B // Qj
    else:
        if (2 * A) % Qj or (2 * B) % Qj:
            raise ArithmeticError("period did not close on an integral unit")
        hx, hy = 2 * A // Qj, 2 * B // Qj
    return _unit_from_halves(D, hx, hy)


def norm_one_unit(D: int) -> UnitData:
    """Smallest unit > 1 of norm +1: the fundamental unit or its square."""
    u = fundamental_unit(D)
    if u.norm == 1:
        return u
    hx = (u.hx * u.hx + D * u.hy * u.hy) // 2
    hy = u.hx * u.hy
    return _unit_from_halves(D, hx, hy)


# ---------------------------------------------------------------------------
# residue rings


def residue_ring_norm_count(field: QuadField, p: int, k: int, target: int,
                            budget: int = _COUNT_BUDGET) -> int:
    """#{(a,b) mod p^k : N(a + b*w) = target mod p^k and a + b*w a unit}.

    A residue class a + b*w is a unit of O/p^k iff p does not divide N(a+b*w),
    so for unit targets the norm condition subsumes the unit condition and for
    non-unit targets the count is 0.
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if k < 1:
        raise ValueError("k must be >= 1")
    q = p ** k
    if q * q > budget:
        raise BudgetExceededError(f"p^2k = {q * q} exceeds budget {budget}")
    t = target % q
    if t % p == 0:
        return 0
    D = field.D
    nw = (D * D - D) // 4
    b = np.arange(q, dtype=np.int64)
    b_sq = (nw % q) * ((b * b) % q) % q
    b_lin = (D % q) * b % q
    count = 0
    step = max(1, 10 ** 7 // q)
    for start in range(0, q, step):
        a = np.arange(start, min(start + step, q), dtype=np.int64)[:, None]
        vals = ((a * a) % q + a * b_lin[None, :] + b_sq[None, :]) % q
        count += int(np.count_nonzero(vals == t))
    return count


# ---------------------------------------------------------------------------
# biquadratic composita as character triples


@dataclass(frozen=True)
class BiquadField:
    """Q(sqrt(d1), sqrt(d2)), Galois group (Z/2)^2, carried through its three
    quadratic subfields Q(sqrt(d1)), Q(sqrt(d2)), Q(sqrt(d3))."""

    d1: int
    d2: int
    d3: int
    D1: int
    D2: int
    D3: int

    @classmethod
    def from_pair(cls, d1: int, d2: int) -> "BiquadField":
        for d in (d1, d2):
            if d in (0, 1) or squarefree_part(d) != d:
                raise ValueError(f"d = {d} is not squarefree != 1")
        if d1 == d2:
            raise ValueError("subfields coincide")
        d3 = squarefree_part(d1 * d2)
        discs = tuple(d if d % 4 == 1 else 4 * d for d in (d1, d2, d3))
        return cls(d1, d2, d3, *discs)

    @property
    def subfield_discs(self) -> tuple[int, int, int]:
        return (self.D1, self.D2, self.D3)

    def ramified_primes(self) -> tuple[int, ...]:
        ps: set[int] = set()
        for D in self.subfield_discs:
            ps.update(factorize(D))
        return tuple(sorted(ps))

    def chi(self, i: int, p: int) -> int:
        """Character of the i-th quadratic subfield at p (i = 1, 2, 3)."""
        return kronecker_symbol(self.subfield_discs[i - 1], p)
