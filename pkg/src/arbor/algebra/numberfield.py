"""The base number field K = Q[t]/(m(t)) and exact arithmetic in it.

Elements are power-basis coordinate tuples of Fractions.  The defining
polynomial is monic with integer coefficients and is certified
irreducible at construction time: first by reduction modulo several
good primes, and failing that by a full Hensel-lift-and-recombine
factor search, so a reducible modulus cannot slip through and corrupt
norms downstream.

Also provides polynomial arithmetic over Q and over K (trimmed
ascending coefficient lists), resultants via the Euclidean remainder
sequence, and quadratic Hensel lifting of a coprime factorization of
an integer polynomial, which the local-data machinery reuses.
"""

from __future__ import annotations

import math
from fractions import Fraction

from arbor.algebra import finitefield as ff


# ---------------------------------------------------------------------------
# polynomials over Q: trimmed ascending lists of Fractions
# ---------------------------------------------------------------------------

def q_trim(f):
    f = [Fraction(c) for c in f]
    while f and f[-1] == 0:
        f.pop()
    return f


def q_deg(f):
    return len(f) - 1


def q_add(f, g):
    n = max(len(f), len(g))
    fa = list(f) + [Fraction(0)] * (n - len(f))
    ga = list(g) + [Fraction(0)] * (n - len(g))
    return q_trim([a + b for a, b in zip(fa, ga)])


def q_sub(f, g):
    return q_add(f, [-c for c in g])


def q_mul(f, g):
    if not f or not g:
        return []
    out = [Fraction(0)] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a == 0:
            continue
        for j, b in enumerate(g):
            out[i + j] += a * b
    return q_trim(out)


def q_divmod(f, g):
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    f = list(f)
    dg = q_deg(g)
    inv = 1 / g[-1]
    q = [Fraction(0)] * max(len(f) - dg, 0)
    while q_deg(f) >= dg:
        c = f[-1] * inv
        k = q_deg(f) - dg
        q[k] = c
        for j in range(dg + 1):
            f[k + j] -= c * g[j]
        f = q_trim(f)
    return q_trim(q), f


def q_gcd(f, g):
    while g:
        f, g = g, q_divmod(f, g)[1]
    if f:
        lead = f[-1]
        f = [c / lead for c in f]
    return f


def q_deriv(f):
    return q_trim([f[i] * i for i in range(1, len(f))])


def q_eval(f, x):
    acc = Fraction(0)
    for c in reversed(f):
        acc = acc * x + c
    return acc


def q_resultant(f, g) -> Fraction:
    """Resultant of two Q-polynomials (Sylvester determinant convention)."""
    f, g = q_trim(f), q_trim(g)
    if not f or not g:
        return Fraction(0)
    res = Fraction(1)
    while True:
        df, dg = q_deg(f), q_deg(g)
        if dg == 0:
            return res * g[0] ** df
        r = q_divmod(f, g)[1]
        dr = q_deg(r)
        res *= Fraction(-1) ** (df * dg) * g[-1] ** (df - dr)
        if not r:
            return Fraction(0)
        f, g = g, r


def q_content(f) -> Fraction:
    """Positive rational c with f/c primitive integral (0 for f = 0)."""
    if not f:
        return Fraction(0)
    num = 0
    den = 1
    for c in f:
        num = math.gcd(num, c.numerator)
        den = den * c.denominator // math.gcd(den, c.denominator)
    return Fraction(num, den)


# ---------------------------------------------------------------------------
# integer polynomial utilities: Hensel lifting and irreducibility over Q
# ---------------------------------------------------------------------------

def hensel_lift_pair(m, g, h, p, target):
    """Lift a coprime factorization m = g*h (mod p) to modulus p^target.

    `m`, `g`, `h` are ascending integer coefficient lists with g, h monic
    and m monic of degree deg g + deg h; returns (g_k, h_k) with
    m = g_k * h_k (mod p^target), g_k = g (mod p).  Quadratic steps.
    """
    Fp = ff.prime_field(p)
    gp = ff.poly_from_ints(Fp, g)
    hp = ff.poly_from_ints(Fp, h)
    # Bezout: s*g + t*h = 1 mod p
    s, t = _ff_bezout(gp, hp)
    s = [int(c.coords[0]) for c in s]
    t = [int(c.coords[0]) for c in t]
    q = p
    g, h = [c % q for c in g], [c % q for c in h]
    while q < p ** target:
        q2 = min(q * q, p ** target)
        g, h, s, t = _hensel_step(m, g, h, s, t, q, q2)
        q = q2
    return g, h


def _hensel_step(m, g, h, s, t, q, q2):
    # all congruences mod q2; standard quadratic lift (von zur Gathen 15.10)
    e = _z_submod(m, _z_mulmod(g, h, q2), q2)
    qq, r = _z_divmod_monic(_z_mulmod(s, e, q2), h, q2)
    g1 = _z_addmod(g, _z_addmod(_z_mulmod(t, e, q2), _z_mulmod(qq, g, q2), q2), q2)
    h1 = _z_addmod(h, r, q2)
    b = _z_submod(_z_addmod(_z_mulmod(s, g1, q2), _z_mulmod(t, h1, q2), q2), [1], q2)
    cc, d = _z_divmod_monic(_z_mulmod(s, b, q2), h1, q2)
    s1 = _z_submod(s, d, q2)
    t1 = _z_submod(t, _z_addmod(_z_mulmod(t, b, q2), _z_mulmod(cc, g1, q2), q2), q2)
    return g1, h1, s1, t1


def _ff_bezout(a, b):
    F = a[0].field
    r0, r1 = a, b
    s0, s1 = [F.one()], []
    t0, t1 = [], [F.one()]
    while r1:
        q, r = ff.poly_divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, ff.poly_sub(s0, ff.poly_mul(q, s1))
        t0, t1 = t1, ff.poly_sub(t0, ff.poly_mul(q, t1))
    c = r0[-1].inverse()
    return ff.poly_scale(s0, c), ff.poly_scale(t0, c)


def _z_trim(f):
    f = list(f)
    while f and f[-1] == 0:
        f.pop()
    return f


def _z_addmod(a, b, q):
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return _z_trim([(x + y) % q for x, y in zip(a, b)])


def _z_submod(a, b, q):
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return _z_trim([(x - y) % q for x, y in zip(a, b)])


def _z_mulmod(a, b, q):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] = (out[i + j] + x * y) % q
    return _z_trim(out)


def _z_divmod_monic(a, b, q):
    a = [c % q for c in a]
    db = len(_z_trim(b)) - 1
    if db < 0:
        raise ZeroDivisionError
    quo = [0] * max(len(a) - db, 0)
    a = _z_trim(a)
    while len(a) - 1 >= db and a:
        c = a[-1]
        k = len(a) - 1 - db
        quo[k] = c
        for j in range(db + 1):
            a[k + j] = (a[k + j] - c * b[j]) % q
        a = _z_trim(a)
    return _z_trim(quo), a


def _mignotte_bound(m):
    n = len(m) - 1
    norm = math.isqrt(sum(c * c for c in m)) + 1
    return 2 ** n * norm


def is_irreducible_over_q(m) -> bool:
    """Deterministic irreducibility test for a monic integer polynomial.

    Tries reduction modulo a handful of primes not dividing disc(m); a
    single irreducible reduction certifies irreducibility.  Otherwise
    falls back to Hensel lifting the mod-p factorization and searching
    for a factor among subset products (Zassenhaus recombination).
    """
    m = [int(c) for c in m]
    n = len(m) - 1
    if n <= 0:
        return False
    if n == 1:
        return True
    disc = q_resultant([Fraction(c) for c in m], q_deriv([Fraction(c) for c in m]))
    if disc == 0:
        return False  # repeated factor
    good = []
    p = 2
    while len(good) < 6:
        if disc.numerator % p != 0:
            good.append(p)
        p = _next_prime(p)
    best = None
    for p in good:
        Fp = ff.prime_field(p)
        fac = ff.factor(ff.poly_from_ints(Fp, m))
        if len(fac) == 1 and fac[0][1] == 1:
            return True
        if best is None or len(fac) < len(best[1]):
            best = (p, fac)
    # Zassenhaus at the prime with the fewest modular factors
    p, fac = best
    bound = 2 * _mignotte_bound(m)
    k = 1
    while p ** k < bound:
        k += 1
    pieces = []
    for g, mult in fac:
        gz = [int(c.coords[0]) for c in g]
        rest = _z_exact_div(m, gz, p, k)
        lifted, _ = hensel_lift_pair(m, gz, rest, p, k)
        for _ in range(mult):
            pieces.append(lifted)
    # multiplicities > 1 require re-lifting the repeated factor jointly;
    # with disc != 0 the factorization mod a good prime is squarefree.
    q = p ** k
    total = len(pieces)
    for size in range(1, total // 2 + 1):
        for subset in _subsets(total, size):
            prod = [1]
            for idx in subset:
                prod = _z_mulmod(prod, pieces[idx], q)
            cand = [_centered(c, q) for c in prod]
            if _z_divides(cand, m):
                return False
    return True


def _z_exact_div(m, g, p, k):
    """m // g mod p (both monic); used to seed the Hensel cofactor."""
    Fp = ff.prime_field(p)
    quo, rem = ff.poly_divmod(ff.poly_from_ints(Fp, m), ff.poly_from_ints(Fp, g))
    if rem:
        raise ArithmeticError("factor does not divide")
    return [int(c.coords[0]) for c in quo]


def _centered(c, q):
    c %= q
    return c - q if c > q // 2 else c


def _z_divides(g, m):
    if not g or g[-1] == 0:
        return False
    fq = [Fraction(c) for c in m]
    gq = [Fraction(c) for c in g]
    _, r = q_divmod(fq, gq)
    return not r


def _subsets(n, size):
    import itertools
    return itertools.combinations(range(n), size)


def _next_prime(p):
    p += 1
    while True:
        if all(p % d for d in range(2, math.isqrt(p) + 1)):
            return p
        p += 1


# ---------------------------------------------------------------------------
# the number field
# ---------------------------------------------------------------------------

class NumberFieldSpec:
    """K = Q[t]/(m(t)) for a monic irreducible integer polynomial m."""

    def __init__(self, min_poly):
        mp = [int(c) for c in min_poly]
        mp = _z_trim(mp)
        if not mp or mp[-1] != 1:
            raise ValueError("min_poly must be monic with integer coefficients")
        if len(mp) < 2:
            raise ValueError("min_poly must have degree >= 1")
        if not is_irreducible_over_q(mp):
            raise ValueError("min_poly is reducible over Q")
        self.min_poly = tuple(mp)
        self.degree = len(mp) - 1
        self._min_q = [Fraction(c) for c in mp]
        self._disc = None

    def discriminant(self) -> int:
        if self._disc is None:
            n = self.degree
            res = q_resultant(self._min_q, q_deriv(self._min_q))
            sign = -1 if (n * (n - 1) // 2) % 2 else 1
            self._disc = int(sign * res)
        return self._disc

    # -- element constructors --

    def __call__(self, value) -> "NFElem":
        if isinstance(value, NFElem):
            if value.field == self:
                return value
            raise TypeError("element of a different number field")
        if isinstance(value, (int, Fraction)):
            return self.from_coords([Fraction(value)])
        if isinstance(value, (list, tuple)):
            return self.from_coords(value)
        raise TypeError(f"cannot build a field element from {value!r}")

    def from_coords(self, coords) -> "NFElem":
        coords = [Fraction(c) for c in coords]
        if len(coords) > self.degree:
            raise ValueError("too many power-basis coordinates")
        coords += [Fraction(0)] * (self.degree - len(coords))
        return NFElem(self, tuple(coords))

    def zero(self) -> "NFElem":
        return self.from_coords([])

    def one(self) -> "NFElem":
        return self.from_coords([1])

    def gen(self) -> "NFElem":
        """The class of t (for degree 1 this is the rational root)."""
        if self.degree == 1:
            return self.from_coords([-self.min_poly[0]])
        return self.from_coords([0, 1])

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, NumberFieldSpec):
            return NotImplemented
        return self.min_poly == other.min_poly

    def __hash__(self):
        return hash(self.min_poly)

    def __repr__(self):
        return f"Q[t]/({self.min_poly})"


RATIONALS = None  # populated below; the degree-1 field Q[t]/(t)


class NFElem:
    """Element of a NumberFieldSpec in the power basis of theta."""

    __slots__ = ("field", "coords")

    def __init__(self, field: NumberFieldSpec, coords: tuple):
        self.field = field
        self.coords = coords

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coords[1:])

    def as_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("element is irrational")
        return self.coords[0]

    def _coerce(self, other):
        if isinstance(other, NFElem):
            return other if other.field == self.field else None
        if isinstance(other, (int, Fraction)):
            return self.field(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return NFElem(self.field, tuple(a + b for a, b in zip(self.coords, o.coords)))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return NFElem(self.field, tuple(a - b for a, b in zip(self.coords, o.coords)))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __neg__(self):
        return NFElem(self.field, tuple(-a for a in self.coords))

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        K = self.field
        n = K.degree
        prod = [Fraction(0)] * (2 * n - 1)
        for i, a in enumerate(self.coords):
            if a == 0:
                continue
            for j, b in enumerate(o.coords):
                prod[i + j] += a * b
        for k in range(2 * n - 2, n - 1, -1):
            c = prod[k]
            if c == 0:
                continue
            prod[k] = Fraction(0)
            for j in range(n):
                prod[k - n + j] -= c * K.min_poly[j]
        return NFElem(K, tuple(prod[:n]))

    __rmul__ = __mul__

    def inverse(self) -> "NFElem":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        K = self.field
        r0 = list(K._min_q)
        r1 = q_trim(self.coords)
        s0, s1 = [], [Fraction(1)]
        while r1:
            q, r = q_divmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, q_sub(s0, q_mul(q, s1))
        c = 1 / r0[0]
        return K.from_coords([c * x for x in s0])

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.field.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.coords == o.coords

    def __hash__(self):
        return hash((self.field.min_poly, self.coords))

    def __bool__(self):
        return not self.is_zero()

    def norm(self) -> Fraction:
        """N(self) = resultant of min_poly with the coordinate polynomial."""
        a = q_trim(self.coords)
        if not a:
            return Fraction(0)
        return q_resultant(self.field._min_q, a)

    def denominator_lcm(self) -> int:
        den = 1
        for c in self.coords:
            den = den * c.denominator // math.gcd(den, c.denominator)
        return den

    def __repr__(self):
        return f"NF({[str(c) for c in self.coords]})"


def nf_norm(alpha: NFElem) -> Fraction:
    """Field norm, multiplicative, N(r) = r^deg for rational r."""
    return alpha.norm()


def rationals() -> NumberFieldSpec:
    """The rational field, presented as the degree-1 field Q[t]/(t)."""
    global RATIONALS
    if RATIONALS is None:
        RATIONALS = NumberFieldSpec([0, 1])
    return RATIONALS


# ---------------------------------------------------------------------------
# polynomials over K: trimmed ascending lists of NFElem
# ---------------------------------------------------------------------------

def k_trim(f):
    f = list(f)
    while f and f[-1].is_zero():
        f.pop()
    return f


def k_deg(f):
    return len(f) - 1


def k_add(f, g):
    if not f:
        return list(g)
    if not g:
        return list(f)
    K = f[0].field
    n = max(len(f), len(g))
    fa = list(f) + [K.zero()] * (n - len(f))
    ga = list(g) + [K.zero()] * (n - len(g))
    return k_trim([a + b for a, b in zip(fa, ga)])


def k_sub(f, g):
    return k_add(f, [-c for c in g])


def k_mul(f, g):
    if not f or not g:
        return []
    K = f[0].field
    out = [K.zero()] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a.is_zero():
            continue
        for j, b in enumerate(g):
            out[i + j] = out[i + j] + a * b
    return k_trim(out)


def k_divmod(f, g):
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    f = list(f)
    dg = k_deg(g)
    inv = g[-1].inverse()
    K = g[-1].field
    q = [K.zero()] * max(len(f) - dg, 0)
    while k_deg(f) >= dg:
        c = f[-1] * inv
        k = k_deg(f) - dg
        q[k] = c
        for j in range(dg + 1):
            f[k + j] = f[k + j] - c * g[j]
        f = k_trim(f)
    return k_trim(q), f


def k_gcd(f, g):
    while g:
        f, g = g, k_divmod(f, g)[1]
    if f:
        inv = f[-1].inverse()
        f = [c * inv for c in f]
    return f


def k_deriv(f):
    return k_trim([f[i] * i for i in range(1, len(f))])


def k_eval(f, x: NFElem) -> NFElem:
    acc = x.field.zero()
    for c in reversed(f):
        acc = acc * x + c
    return acc


def k_squarefree_part(f):
    """f / gcd(f, f'), monic: the radical in characteristic zero."""
    if not f:
        raise ValueError("squarefree part of the zero polynomial")
    if k_deg(f) == 0:
        return [f[0].field.one()]
    g = k_gcd(f, k_deriv(f))
    quo, _ = k_divmod(f, g)
    inv = quo[-1].inverse()
    return [c * inv for c in quo]


def k_resultant(f, g) -> NFElem:
    """Resultant over K via the remainder sequence (Sylvester convention)."""
    f, g = k_trim(f), k_trim(g)
    K = (f or g)[0].field
    if not f or not g:
        return K.zero()
    res = K.one()
    while True:
        df, dg = k_deg(f), k_deg(g)
        if dg == 0:
            return res * g[0] ** df
        r = k_divmod(f, g)[1]
        dr = k_deg(r)
        sign = K(-1) if (df * dg) % 2 else K.one()
        res = res * sign * g[-1] ** (df - dr)
        if not r:
            return K.zero()
        f, g = g, r
