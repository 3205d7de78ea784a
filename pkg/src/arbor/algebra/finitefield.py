"""Finite fields and univariate polynomial arithmetic over them.

A field is either F_p[t]/(g) for a monic irreducible g over the prime
field, or an extension F[u]/(h) of another already-constructed field
(used for residue fields generated by a point in an extension).
Elements are coordinate tuples in the power basis of the top modulus;
polynomials over a field are trimmed ascending coefficient lists, with
[] denoting the zero polynomial.

Factorization is squarefree decomposition followed by distinct-degree
and equal-degree splitting.  The equal-degree stage draws trial
elements from a generator seeded by the input polynomial, so repeated
runs (and reports built on them) are byte-identical.
"""

from __future__ import annotations

import random


class FiniteField:
    """F_{p^k}, as a quotient of a polynomial ring over `base` (or F_p)."""

    def __init__(self, p: int, modulus, base: "FiniteField | None" = None, check: bool = True):
        if p < 2:
            raise ValueError("characteristic must be a prime")
        self.p = p
        self.base = base
        if base is not None and base.p != p:
            raise ValueError("tower levels must share the characteristic")
        mod = [self._base_coerce(c) for c in modulus]
        while mod and self._base_is_zero(mod[-1]):
            mod.pop()
        if len(mod) < 2:
            raise ValueError("modulus must have degree >= 1")
        if not self._base_is_one(mod[-1]):
            raise ValueError("modulus must be monic")
        self.modulus = tuple(mod)
        self.degree = len(mod) - 1
        base_order = p if base is None else base.order
        base_deg = 1 if base is None else base.prime_degree
        self.order = base_order ** self.degree
        self.prime_degree = base_deg * self.degree
        self._zero = self._base_zero()
        self._one = self._base_one()
        if check and self.degree > 1 and not _modulus_irreducible(self):
            raise ValueError("defining polynomial is reducible")

    # -- base-level coefficient helpers (ints mod p, or base FFElems) --

    def _base_coerce(self, c):
        if self.base is None:
            if isinstance(c, int):
                return c % self.p
            raise TypeError("prime-field coordinates must be integers")
        if isinstance(c, FFElem):
            if c.field != self.base:
                raise TypeError("coordinate from a different field")
            return c
        return self.base(c)

    def _base_is_zero(self, c):
        return c == 0 if self.base is None else c.is_zero()

    def _base_is_one(self, c):
        return c == 1 if self.base is None else c == self.base.one()

    def _base_zero(self):
        return 0 if self.base is None else self.base.zero()

    def _base_one(self):
        return 1 if self.base is None else self.base.one()

    # -- element constructors --

    def __call__(self, value) -> "FFElem":
        if isinstance(value, FFElem):
            if value.field == self:
                return value
            if self.base is not None and value.field == self.base:
                return self.from_coords([value])
            raise TypeError("element from an unrelated field")
        if isinstance(value, int):
            return self.from_coords([self._base_coerce(value)])
        if isinstance(value, (list, tuple)):
            return self.from_coords(list(value))
        raise TypeError(f"cannot build a field element from {value!r}")

    def from_coords(self, coords) -> "FFElem":
        coords = [self._base_coerce(c) for c in coords]
        if len(coords) > self.degree:
            raise ValueError("too many coordinates")
        coords += [self._zero] * (self.degree - len(coords))
        return FFElem(self, tuple(coords))

    def zero(self) -> "FFElem":
        return self.from_coords([])

    def one(self) -> "FFElem":
        return self.from_coords([self._one])

    def gen(self) -> "FFElem":
        """The class of the modulus variable."""
        if self.degree == 1:
            # t == -constant term
            return self.from_coords([self._base_neg(self.modulus[0])])
        return self.from_coords([self._zero, self._one])

    # -- base coefficient arithmetic --

    def _base_add(self, a, b):
        return (a + b) % self.p if self.base is None else a + b

    def _base_sub(self, a, b):
        return (a - b) % self.p if self.base is None else a - b

    def _base_neg(self, a):
        return (-a) % self.p if self.base is None else -a

    def _base_mul(self, a, b):
        return (a * b) % self.p if self.base is None else a * b

    def _base_inv(self, a):
        if self.base is None:
            return pow(a, -1, self.p)
        return a.inverse()

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, FiniteField):
            return NotImplemented
        return self.p == other.p and self.modulus == other.modulus and self.base == other.base

    def __hash__(self):
        return hash((self.p, self.modulus, self.base))

    def __repr__(self):
        if self.base is None:
            return f"GF({self.p}^{self.degree})" if self.degree > 1 else f"GF({self.p})"
        return f"{self.base!r}[u]/(deg {self.degree})"

    def element_key(self, elem: "FFElem"):
        """Flatten an element to an integer tuple; total order for sorting."""
        if self.base is None:
            return tuple(elem.coords)
        out = []
        for c in elem.coords:
            out.extend(self.base.element_key(c))
        return tuple(out)


class FFElem:
    """Immutable element of a FiniteField, stored in the power basis."""

    __slots__ = ("field", "coords")

    def __init__(self, field: FiniteField, coords: tuple):
        self.field = field
        self.coords = coords

    def is_zero(self) -> bool:
        F = self.field
        return all(F._base_is_zero(c) for c in self.coords)

    def _coerce(self, other):
        if isinstance(other, FFElem):
            if other.field is self.field or other.field == self.field:
                return other
            if self.field.base is not None and other.field == self.field.base:
                return self.field(other)
            return None
        if isinstance(other, int):
            return self.field(other)
        return None

    def __bool__(self):
        return not self.is_zero()

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        F = self.field
        return FFElem(F, tuple(F._base_add(a, b) for a, b in zip(self.coords, o.coords)))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        F = self.field
        return FFElem(F, tuple(F._base_sub(a, b) for a, b in zip(self.coords, o.coords)))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __neg__(self):
        F = self.field
        return FFElem(F, tuple(F._base_neg(a) for a in self.coords))

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        F = self.field
        n = F.degree
        prod = [F._zero] * (2 * n - 1)
        for i, a in enumerate(self.coords):
            if F._base_is_zero(a):
                continue
            for j, b in enumerate(o.coords):
                prod[i + j] = F._base_add(prod[i + j], F._base_mul(a, b))
        # reduce modulo the (monic) modulus
        for k in range(2 * n - 2, n - 1, -1):
            c = prod[k]
            if F._base_is_zero(c):
                continue
            prod[k] = F._zero
            for j in range(n):
                prod[k - n + j] = F._base_sub(prod[k - n + j], F._base_mul(c, F.modulus[j]))
        return FFElem(F, tuple(prod[:n]))

    __rmul__ = __mul__

    def inverse(self) -> "FFElem":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero field element")
        F = self.field
        # extended Euclid of the coordinate polynomial with the modulus
        r0, r1 = list(F.modulus), list(self.coords)
        while r1 and F._base_is_zero(r1[-1]):
            r1.pop()
        s0, s1 = [], [F._one]
        while r1:
            q, r = _raw_divmod(F, r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, _raw_sub(F, s0, _raw_mul(F, q, s1))
        # r0 is a nonzero constant gcd
        c = F._base_inv(r0[0])
        inv = [F._base_mul(c, x) for x in s0]
        return F.from_coords(inv)

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

    def frobenius(self, k: int = 1) -> "FFElem":
        """Apply x -> x^(p^k); k may be negative (inverse Frobenius)."""
        d = self.field.prime_degree
        k %= d
        return self ** (self.field.p ** k) if k else self

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.field == o.field and self.coords == o.coords

    def __hash__(self):
        return hash((id(self.field), self.coords))

    def __repr__(self):
        return f"FF({list(self.coords)!r} over {self.field!r})"


def _raw_divmod(F, a, b):
    """Division of raw coefficient lists over F's base ring (b monic-izable)."""
    a = list(a)
    db, da = len(b) - 1, len(a) - 1
    inv_lead = F._base_inv(b[-1])
    q = [F._zero] * max(da - db + 1, 0)
    while da >= db and a:
        c = F._base_mul(a[-1], inv_lead)
        q[da - db] = c
        for j in range(db + 1):
            a[da - db + j] = F._base_sub(a[da - db + j], F._base_mul(c, b[j]))
        while a and F._base_is_zero(a[-1]):
            a.pop()
        da = len(a) - 1
    return q, a


def _raw_mul(F, a, b):
    if not a or not b:
        return []
    out = [F._zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = F._base_add(out[i + j], F._base_mul(x, y))
    while out and F._base_is_zero(out[-1]):
        out.pop()
    return out


def _raw_sub(F, a, b):
    n = max(len(a), len(b))
    a = list(a) + [F._zero] * (n - len(a))
    b = list(b) + [F._zero] * (n - len(b))
    out = [F._base_sub(x, y) for x, y in zip(a, b)]
    while out and F._base_is_zero(out[-1]):
        out.pop()
    return out


# ---------------------------------------------------------------------------
# polynomials over a FiniteField: trimmed ascending lists of FFElem
# ---------------------------------------------------------------------------

def poly_trim(coeffs):
    coeffs = list(coeffs)
    while coeffs and coeffs[-1].is_zero():
        coeffs.pop()
    return coeffs


def poly_from_ints(F: FiniteField, ints) -> list:
    return poly_trim([F(c) for c in ints])


def poly_deg(f) -> int:
    """Degree, with deg 0 = -1."""
    return len(f) - 1


def poly_add(f, g):
    n = max(len(f), len(g))
    F = (f or g)[0].field if (f or g) else None
    if F is None:
        return []
    z = F.zero()
    fa = list(f) + [z] * (n - len(f))
    ga = list(g) + [z] * (n - len(g))
    return poly_trim([a + b for a, b in zip(fa, ga)])


def poly_sub(f, g):
    return poly_add(f, [-c for c in g])


def poly_scale(f, c):
    if c.is_zero():
        return []
    return poly_trim([a * c for a in f])


def poly_mul(f, g):
    if not f or not g:
        return []
    z = f[0].field.zero()
    out = [z] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a.is_zero():
            continue
        for j, b in enumerate(g):
            out[i + j] = out[i + j] + a * b
    return poly_trim(out)


def poly_divmod(f, g):
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    f = list(f)
    dg = poly_deg(g)
    inv = g[-1].inverse()
    F = g[-1].field
    q = [F.zero()] * max(len(f) - dg, 0)
    while poly_deg(f) >= dg:
        c = f[-1] * inv
        k = poly_deg(f) - dg
        q[k] = c
        for j in range(dg + 1):
            f[k + j] = f[k + j] - c * g[j]
        f = poly_trim(f)
    return poly_trim(q), f


def poly_mod(f, g):
    return poly_divmod(f, g)[1]


def poly_monic(f):
    if not f:
        return f
    if f[-1] == f[-1].field.one():
        return list(f)
    return poly_scale(f, f[-1].inverse())


def poly_gcd(f, g):
    while g:
        f, g = g, poly_mod(f, g)
    return poly_monic(f)


def poly_deriv(f):
    if len(f) < 2:
        return []
    return poly_trim([f[i] * i for i in range(1, len(f))])


def poly_eval(f, x: FFElem) -> FFElem:
    acc = x.field.zero()
    for c in reversed(f):
        acc = acc * x + c
    return acc


def poly_shift_embed(f, target: FiniteField):
    """Reinterpret coefficients in an extension of their field."""
    return [target(c) for c in f]


def poly_pow_mod(f, n: int, mod):
    F = mod[-1].field
    result = [F.one()]
    base = poly_mod(f, mod)
    while n:
        if n & 1:
            result = poly_mod(poly_mul(result, base), mod)
        base = poly_mod(poly_mul(base, base), mod)
        n >>= 1
    return result


def poly_key(f):
    """Stable sort key: (degree, flattened coefficient tuples)."""
    if not f:
        return (-1,)
    F = f[0].field
    return (poly_deg(f),) + tuple(F.element_key(c) for c in f)


def pth_root(f):
    """p-th root of a polynomial of the form sum a_i x^(p i).

    Coefficient extraction needs the inverse Frobenius a -> a^(q/p),
    since (sum b_i x^i)^p = sum b_i^p x^(p i).
    """
    if not f:
        return []
    p = f[0].field.p
    out = []
    for i in range(0, len(f), p):
        out.append(f[i].frobenius(-1))
    for i, c in enumerate(f):
        if i % p and not c.is_zero():
            raise ValueError("not a p-th power")
    return poly_trim(out)


def poly_squarefree_part(f):
    """Product of the distinct irreducible factors (monic)."""
    if not f:
        raise ValueError("squarefree part of the zero polynomial")
    f = poly_monic(f)
    if poly_deg(f) == 0:
        return f
    df = poly_deriv(f)
    if not df:
        return poly_squarefree_part(pth_root(f))
    g = poly_gcd(f, df)
    w = poly_divmod(f, g)[0]      # factors with multiplicity prime to p, once each
    c = g
    while True:
        h = poly_gcd(c, w)
        if poly_deg(h) <= 0:
            break
        c = poly_divmod(c, h)[0]
    # c now holds exactly the factors whose multiplicity is divisible by p
    if poly_deg(c) > 0:
        return poly_monic(poly_mul(w, poly_squarefree_part(pth_root(c))))
    return poly_monic(w)


def _squarefree_decomposition(f):
    """Yield (squarefree factor, multiplicity) pairs with product f / lc."""
    f = poly_monic(f)
    out = []
    if poly_deg(f) == 0:
        return out
    df = poly_deriv(f)
    if not df:
        p = f[0].field.p
        for g, m in _squarefree_decomposition(pth_root(f)):
            out.append((g, m * p))
        return out
    g = poly_gcd(f, df)
    w = poly_divmod(f, g)[0]
    i = 1
    while poly_deg(w) > 0:
        y = poly_gcd(w, g)
        part = poly_divmod(w, y)[0]
        if poly_deg(part) > 0:
            out.append((part, i))
        w = y
        g = poly_divmod(g, y)[0]
        i += 1
    if poly_deg(g) > 0:
        p = f[0].field.p
        for h, m in _squarefree_decomposition(pth_root(g)):
            out.append((h, m * p))
    return out


def _seed_from(F: FiniteField, f) -> int:
    acc = F.p
    for c in f:
        for v in F.element_key(c):
            acc = (acc * 1000003 + v + 1) % (2 ** 61 - 1)
    return acc


def _distinct_degree(f):
    """Split a squarefree monic f into (product of deg-d irreducibles, d)."""
    F = f[0].field
    q = F.order
    out = []
    x = [F.zero(), F.one()]
    h = x
    d = 0
    rest = f
    while poly_deg(rest) > 2 * d:
        d += 1
        h = poly_pow_mod(h, q, rest)
        g = poly_gcd(poly_sub(h, x), rest)
        if poly_deg(g) > 0:
            out.append((g, d))
            rest = poly_divmod(rest, g)[0]
            h = poly_mod(h, rest)
    if poly_deg(rest) > 0:
        out.append((rest, poly_deg(rest)))
    return out


def _equal_degree_split(f, d, rng):
    """Split a monic squarefree product of degree-d irreducibles."""
    F = f[0].field
    n = poly_deg(f)
    if n == d:
        return [f]
    q = F.order
    while True:
        a = _random_poly(F, n - 1, rng)
        if poly_deg(a) < 1:
            continue
        g = poly_gcd(a, f)
        if 0 < poly_deg(g) < n:
            pieces = [g, poly_divmod(f, g)[0]]
        else:
            if F.p == 2:
                # trace map over F_2: sum of a^(2^i) for i < d*prime_degree
                t = a
                acc = a
                for _ in range(d * F.prime_degree - 1):
                    t = poly_mod(poly_mul(t, t), f)
                    acc = poly_add(acc, t)
                g = poly_gcd(acc, f)
            else:
                e = (q ** d - 1) // 2
                b = poly_pow_mod(a, e, f)
                g = poly_gcd(poly_sub(b, [F.one()]), f)
            if poly_deg(g) <= 0 or poly_deg(g) >= n:
                continue
            pieces = [g, poly_divmod(f, g)[0]]
        out = []
        for piece in pieces:
            out.extend(_equal_degree_split(poly_monic(piece), d, rng))
        return out


def _random_poly(F, max_deg, rng):
    coeffs = []
    for _ in range(max_deg + 1):
        coeffs.append(_random_elem(F, rng))
    return poly_trim(coeffs)


def _random_elem(F, rng):
    if F.base is None:
        return F(rng.randrange(F.p))
    return F.from_coords([_random_elem(F.base, rng) for _ in range(F.degree)])


def factor(f) -> list:
    """Complete factorization over a finite field.

    Returns a list of (monic irreducible, multiplicity) pairs sorted by
    degree and then by coefficient encoding; the product of the factors
    times the leading coefficient reproduces the input.
    """
    if not f:
        raise ValueError("cannot factor the zero polynomial")
    F = f[0].field
    rng = random.Random(_seed_from(F, f))
    out = []
    for sf, mult in _squarefree_decomposition(f):
        for prod, d in _distinct_degree(sf):
            for irr in _equal_degree_split(prod, d, rng):
                out.append((poly_monic(irr), mult))
    out.sort(key=lambda t: poly_key(t[0]))
    return out


def is_irreducible(f) -> bool:
    """Rabin's irreducibility test."""
    n = poly_deg(f)
    if n <= 0:
        return False
    if n == 1:
        return True
    F = f[0].field
    q = F.order
    f = poly_monic(f)
    x = [F.zero(), F.one()]
    h = poly_pow_mod(x, q ** n, f)
    if poly_sub(h, x):
        return False
    for r in {d for d in range(2, n + 1) if n % d == 0 and _is_prime_small(d)}:
        h = poly_pow_mod(x, q ** (n // r), f)
        if poly_deg(poly_gcd(poly_sub(h, x), f)) != 0:
            return False
    return True


def _is_prime_small(n):
    if n < 2:
        return False
    k = 2
    while k * k <= n:
        if n % k == 0:
            return False
        k += 1
    return True


def _modulus_irreducible(F: FiniteField) -> bool:
    if F.base is None:
        poly = poly_from_ints(_prime_field(F.p), F.modulus)
    else:
        poly = poly_trim(list(F.modulus))
    return is_irreducible(poly)


_PRIME_FIELDS: dict = {}


def _prime_field(p: int) -> FiniteField:
    """GF(p) itself, modeled as F_p[t]/(t)."""
    F = _PRIME_FIELDS.get(p)
    if F is None:
        F = FiniteField(p, [0, 1], check=False)
        _PRIME_FIELDS[p] = F
    return F


def prime_field(p: int) -> FiniteField:
    return _prime_field(p)


def extension(F: FiniteField, modulus) -> FiniteField:
    """The extension of F cut out by a monic irreducible over F."""
    return FiniteField(F.p, modulus, base=F, check=False)
