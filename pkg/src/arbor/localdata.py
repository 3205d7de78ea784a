"""Primes of the base field, residue fields, valuations, Newton polygons.

A prime of K = Q[t]/(m) over an unramified rational prime p is the pair
(p, g) with g an irreducible factor of m mod p.  The completion at such
a prime is the unramified extension Z_p[t]/(g~) with g~ the exact Hensel
lift of g; we work in the finite quotients (Z/p^B)[t]/(g_B), which is
enough to read off any valuation strictly below B.  In the power basis
the valuation of an element is the minimum p-adic valuation of its
coordinates, so everything reduces to integer arithmetic mod p^B.

Primes dividing disc(m) are rejected; the ramified-base analysis is out
of scope and those primes are reported as needing manual attention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from arbor.algebra import finitefield as ff
from arbor.algebra.finitefield import FFElem, FiniteField
from arbor.algebra.numberfield import NFElem, NumberFieldSpec, hensel_lift_pair
from arbor.errors import PrecisionError, RamifiedBasePrimeError

INF = math.inf

DEFAULT_PRECISION = 32
PRECISION_CAP = 4096


class PrimeSpec:
    """A prime of K given by (p, irreducible factor of min_poly mod p)."""

    def __init__(self, number_field: NumberFieldSpec, p: int, factor):
        self.number_field = number_field
        self.p = p
        self.factor = tuple(int(c) % p for c in factor)
        self.residue_degree = len(self.factor) - 1
        if self.residue_degree == 1 and self.factor == (0, 1):
            self.field = ff.prime_field(p)
        else:
            self.field = FiniteField(p, list(self.factor), check=False)
        self._cofactor = None
        self._lifts = {}

    def key(self):
        return (self.p, self.factor)

    def __eq__(self, other):
        if not isinstance(other, PrimeSpec):
            return NotImplemented
        return self.number_field == other.number_field and self.key() == other.key()

    def __hash__(self):
        return hash((self.number_field.min_poly, self.key()))

    def __repr__(self):
        return f"PrimeSpec(p={self.p}, factor={self.factor})"

    def label(self) -> str:
        return f"({self.p}; {list(self.factor)})"

    def approx(self, precision: int = DEFAULT_PRECISION) -> "LocalApprox":
        """The completion truncated at p^precision, memoized per precision."""
        la = self._lifts.get(precision)
        if la is None:
            la = LocalApprox(self, precision)
            self._lifts[precision] = la
        return la

    def residue_gen_image(self) -> FFElem:
        """The reduction of theta in the residue field."""
        return self.field.gen()


def primes_above(number_field: NumberFieldSpec, p: int):
    """All primes of K over p, one per irreducible factor of m mod p.

    Requires p coprime to disc(m); the monogenic unramified case is the
    only one the valuation machinery handles.
    """
    if number_field.discriminant() % p == 0:
        raise RamifiedBasePrimeError(
            f"p={p} divides disc(min_poly): ramified-or-nonmonogenic base prime, "
            "manual analysis required")
    Fp = ff.prime_field(p)
    mp = ff.poly_from_ints(Fp, list(number_field.min_poly))
    out = []
    for g, mult in ff.factor(mp):
        # p coprime to the discriminant forces squarefree reduction
        assert mult == 1
        out.append(PrimeSpec(number_field, p, [int(c.coords[0]) for c in g]))
    out.sort(key=lambda P: P.factor)
    return out


class LocalApprox:
    """(Z/p^B)[t]/(g_B): the completion at a prime, truncated at p^B.

    Elements are integer coordinate tuples of length residue_degree,
    reduced mod p^B.  Valuations below B are exact; an element that is
    zero at this precision only reveals "valuation >= B".
    """

    def __init__(self, prime: PrimeSpec, precision: int):
        if precision > PRECISION_CAP:
            raise PrecisionError(
                f"requested precision {precision} exceeds the cap {PRECISION_CAP}")
        self.prime = prime
        self.B = precision
        p = prime.p
        self.pB = p ** precision
        m = list(prime.number_field.min_poly)
        g = list(prime.factor)
        if len(g) == len(m):
            self.lifted_factor = tuple(c % self.pB for c in m)
        else:
            Fp = ff.prime_field(p)
            quo, rem = ff.poly_divmod(ff.poly_from_ints(Fp, m), ff.poly_from_ints(Fp, g))
            assert not rem
            h = [int(c.coords[0]) for c in quo]
            gB, _ = hensel_lift_pair(m, g, h, p, precision)
            gB = list(gB) + [0] * (len(g) - len(gB))
            gB[-1] = 1
            self.lifted_factor = tuple(c % self.pB for c in gB)
        self.deg = prime.residue_degree

    # -- element helpers: plain int tuples mod p^B --

    def zero(self):
        return (0,) * self.deg

    def one(self):
        return (1,) + (0,) * (self.deg - 1)

    def of_int(self, n: int):
        return (n % self.pB,) + (0,) * (self.deg - 1)

    def of_coords(self, coords):
        coords = [int(c) % self.pB for c in coords]
        if len(coords) > self.deg:
            raise ValueError("coordinate list too long")
        return tuple(coords + [0] * (self.deg - len(coords)))

    def embed_int_poly(self, coords):
        """A(theta) for an integer coefficient list A, i.e. A mod (g_B, p^B)."""
        a = [int(c) % self.pB for c in coords]
        g = self.lifted_factor
        dg = self.deg
        while len(a) > dg:
            c = a.pop()
            if c == 0:
                continue
            k = len(a) - dg
            for j in range(dg):
                a[k + j] = (a[k + j] - c * g[j]) % self.pB
        return tuple(a + [0] * (dg - len(a)))

    def add(self, a, b):
        return tuple((x + y) % self.pB for x, y in zip(a, b))

    def sub(self, a, b):
        return tuple((x - y) % self.pB for x, y in zip(a, b))

    def neg(self, a):
        return tuple((-x) % self.pB for x in a)

    def mul(self, a, b):
        n = self.deg
        if n == 1:
            return ((a[0] * b[0]) % self.pB,)
        prod = [0] * (2 * n - 1)
        for i, x in enumerate(a):
            if x == 0:
                continue
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % self.pB
        g = self.lifted_factor
        for k in range(2 * n - 2, n - 1, -1):
            c = prod[k]
            if c == 0:
                continue
            prod[k] = 0
            for j in range(n):
                prod[k - n + j] = (prod[k - n + j] - c * g[j]) % self.pB
        return tuple(prod[:n])

    def is_zero(self, a):
        return all(x == 0 for x in a)

    def val(self, a):
        """min p-adic valuation of the coordinates; None when >= B."""
        best = None
        p = self.prime.p
        for x in a:
            if x == 0:
                continue
            v = 0
            while x % p == 0:
                x //= p
                v += 1
            if best is None or v < best:
                best = v
            if best == 0:
                return 0
        return best

    def reduce_ff(self, a) -> FFElem:
        F = self.prime.field
        p = self.prime.p
        return F.from_coords([x % p for x in a])

    def lift_ff(self, x: FFElem):
        if x.field != self.prime.field:
            raise ValueError("element of a different residue field")
        return self.of_coords([int(c) for c in x.coords])

    def inv(self, a):
        """Inverse of a unit, by lifting the residue inverse (Newton)."""
        r = self.reduce_ff(a)
        if r.is_zero():
            raise ZeroDivisionError("not a unit in the local ring")
        x = self.lift_ff(r.inverse())
        # x_{k+1} = x_k (2 - a x_k) doubles the precision each pass
        k = 1
        while k < self.B:
            ax = self.mul(a, x)
            two_minus = self.sub(self.add(self.one(), self.one()), ax)
            x = self.mul(x, two_minus)
            k *= 2
        return x

    def div_p_power(self, a, k: int):
        """Divide by p^k exactly (coordinates must all be divisible)."""
        pk = self.prime.p ** k
        out = []
        for x in a:
            if x % pk:
                raise ValueError("coordinate not divisible by p^k")
            out.append(x // pk)
        return tuple(out)

    def embed_nf(self, alpha: NFElem):
        """Embed a P-integral element of K; exact mod p^B.

        Denominators divisible by p are cleared through a throwaway
        higher-precision ring, so integrality at this prime is the only
        requirement.
        """
        if alpha.field != self.prime.number_field:
            raise ValueError("element of a different number field")
        den = alpha.denominator_lcm()
        k = 0
        p = self.prime.p
        while den % p == 0:
            den //= p
            k += 1
        full_den = alpha.denominator_lcm()
        if k == 0:
            num = self.embed_int_poly([int(c * full_den) for c in alpha.coords])
            dinv = self.inv(self.of_int(full_den))
            return self.mul(num, dinv)
        big = self.prime.approx(self.B + k)
        num = big.embed_int_poly([int(c * full_den) for c in alpha.coords])
        unit = big.inv(big.of_int(den))
        scaled = big.mul(num, unit)
        divided = big.div_p_power(scaled, k)  # raises if alpha is not P-integral
        return self.of_coords([x % self.pB for x in divided])


# ---------------------------------------------------------------------------
# valuations and reduction of points
# ---------------------------------------------------------------------------

def valuation(alpha: NFElem, P: PrimeSpec, start_precision: int = DEFAULT_PRECISION):
    """v_P(alpha), normalized so v_P(K*) = Z; +inf for zero.

    Computed in the truncated completion; the precision doubles on
    demand and the hard cap surfaces as a PrecisionError carrying the
    best lower bound obtained.
    """
    if alpha.is_zero():
        return INF
    den = alpha.denominator_lcm()
    v_den = 0
    p = P.p
    while den % p == 0:
        den //= p
        v_den += 1
    full_den = alpha.denominator_lcm()
    coords = [int(c * full_den) for c in alpha.coords]
    B = start_precision
    while True:
        la = P.approx(B)
        v = la.val(la.embed_int_poly(coords))
        if v is not None and v < B:
            return v - v_den
        if B >= PRECISION_CAP:
            raise PrecisionError(
                f"v_P exceeds precision cap at p={P.p}", lower_bound=B - v_den)
        B = min(2 * B, PRECISION_CAP)


POINT_AT_INFINITY = "inf"


def reduce_point(point, P: PrimeSpec):
    """Reduction of a point of P^1(K) to the residue projective line.

    `point` is an NFElem (affine), the string "inf", or a projective
    pair of NFElems.  Non-integral affine points reduce to infinity.
    Returns an FFElem or the infinity marker.
    """
    K = P.number_field
    if point == POINT_AT_INFINITY:
        x, y = K.one(), K.zero()
    elif isinstance(point, NFElem):
        x, y = point, K.one()
    else:
        x, y = point
        if x.is_zero() and y.is_zero():
            raise ValueError("(0 : 0) is not a projective point")
    vx = valuation(x, P) if not x.is_zero() else INF
    vy = valuation(y, P) if not y.is_zero() else INF
    m = min(vx, vy)
    scale = K(Fraction(1, P.p ** int(m))) if m > 0 else K(Fraction(P.p) ** int(-m)) if m < 0 else K.one()
    x, y = x * scale, y * scale
    la = P.approx(DEFAULT_PRECISION)
    xr = la.reduce_ff(la.embed_nf(x))
    yr = la.reduce_ff(la.embed_nf(y))
    if yr.is_zero():
        return POINT_AT_INFINITY
    return xr / yr


# ---------------------------------------------------------------------------
# Newton polygons
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NewtonPolygonRec:
    """Lower convex hull of (index, valuation) with its slope data."""

    points: tuple          # the finite input points (i, v_i)
    vertices: tuple        # hull vertices, left to right
    segments: tuple        # (slope, horizontal length), slopes strictly increasing
    zero_order: int        # index of the first finite point (roots at the center)

    def root_valuations(self):
        """Multiset of root valuations: -slope with multiplicity = length.

        Does not include the `zero_order` roots sitting at the expansion
        center itself (valuation +inf).
        """
        out = []
        for slope, length in self.segments:
            out.extend([-slope] * length)
        return out


def newton_polygon(values) -> NewtonPolygonRec:
    """Polygon of a coefficient-valuation sequence (index 0 first).

    Entries are rationals or +inf (math.inf); at least one must be
    finite.
    """
    pts = []
    for i, v in enumerate(values):
        if v is INF or v == INF:
            continue
        pts.append((i, Fraction(v)))
    if not pts:
        raise ValueError("all coefficient valuations are infinite")
    # monotone chain, lower hull; popping on equal slopes drops collinear
    # middle points, so slopes between surviving vertices strictly increase
    hull = []
    for x3, y3 in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (y2 - y1) * (x3 - x2) >= (y3 - y2) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append((x3, y3))
    segments = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        segments.append((Fraction(y2 - y1, x2 - x1), x2 - x1))
    return NewtonPolygonRec(points=tuple(pts), vertices=tuple(hull),
                            segments=tuple(segments), zero_order=pts[0][0])


def weierstrass_degree(values) -> int:
    """Least index with coefficient valuation zero.

    Raises PrecisionError when no unit coefficient is visible within
    the supplied truncation: the caller must increase precision.
    """
    for i, v in enumerate(values):
        if v == 0:
            return i
    raise PrecisionError("no unit coefficient within the truncation; increase precision")


# ---------------------------------------------------------------------------
# Weierstrass preparation over a truncated completion
# ---------------------------------------------------------------------------

def _ff_series_mul(F, a, b, length):
    z = F.zero()
    out = [z] * length
    for i, x in enumerate(a):
        if i >= length or x.is_zero():
            continue
        for j, y in enumerate(b):
            if i + j >= length:
                break
            out[i + j] = out[i + j] + x * y
    return out


def _ff_series_inv(F, a, length):
    if a[0].is_zero():
        raise ZeroDivisionError("series with non-unit constant term")
    inv0 = a[0].inverse()
    out = [inv0] + [F.zero()] * (length - 1)
    for k in range(1, length):
        acc = F.zero()
        for j in range(1, min(k, len(a) - 1) + 1):
            acc = acc + a[j] * out[k - j]
        out[k] = -inv0 * acc
    return out


def weierstrass_prepare(series, la: LocalApprox, target_precision: int):
    """Factor a truncated integral series as W(x) u(x).

    `series` is a list of LocalApprox elements (length = x-truncation).
    W is the monic distinguished polynomial of degree e = the
    Weierstrass degree (non-leading coefficients in pO), u is a unit
    series, and W * u matches the input modulo (p^target, x^truncation);
    the recombination is verified before returning.
    """
    L = len(series)
    if target_precision > la.B:
        raise PrecisionError("target precision exceeds the ring precision")
    vals = [la.val(c) if la.val(c) is not None else INF for c in series]
    e = None
    for i, v in enumerate(vals):
        if v == 0:
            e = i
            break
    if e is None:
        raise PrecisionError("no unit coefficient within the truncation; increase precision")
    if L <= e:
        raise PrecisionError("truncation too short for the Weierstrass degree")
    F = la.prime.field
    p = la.prime.p
    N = target_precision
    # initial approximation mod p: W = x^e, u = the shifted tail
    W = [la.zero()] * e + [la.one()]
    u = list(series[e:])
    u_res = [la.reduce_ff(c) for c in u]
    u_inv = _ff_series_inv(F, u_res, L)
    pk = 1
    for k in range(1, N):
        pk *= p
        # residual divided by p^k, then reduced mod p
        prod = _ring_series_mul(la, W, u, L)
        resid = [la.sub(s, t) for s, t in zip(series, prod + [la.zero()] * (L - len(prod)))]
        r_red = []
        for c in resid:
            r_red.append(F.from_coords([(x // pk) % p if x % pk == 0 else _nondiv(x, pk)
                                        for x in c]))
        r = _ff_series_mul(F, r_red, u_inv, L)
        dW = r[:e]
        du = _ff_series_mul(F, u_res, r[e:], L - e)
        W = [la.add(w, _scaled_lift(la, c, pk)) for w, c in zip(W[:e], dW)] + [W[e]]
        u = [la.add(x, _scaled_lift(la, c, pk)) for x, c in zip(u, du + [F.zero()] * (L - e - len(du)))]
    # verify the recombination exactly at the target precision
    prod = _ring_series_mul(la, W, u, L)
    pN = p ** N
    for s, t in zip(series, prod + [la.zero()] * (L - len(prod))):
        if any((x - y) % pN for x, y in zip(s, t)):
            raise AssertionError("Weierstrass recombination failed")
    return W, u


def _nondiv(x, pk):
    raise ArithmeticError("residual not divisible by p^k; preparation drifted")


def _scaled_lift(la: LocalApprox, c: FFElem, pk: int):
    return tuple((int(x) * pk) % la.pB for x in c.coords)


def _ring_series_mul(la: LocalApprox, a, b, length):
    out = [la.zero()] * length
    for i, x in enumerate(a):
        if i >= length or la.is_zero(x):
            continue
        for j, y in enumerate(b):
            if i + j >= length:
                break
            out[i + j] = la.add(out[i + j], la.mul(x, y))
    return out
