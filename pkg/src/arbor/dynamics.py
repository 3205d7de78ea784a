"""Rational maps on P^1 as dynamical systems.

A map of degree d >= 2 over K is a coprime pair of degree-d binary
forms, jointly normalized to integer coordinates of content one, so
reduction modulo any unramified prime is coefficient-wise.  This module
provides iteration, critical data, good reduction, reduction and
inseparability degree (height), residual orbits over residue fields and
their extensions, the ramification index of a residually periodic
cycle, and the Frobenius untwisting of residual branches.

Residual points are field elements of the residue field (or of a tower
extension of it) together with the marker "inf" for the point at
infinity.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from arbor.algebra import binforms as bf
from arbor.algebra import finitefield as ff
from arbor.algebra.binforms import BinaryForm
from arbor.algebra.finitefield import FFElem, FiniteField
from arbor.algebra.numberfield import NFElem, NumberFieldSpec
from arbor.errors import DegenerateMapError, WildRegimeError
from arbor.localdata import POINT_AT_INFINITY as INF_POINT
from arbor.localdata import PrimeSpec, valuation


class RationalMap:
    """Degree-d rational self-map of P^1 over a number field."""

    def __init__(self, num: BinaryForm, den: BinaryForm):
        if num.degree != den.degree:
            raise ValueError("numerator and denominator must have equal degree")
        if num.degree < 2:
            raise ValueError("maps of degree < 2 are out of scope")
        if num.field != den.field:
            raise ValueError("coordinates over different fields")
        num, den = bf.normalize_joint([num, den])
        self.field: NumberFieldSpec = num.field
        self.num = num
        self.den = den
        self.degree = num.degree
        self._res = bf.resultant(num, den)
        if self._res.is_zero():
            raise DegenerateMapError("numerator and denominator share a projective root")
        self._iterates = {1: self}
        self._critical = None

    @classmethod
    def from_affine(cls, field: NumberFieldSpec, num_coeffs, den_coeffs) -> "RationalMap":
        """Build from affine numerator/denominator coefficient lists."""
        nc = [field(c) for c in num_coeffs]
        dc = [field(c) for c in den_coeffs]
        while nc and nc[-1].is_zero():
            nc.pop()
        while dc and dc[-1].is_zero():
            dc.pop()
        if not nc or not dc:
            raise ValueError("zero numerator or denominator")
        d = max(len(nc), len(dc)) - 1
        return cls(BinaryForm(field, nc, d), BinaryForm(field, dc, d))

    def __eq__(self, other):
        if not isinstance(other, RationalMap):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        return f"RationalMap(deg {self.degree})"

    def is_polynomial(self) -> bool:
        """True when the denominator is a constant times Y^d."""
        return all(c.is_zero() for c in self.den.coeffs[1:])

    # -- evaluation over K --

    def eval_point(self, point):
        """Image of an affine K-point or "inf"; returns the same kind."""
        K = self.field
        if point == INF_POINT:
            x, y = K.one(), K.zero()
        else:
            x, y = point, K.one()
        nx = self.num.eval(x, y)
        dx = self.den.eval(x, y)
        if dx.is_zero():
            if nx.is_zero():
                raise DegenerateMapError("evaluation hit a common root")
            return INF_POINT
        return nx / dx

    # -- iteration --

    def iterate(self, n: int) -> "RationalMap":
        """The n-fold composite, normalized; degree d^n."""
        if n < 1:
            raise ValueError("iterate exponent must be >= 1")
        got = self._iterates.get(n)
        if got is None:
            prev = self.iterate(n - 1)
            num = bf.compose_pair(prev.num, self.num, self.den)
            den = bf.compose_pair(prev.den, self.num, self.den)
            got = RationalMap(num, den)
            self._iterates[n] = got
        return got

    # -- critical data --

    def critical_data(self) -> "CriticalData":
        if self._critical is None:
            w = _wronskian(self.num, self.den)
            if w.is_zero():
                raise DegenerateMapError("identically vanishing Wronskian")
            w = bf.normalize(w)
            support = bf.normalize(bf.squarefree_part(w))
            self._critical = CriticalData(wronskian=w, support_form=support)
        return self._critical

    # -- reduction data --

    def resultant(self) -> NFElem:
        return self._res

    def good_reduction(self, P: PrimeSpec) -> bool:
        """Unit resultant of the normalized pair at P."""
        return valuation(self._res, P) == 0

    def reduce(self, P: PrimeSpec) -> "ReducedMap":
        """Coefficient-wise reduction; requires good reduction at P."""
        F = P.field
        num = BinaryForm(F, [_reduce_int_elem(c, P) for c in self.num.coeffs], self.degree)
        den = BinaryForm(F, [_reduce_int_elem(c, P) for c in self.den.coeffs], self.degree)
        return ReducedMap(num, den)

    def height_and_untwist(self, P: PrimeSpec):
        """(h, Q) with the reduction equal to Q(x^(p^h)), h maximal.

        Coefficients of Q are read off directly from the reduced pair
        (the exponent-p^h coefficients), so Q(x^(p^h)) reproduces the
        reduction exactly and Q has a nonvanishing derivative.
        """
        fbar = self.reduce(P)
        p = P.p
        h = 0
        while fbar.degree % p == 0 and fbar.is_frobenius_composite():
            fbar = fbar.frobenius_quotient()
            h += 1
        return h, fbar


@dataclass(frozen=True)
class CriticalData:
    """Wronskian (degree 2d-2) and its squarefree support form."""

    wronskian: BinaryForm
    support_form: BinaryForm


def _wronskian(num: BinaryForm, den: BinaryForm) -> BinaryForm:
    return num.partial_x() * den.partial_y() - num.partial_y() * den.partial_x()


def _reduce_int_elem(c: NFElem, P: PrimeSpec) -> FFElem:
    """Reduce an element with integer coordinates at P."""
    F = P.field
    theta = F.gen()
    acc = F.zero()
    for coord in reversed(c.coords):
        if coord.denominator != 1:
            raise ValueError("non-integral coordinate in reduction")
        acc = acc * theta + F(int(coord))
    return acc


# ---------------------------------------------------------------------------
# reduced maps over finite fields
# ---------------------------------------------------------------------------

class ReducedMap:
    """A rational self-map of P^1 over a finite field."""

    def __init__(self, num: BinaryForm, den: BinaryForm):
        if num.degree != den.degree:
            raise ValueError("numerator and denominator must have equal degree")
        self.field: FiniteField = num.field
        self.num = num
        self.den = den
        self.degree = num.degree

    def __eq__(self, other):
        if not isinstance(other, ReducedMap):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __repr__(self):
        return f"ReducedMap(deg {self.degree} over {self.field!r})"

    def is_polynomial(self) -> bool:
        return all(c.is_zero() for c in self.den.coeffs[1:])

    def base_change(self, T: FiniteField) -> "ReducedMap":
        """View the map over an extension tower of its field.

        Towers over the coefficient field embed coefficients as
        constants; prime-field coefficients embed into any field of the
        same characteristic.
        """
        if T == self.field:
            return self
        if T.base == self.field:
            embed = T
        elif self.field.degree == 1 and self.field.base is None and T.p == self.field.p:
            def embed(c):
                return T(int(c.coords[0]))
        else:
            raise ValueError("target is not an extension of the coefficient field")
        num = BinaryForm(T, [embed(c) for c in self.num.coeffs], self.degree)
        den = BinaryForm(T, [embed(c) for c in self.den.coeffs], self.degree)
        return ReducedMap(num, den)

    def eval_point(self, point):
        F = self.field
        if point == INF_POINT:
            x, y = F.one(), F.zero()
        else:
            x, y = point, F.one()
            F = point.field
        num = self.num if F == self.field else self.base_change(F).num
        den = self.den if F == self.field else self.base_change(F).den
        nx = num.eval(x, y)
        dx = den.eval(x, y)
        if dx.is_zero():
            if nx.is_zero():
                raise DegenerateMapError("reduced map is degenerate at the point")
            return INF_POINT
        return nx / dx

    def derivative_numerator(self) -> BinaryForm:
        return _wronskian_ff(self.num, self.den)

    def is_frobenius_composite(self) -> bool:
        """All exponents of both forms divisible by p (so f = Q(x^p))."""
        p = self.field.p
        for form in (self.num, self.den):
            for i, c in enumerate(form.coeffs):
                if not c.is_zero() and (i % p or (form.degree - i) % p):
                    return False
        return True

    def frobenius_quotient(self) -> "ReducedMap":
        """The map Q with self = Q(x^p); degree divides by p."""
        p = self.field.p
        d = self.degree // p
        num = BinaryForm(self.field, [self.num.coeffs[p * i] for i in range(d + 1)], d)
        den = BinaryForm(self.field, [self.den.coeffs[p * i] for i in range(d + 1)], d)
        return ReducedMap(num, den)

    def coefficients_fixed_by(self, h: int) -> bool:
        """Whether every coefficient is fixed by the h-th Frobenius power."""
        for form in (self.num, self.den):
            for c in form.coeffs:
                if c.frobenius(h) != c:
                    return False
        return True


def _wronskian_ff(num: BinaryForm, den: BinaryForm) -> BinaryForm:
    return num.partial_x() * den.partial_y() - num.partial_y() * den.partial_x()


# ---------------------------------------------------------------------------
# residual orbits
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ResidualOrbitRec:
    """Tail-and-cycle decomposition of a forward residual orbit."""

    start: object
    tail: tuple
    cycle: tuple

    @property
    def period(self) -> int:
        return len(self.cycle)

    @property
    def purely_periodic(self) -> bool:
        return not self.tail


def residual_orbit(fbar: ReducedMap, start) -> ResidualOrbitRec:
    """Iterate to the first repetition; always terminates over F_q."""
    seen = {}
    orbit = []
    pt = start
    while pt not in seen:
        seen[pt] = len(orbit)
        orbit.append(pt)
        pt = fbar.eval_point(pt)
    k = seen[pt]
    return ResidualOrbitRec(start=start, tail=tuple(orbit[:k]), cycle=tuple(orbit[k:]))


def local_degree(fbar: ReducedMap, point) -> int:
    """Multiplicity of `point` as a solution of f(x) = f(point)."""
    F = point.field if point != INF_POINT else fbar.field
    g = fbar.base_change(F) if F != fbar.field else fbar
    if point == INF_POINT:
        wn = g.num.coeffs[g.degree]
        wd = g.den.coeffs[g.degree]
    else:
        wn = g.num.eval(point, F.one())
        wd = g.den.eval(point, F.one())
    # zero locus of (wd * num - wn * den) is the fiber through the point
    fiber = BinaryForm(F, [wd * a - wn * b for a, b in zip(g.num.coeffs, g.den.coeffs)],
                       g.degree)
    if fiber.is_zero():
        raise DegenerateMapError("constant map in local degree computation")
    if point == INF_POINT:
        return fiber.order_at_infinity()
    return _root_multiplicity(fiber.dehomogenize(), point)


def _root_multiplicity(coeffs, point) -> int:
    F = point.field
    linear = [-point, F.one()]
    mult = 0
    poly = ff.poly_trim(list(coeffs))
    while poly:
        q, r = ff.poly_divmod(poly, linear)
        if r:
            break
        mult += 1
        poly = q
    return mult


def branch_ram_index(f: RationalMap, P: PrimeSpec, cycle) -> int:
    """Product of local degrees of the reduced map along a residual cycle.

    Equals the Weierstrass degree of the m-th iterate around any lift
    of a cycle point (chain rule), which is the ramification index of a
    branch sitting over the cycle.  Requires height zero.
    """
    h, _ = f.height_and_untwist(P)
    if h > 0:
        raise WildRegimeError(f"positive height {h} at p={P.p}: wild/inseparable regime")
    fbar = f.reduce(P)
    e = 1
    for pt in cycle:
        e *= local_degree(fbar, pt)
    return e


# ---------------------------------------------------------------------------
# Frobenius untwisting of residual branches
# ---------------------------------------------------------------------------

def untwist_branch(fbar: ReducedMap, prefix, h: int):
    """Turn a residual branch prefix for f into one for its Frobenius
    quotient Q (where f = Q(x^(p^h)) residually).

    The n-th entry receives the n-fold h-step Frobenius-power
    correction; with the coefficients fixed by the h-th Frobenius power
    (checked here) the output satisfies Q(beta_{n+1}) = beta_n.  When
    the hypothesis fails the caller should pass to an iterate of the
    map whose coefficient field is stabilized.
    """
    if h < 0:
        raise ValueError("height must be >= 0")
    if h and not fbar.coefficients_fixed_by(h):
        raise WildRegimeError(
            "coefficients not fixed by the h-th Frobenius power: replace the map "
            "by an iterate f^k whose exponent stabilizes the coefficient field")
    out = []
    for n, entry in enumerate(prefix):
        if entry == INF_POINT or h == 0 or n == 0:
            out.append(entry)
        else:
            out.append(entry.frobenius(h * n))
    return out


def retwist_branch(prefix, h: int):
    """Inverse of the untwisting correspondence on branch prefixes."""
    out = []
    for n, entry in enumerate(prefix):
        if entry == INF_POINT or h == 0 or n == 0:
            out.append(entry)
        else:
            out.append(entry.frobenius(-h * n))
    return out
