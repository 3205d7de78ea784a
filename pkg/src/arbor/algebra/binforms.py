"""Binary forms over the base field or over a residue field.

A form F(X, Y) of degree n is stored as the ascending X-degree
coefficient tuple (c_0, ..., c_n), c_i being the coefficient of
X^i Y^(n-i).  Roots are points of the projective line; (1:0) is a root
exactly when c_n = 0.  The same container works over a number field
(Fraction-coordinate elements) and over a finite field, which is how
reduced forms are handled.

The resultant follows the Sylvester-matrix determinant convention.
Internally it is computed by stripping the monomial factors X and Y
(whose resultants have closed forms) and running a Euclidean remainder
sequence on the dehomogenizations; a dense Sylvester elimination is
kept as an independent cross-check for the test suite.
"""

from __future__ import annotations

import math
from fractions import Fraction

from arbor.algebra import finitefield as ff
from arbor.algebra import numberfield as nf
from arbor.algebra.finitefield import FiniteField
from arbor.algebra.numberfield import NumberFieldSpec


class BinaryForm:
    """Homogeneous form of declared degree n in X, Y."""

    __slots__ = ("field", "coeffs", "degree")

    def __init__(self, field, coeffs, degree=None):
        coeffs = [field(c) if not hasattr(c, "coords") else c for c in coeffs]
        if degree is None:
            degree = len(coeffs) - 1
        if degree < 0 or len(coeffs) > degree + 1:
            raise ValueError("coefficient list longer than degree allows")
        coeffs += [field(0)] * (degree + 1 - len(coeffs))
        self.field = field
        self.coeffs = tuple(coeffs)
        self.degree = degree

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, BinaryForm):
            return NotImplemented
        return (self.field == other.field and self.degree == other.degree
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.degree, self.coeffs))

    def __repr__(self):
        return f"BinaryForm(deg {self.degree}, {list(self.coeffs)!r})"

    # -- arithmetic --

    def __add__(self, other):
        if not isinstance(other, BinaryForm):
            return NotImplemented
        if other.degree != self.degree:
            raise ValueError("forms of different degrees cannot be added")
        return BinaryForm(self.field, [a + b for a, b in zip(self.coeffs, other.coeffs)],
                          self.degree)

    def __sub__(self, other):
        if not isinstance(other, BinaryForm):
            return NotImplemented
        if other.degree != self.degree:
            raise ValueError("forms of different degrees cannot be subtracted")
        return BinaryForm(self.field, [a - b for a, b in zip(self.coeffs, other.coeffs)],
                          self.degree)

    def __mul__(self, other):
        if not isinstance(other, BinaryForm):
            return NotImplemented
        z = self.field(0)
        out = [z] * (self.degree + other.degree + 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return BinaryForm(self.field, out, self.degree + other.degree)

    def scale(self, c) -> "BinaryForm":
        c = self.field(c)
        return BinaryForm(self.field, [a * c for a in self.coeffs], self.degree)

    def eval(self, x, y):
        """Value at (x, y); arguments are field elements."""
        acc = self.field(0)
        for i, c in enumerate(self.coeffs):
            if c.is_zero():
                continue
            acc = acc + c * x ** i * y ** (self.degree - i)
        return acc

    def partial_x(self) -> "BinaryForm":
        if self.degree == 0:
            raise ValueError("partial of a constant form")
        out = [self.coeffs[i] * i for i in range(1, self.degree + 1)]
        return BinaryForm(self.field, out, self.degree - 1)

    def partial_y(self) -> "BinaryForm":
        if self.degree == 0:
            raise ValueError("partial of a constant form")
        out = [self.coeffs[i] * (self.degree - i) for i in range(self.degree)]
        return BinaryForm(self.field, out, self.degree - 1)

    def dehomogenize(self):
        """Coefficients of F(x, 1), trimmed (roots away from infinity)."""
        out = list(self.coeffs)
        while out and out[-1].is_zero():
            out.pop()
        return out

    def order_at_zero(self) -> int:
        for i, c in enumerate(self.coeffs):
            if not c.is_zero():
                return i
        return self.degree + 1

    def order_at_infinity(self) -> int:
        for i in range(self.degree, -1, -1):
            if not self.coeffs[i].is_zero():
                return self.degree - i
        return self.degree + 1


def from_affine(field, coeffs, degree=None) -> BinaryForm:
    """Homogenize an affine polynomial to the given (or its own) degree."""
    coeffs = [field(c) for c in coeffs]
    while coeffs and coeffs[-1].is_zero():
        coeffs.pop()
    if degree is None:
        degree = len(coeffs) - 1 if coeffs else 0
    return BinaryForm(field, coeffs, degree)


def compose_pair(F: BinaryForm, num: BinaryForm, den: BinaryForm) -> BinaryForm:
    """Substitute X -> num, Y -> den into F; degree multiplies."""
    if num.degree != den.degree:
        raise ValueError("substitution pair must have equal degrees")
    d = num.degree
    n = F.degree
    num_pows = [BinaryForm(F.field, [F.field(1)], 0)]
    den_pows = [BinaryForm(F.field, [F.field(1)], 0)]
    for _ in range(n):
        num_pows.append(num_pows[-1] * num)
        den_pows.append(den_pows[-1] * den)
    z = F.field(0)
    total = [z] * (n * d + 1)
    for i, c in enumerate(F.coeffs):
        if c.is_zero():
            continue
        term = num_pows[i] * den_pows[n - i]
        for k, t in enumerate(term.coeffs):
            total[k] = total[k] + t * c
    return BinaryForm(F.field, total, n * d)


# ---------------------------------------------------------------------------
# integral normalization over a number field
# ---------------------------------------------------------------------------

def joint_content(forms) -> Fraction:
    """Positive rational content of all power-basis coordinates jointly."""
    num = 0
    den = 1
    for F in forms:
        for c in F.coeffs:
            for coord in c.coords:
                num = math.gcd(num, coord.numerator)
                den = den * coord.denominator // math.gcd(den, coord.denominator)
    if num == 0:
        return Fraction(0)
    return Fraction(num, den)


def normalize_joint(forms):
    """Scale a family of forms by one rational so joint content is 1.

    The sign is fixed by making the first nonzero coordinate of the
    first form positive, so normalization is canonical.
    """
    c = joint_content(forms)
    if c == 0:
        raise ValueError("cannot normalize the zero family")
    inv = 1 / c
    scaled = [F.scale(F.field(inv)) for F in forms]
    for F in scaled:
        for coeff in F.coeffs:
            for coord in coeff.coords:
                if coord != 0:
                    if coord < 0:
                        scaled = [G.scale(G.field(-1)) for G in scaled]
                    return scaled
    return scaled


def normalize(F: BinaryForm) -> BinaryForm:
    return normalize_joint([F])[0]


# ---------------------------------------------------------------------------
# resultants and discriminants
# ---------------------------------------------------------------------------

def _poly_resultant(field, f, g):
    """Remainder-sequence resultant of trimmed coefficient lists over K or F_q."""
    if isinstance(field, NumberFieldSpec):
        trim, deg, divmod_, pow_ = nf.k_trim, nf.k_deg, nf.k_divmod, None
    else:
        trim, deg, divmod_ = ff.poly_trim, ff.poly_deg, ff.poly_divmod
    f, g = trim(f), trim(g)
    one = field(1)
    if not f or not g:
        return field(0)
    res = one
    while True:
        df, dg = deg(f), deg(g)
        if dg == 0:
            return res * g[0] ** df
        r = divmod_(f, g)[1]
        dr = deg(r)
        if (df * dg) % 2:
            res = res * field(-1)
        res = res * g[-1] ** (df - dr if dr >= 0 else df + 1)
        if not r:
            return field(0)
        f, g = g, r


def resultant(F: BinaryForm, G: BinaryForm):
    """Sylvester resultant of two binary forms; zero iff a common root.

    Monomial factors X and Y are split off first (their resultants have
    closed forms) so vanishing leading or constant coefficients, i.e.
    roots at infinity or zero, are handled exactly.
    """
    field = F.field
    if F.is_zero() or G.is_zero():
        return field(0)
    n, k = F.degree, G.degree
    a = F.order_at_infinity()
    b = F.order_at_zero()
    c = G.order_at_infinity()
    d = G.order_at_zero()
    if a and c:
        return field(0)  # both vanish at (1:0)
    if b and d:
        return field(0)  # both vanish at (0:1)
    # res(Y, G) = (-1)^deg(G) * lc_x(G); res(X, G) = const(G)
    out = field(1)
    # strip Y^a and X^b from F
    core_f = [F.coeffs[i] for i in range(b, n - a + 1)]
    core_g = [G.coeffs[i] for i in range(d, k - c + 1)]
    if a:
        top = G.coeffs[k]
        val = top if k % 2 == 0 else -top
        out = out * val ** a
    if b:
        out = out * G.coeffs[0] ** b
    # strip Y^c and X^d from G against the surviving core of F
    nf_core = len(core_f) - 1
    if c:
        # res(F1, Y) = (-1)^(deg F1) res(Y, F1) = (-1)^(2 deg F1) lc(F1) = lc(F1)
        out = out * core_f[-1] ** c
    if d:
        # res(F1, X) = (-1)^deg F1 * res(X, F1) = (-1)^deg F1 * const(F1)
        val = core_f[0] if nf_core % 2 == 0 else -core_f[0]
        out = out * val ** d
    return out * _poly_resultant(field, core_f, core_g)


def sylvester_resultant(F: BinaryForm, G: BinaryForm):
    """Dense Sylvester determinant; independent cross-check for tests."""
    field = F.field
    n, k = F.degree, G.degree
    size = n + k
    if size == 0:
        return field(1)
    rows = []
    fd = list(reversed(F.coeffs))
    gd = list(reversed(G.coeffs))
    for i in range(k):
        rows.append([field(0)] * i + fd + [field(0)] * (k - 1 - i))
    for i in range(n):
        rows.append([field(0)] * i + gd + [field(0)] * (n - 1 - i))
    # Gaussian elimination with exact division
    det = field(1)
    sign = 1
    m = [row[:] for row in rows]
    for col in range(size):
        piv = None
        for r in range(col, size):
            if not m[r][col].is_zero():
                piv = r
                break
        if piv is None:
            return field(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            sign = -sign
        pivot = m[col][col]
        det = det * pivot
        inv = pivot.inverse()
        for r in range(col + 1, size):
            factor = m[r][col] * inv
            if factor.is_zero():
                continue
            for cc in range(col, size):
                m[r][cc] = m[r][cc] - factor * m[col][cc]
    return det if sign > 0 else -det


def discriminant(F: BinaryForm):
    """Discriminant of a binary form; zero iff a repeated projective root.

    Normalized as (-1)^(n(n-1)/2) res(F_X, F_Y) / n^(n-2), which agrees
    with disc(x^2+7) = -28 and disc of monic cubics.  Characteristic
    zero only; collision tests over residue fields count multiplicities
    in the factorization instead.
    """
    if F.degree < 2:
        raise ValueError("discriminant requires degree >= 2")
    if not isinstance(F.field, NumberFieldSpec):
        raise TypeError("discriminant is only computed in characteristic zero")
    n = F.degree
    r = resultant(F.partial_x(), F.partial_y())
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    scale = Fraction(sign, n ** (n - 2))
    return r * F.field(scale)


# ---------------------------------------------------------------------------
# squarefree part
# ---------------------------------------------------------------------------

def squarefree_part(F: BinaryForm) -> BinaryForm:
    """Product of the distinct projective linear factors (support form)."""
    if F.is_zero():
        raise ValueError("squarefree part of the zero form")
    field = F.field
    a = min(F.order_at_infinity(), 1)
    b = min(F.order_at_zero(), 1)
    lo = F.order_at_zero()
    hi = F.degree - F.order_at_infinity()
    core = [F.coeffs[i] for i in range(lo, hi + 1)]
    if len(core) <= 1:
        sf_core = [field(1)]
    elif isinstance(field, NumberFieldSpec):
        sf_core = nf.k_squarefree_part(core)
    else:
        sf_core = ff.poly_squarefree_part(core)
    deg = (len(sf_core) - 1) + a + b
    out = [field(0)] * (deg + 1)
    for i, c in enumerate(sf_core):
        out[b + i] = c
    return BinaryForm(field, out, deg)


# ---------------------------------------------------------------------------
# Moebius changes of coordinate
# ---------------------------------------------------------------------------

def moebius_substitute(F: BinaryForm, mat) -> BinaryForm:
    """F(aX + bY, cX + dY) for mat = ((a, b), (c, d))."""
    field = F.field
    (a, b), (c, d) = mat
    a, b, c, d = field(a), field(b), field(c), field(d)
    lin1 = BinaryForm(field, [b, a], 1)
    lin2 = BinaryForm(field, [d, c], 1)
    z = field(0)
    acc = [z] * (F.degree + 1)
    p1 = [BinaryForm(field, [field(1)], 0)]
    p2 = [BinaryForm(field, [field(1)], 0)]
    for _ in range(F.degree):
        p1.append(p1[-1] * lin1)
        p2.append(p2[-1] * lin2)
    for i, cf in enumerate(F.coeffs):
        if cf.is_zero():
            continue
        term = p1[i] * p2[F.degree - i]
        for kk, t in enumerate(term.coeffs):
            acc[kk] = acc[kk] + t * cf
    return BinaryForm(field, acc, F.degree)


def conjugate_pair(num: BinaryForm, den: BinaryForm, mat):
    """(M o f o M^-1) as a pair of forms, M = ((a,b),(c,d)) invertible.

    The inverse substitution uses the adjugate, so for unit-determinant
    integral matrices everything stays integral.
    """
    (a, b), (c, d) = mat
    adj = ((d, -b), (-c, a))
    n1 = moebius_substitute(num, adj)
    d1 = moebius_substitute(den, adj)
    field = num.field
    a, b, c, d = field(a), field(b), field(c), field(d)
    new_num = BinaryForm(field, [a * x + b * y for x, y in zip(n1.coeffs, d1.coeffs)], num.degree)
    new_den = BinaryForm(field, [c * x + d * y for x, y in zip(n1.coeffs, d1.coeffs)], num.degree)
    return new_num, new_den


def moebius_point(mat, point, field):
    """Image of a projective point (x, y) under ((a,b),(c,d))."""
    (a, b), (c, d) = mat
    x, y = point
    return (field(a) * x + field(b) * y, field(c) * x + field(d) * y)
