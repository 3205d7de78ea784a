"""Branch-level ramification: valuation simulation, growth laws, exact
oracles, post-critically finite prime enumeration, and prime scans.

The simulator follows one backward orbit (branch) whose base point
reduces onto a purely periodic residual cycle.  A periodic point is
Hensel-lifted so that the working cycle A_0, ..., A_{m-1} satisfies
f(A_j) = A_{j+1 mod m} exactly at the working precision; then every
backward step is governed by the Newton polygon of

    G_j(x) - w d_j(x),    G_j(x) = n(x + A_j) - A_{j+1} d(x + A_j),

whose constant term has valuation exactly v(w): the distance valuations
of all preimages are read off the polygon with no cancellation
ambiguity in the contracting (positive-slope-root) range.  Cycles
through infinity are moved into the finite chart by a unit-determinant
coordinate change, which preserves all distance valuations on the
relevant residue classes.

Ramification certificates are the denominators of the distance
valuations; they divide the true ramification indices and are exact in
the tame totally ramified steps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from arbor.algebra import binforms as bf
from arbor.algebra import integers as zz
from arbor.algebra.binforms import BinaryForm
from arbor.algebra.numberfield import NFElem, NumberFieldSpec
from arbor.dynamics import RationalMap, branch_ram_index, residual_orbit
from arbor.errors import (
    BadReductionError,
    PrecisionError,
    PreconditionError,
    RamifiedBasePrimeError,
    ResourceCapError,
    WildRegimeError,
)
from arbor.localdata import (
    INF,
    POINT_AT_INFINITY,
    LocalApprox,
    PrimeSpec,
    newton_polygon,
    primes_above,
    reduce_point,
    valuation,
)
from arbor.portrait import critical_cycles, directed_cycle_witness, has_collision

DEFAULT_SIM_PRECISION = 32
ORACLE_DEGREE_CAP = 4096


# ---------------------------------------------------------------------------
# chart management: move a residual cycle away from infinity
# ---------------------------------------------------------------------------

@dataclass
class SimChart:
    """Coordinate change applied before a simulation (identity if None)."""

    matrix: tuple | None           # ((a,b),(c,d)) over K, unit determinant

    def describe(self) -> str:
        if self.matrix is None:
            return "identity"
        (a, b), (c, d) = self.matrix
        def txt(x):
            return "[" + ",".join(str(v) for v in x.coords) + "]"
        return f"z -> ({txt(a)}z + {txt(b)})/({txt(c)}z + {txt(d)})"


def _lift_residue(x, K: NumberFieldSpec) -> NFElem:
    """Integer-coordinate lift of a residue field element."""
    return K.from_coords([int(c) for c in x.coords])


def _prepare_chart(f: RationalMap, P: PrimeSpec, cycle):
    """Conjugate so the residual cycle avoids infinity.

    Returns (map, chart, transform) where `transform` sends K-points of
    the original coordinate into the new one.
    """
    if all(pt != POINT_AT_INFINITY for pt in cycle):
        return f, SimChart(None), lambda z: z
    K = f.field
    Fq = P.field
    taken = {pt.coords if pt != POINT_AT_INFINITY else None for pt in cycle}
    s = None
    # smallest finite residue class not on the cycle, by coordinate order
    for flat in _iter_residues(Fq):
        if flat.coords not in taken:
            s = flat
            break
    if s is None:
        raise PreconditionError(
            "the residual cycle covers the whole projective line; "
            "no finite chart is available")
    shat = _lift_residue(s, K)
    mat = ((K.zero(), K.one()), (K.one(), -shat))
    num, den = bf.conjugate_pair(f.num, f.den, mat)
    g = RationalMap(num, den)

    def transform(z: NFElem) -> NFElem:
        return (z - shat).inverse()

    return g, SimChart(mat), transform


def _iter_residues(Fq):
    """All residue field elements in coordinate order (small fields only)."""
    p, deg = Fq.p, Fq.degree
    total = p ** deg
    if total > 4096:
        # only cycles can force the search, and they are tiny in practice
        total = 4096
    for code in range(total):
        coords = []
        x = code
        for _ in range(deg):
            coords.append(x % p)
            x //= p
        yield Fq.from_coords(coords)


# ---------------------------------------------------------------------------
# lifted periodic points
# ---------------------------------------------------------------------------

@dataclass
class LiftedPoint:
    """An approximation a with f^m(a) = a at the stated precision.

    `cycle_lifts[j]` is f^j(a); these form an exact m-cycle in the ring,
    which is what makes the step polygons cancellation-free.  When a
    coordinate change was needed the chart records it and everything is
    expressed in the new coordinate.
    """

    prime: PrimeSpec
    ring: LocalApprox
    value: tuple
    period: int
    cycle_lifts: list
    chart: SimChart
    sim_map: RationalMap


def _affine_ring_polys(g: RationalMap, la: LocalApprox):
    num = [la.embed_nf(c) for c in g.num.coeffs]
    den = [la.embed_nf(c) for c in g.den.coeffs]
    return num, den


def _ring_poly_eval(la: LocalApprox, coeffs, x):
    acc = la.zero()
    for c in reversed(coeffs):
        acc = la.add(la.mul(acc, x), c)
    return acc


def _ring_map_eval(la: LocalApprox, num, den, x):
    dv = _ring_poly_eval(la, den, x)
    if la.val(dv) not in (0,):
        raise PrecisionError("evaluation at a residual pole; chart fix failed")
    return la.mul(_ring_poly_eval(la, num, x), la.inv(dv))


def _ring_poly_deriv(coeffs, la: LocalApprox):
    out = []
    for i in range(1, len(coeffs)):
        c = coeffs[i]
        out.append(tuple((x * i) % la.pB for x in c))
    return out


def _ff_poly_eval(coeffs, x):
    acc = x.field.zero()
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def lift_periodic_point(f: RationalMap, P: PrimeSpec, cycle,
                        precision: int = DEFAULT_SIM_PRECISION) -> LiftedPoint:
    """Hensel lift of a residual cycle to an exact cycle in the completion.

    The cycle must be purely periodic for the reduced map, consist of
    residue-field points (extension-field cycles are not supported), and
    carry a multiplier different from 1, so the fixed point of f^m is
    residually simple.  When the cycle passes through infinity the map
    is conjugated into a finite chart first; the chart is recorded.
    """
    if not f.good_reduction(P):
        raise BadReductionError(f"bad reduction at p={P.p}")
    h, _ = f.height_and_untwist(P)
    if h > 0:
        raise WildRegimeError(f"positive height {h} at p={P.p}")
    for pt in cycle:
        if pt != POINT_AT_INFINITY and pt.field != P.field:
            raise PreconditionError(
                "cycle lives in a residual extension field; lifting into "
                "unramified extensions of the completion is not supported")
    g, chart, _ = _prepare_chart(f, P, cycle)
    gbar = g.reduce(P)
    if chart.matrix is not None:
        red_cycle = []
        for pt in cycle:
            if pt == POINT_AT_INFINITY:
                red_cycle.append(gbar_image_of_infinity_chart(chart, P))
            else:
                red_cycle.append(_chart_image_residual(chart, pt, P))
        cycle = red_cycle
    m = len(cycle)
    # sanity: the cycle really is a cycle for the conjugated reduction
    for j, pt in enumerate(cycle):
        nxt = gbar.eval_point(pt)
        if nxt != cycle[(j + 1) % m]:
            raise PreconditionError("the given points are not a residual cycle")
    # multiplier of the m-th iterate along the cycle: prod (n'd - nd')/d^2
    Fq = P.field
    nbar = list(gbar.num.coeffs)
    dbar = list(gbar.den.coeffs)
    nbar_d = [nbar[i] * i for i in range(1, len(nbar))]
    dbar_d = [dbar[i] * i for i in range(1, len(dbar))]
    mult = Fq.one()
    one = Fq.one()
    for pt in cycle:
        dv = gbar.den.eval(pt, one)
        wv = (_ff_poly_eval(nbar_d, pt) * gbar.den.eval(pt, one)
              - gbar.num.eval(pt, one) * _ff_poly_eval(dbar_d, pt))
        mult = mult * wv / (dv * dv)
    if mult == Fq.one():
        raise PreconditionError(
            "indifferent residual cycle (multiplier 1): Hensel lifting of the "
            "periodic point is not available")
    la = P.approx(precision)
    num, den = _affine_ring_polys(g, la)
    num_d = _ring_poly_deriv(num, la)
    den_d = _ring_poly_deriv(den, la)

    x = la.lift_ff(cycle[0])
    for _ in range(precision.bit_length() + 3):
        # G(x) = g^m(x) - x;  G'(x) = multiplier - 1, a unit
        z = x
        deriv = la.one()
        for _ in range(m):
            dv = _ring_poly_eval(la, den, z)
            dinv = la.inv(dv)
            wv = la.sub(la.mul(_ring_poly_eval(la, num_d, z), dv),
                        la.mul(_ring_poly_eval(la, num, z),
                               _ring_poly_eval(la, den_d, z)))
            dval = la.mul(wv, la.mul(dinv, dinv))
            deriv = la.mul(deriv, dval)
            z = la.mul(_ring_poly_eval(la, num, z), dinv)
        gx = la.sub(z, x)
        if la.is_zero(gx):
            break
        corr = la.mul(gx, la.inv(la.sub(deriv, la.one())))
        x = la.sub(x, corr)
    else:
        raise PrecisionError("periodic point lift did not converge")
    lifts = [x]
    for _ in range(m - 1):
        lifts.append(_ring_map_eval(la, num, den, lifts[-1]))
    # closure check: f(A_{m-1}) = A_0 exactly at this precision
    if _ring_map_eval(la, num, den, lifts[-1]) != x:
        raise PrecisionError("lifted cycle failed to close up")
    return LiftedPoint(prime=P, ring=la, value=x, period=m, cycle_lifts=lifts,
                       chart=chart, sim_map=g)


def _chart_image_residual(chart: SimChart, pt, P: PrimeSpec):
    """Residual image of a finite residue point under the chart map."""
    (a, b), (c, d) = chart.matrix
    Fq = P.field
    ar, br = _reduce_chart_entry(a, P), _reduce_chart_entry(b, P)
    cr, dr = _reduce_chart_entry(c, P), _reduce_chart_entry(d, P)
    numv = ar * pt + br
    denv = cr * pt + dr
    if denv.is_zero():
        return POINT_AT_INFINITY
    return numv / denv


def gbar_image_of_infinity_chart(chart: SimChart, P: PrimeSpec):
    (a, b), (c, d) = chart.matrix
    ar, cr = _reduce_chart_entry(a, P), _reduce_chart_entry(c, P)
    if cr.is_zero():
        return POINT_AT_INFINITY
    return ar / cr


def _reduce_chart_entry(x: NFElem, P: PrimeSpec):
    Fq = P.field
    theta = Fq.gen()
    acc = Fq.zero()
    for coord in reversed(x.coords):
        acc = acc * theta + Fq(int(coord))
    return acc


# ---------------------------------------------------------------------------
# branch valuation simulation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BranchStep:
    """One backward step of the simulated branch."""

    level: int
    distance_valuation: Fraction
    absolute_valuation: object        # Fraction, or None when only bounded below
    certificate_denominator: int


@dataclass
class BranchSimRec:
    """Valuation trajectory of one branch and its growth law."""

    prime: PrimeSpec
    base_point: NFElem
    policy: str
    period: int                        # m, residual period of the base point
    ram_index: int                     # e, the cycle ramification index
    steps: list
    first_ramified_level: int | None
    onset_level: int | None            # delta_{n+m} = delta_n / e from here on
    exited: bool                       # the tracked branch left the unit disk
    exit_level: int | None
    chart: str
    level_multisets: list | None = None   # policy "all": per-level multisets

    def certificate_denominators(self):
        return [s.certificate_denominator for s in self.steps]


def _step_polygon_points(la: LocalApprox, Gcoeffs, dcoeffs, delta):
    """Exact polygon points of G(x) - w d(x) for v(w) = delta.

    Points whose two candidate heights tie are flagged; they sit at
    height >= delta and never support the contracting hull, and for
    polynomial maps they do not occur at all.
    """
    pts = [(0, Fraction(delta))]
    ambiguous = []
    degree = max(len(Gcoeffs), len(dcoeffs)) - 1
    for i in range(1, degree + 1):
        vg = la.val(Gcoeffs[i]) if i < len(Gcoeffs) else None
        vd = la.val(dcoeffs[i]) if i < len(dcoeffs) else None
        cand = []
        if vg is not None:
            cand.append(Fraction(vg))
        if vd is not None:
            cand.append(delta + vd)
        if not cand:
            continue
        v = min(cand)
        if len(cand) == 2 and cand[0] == cand[1]:
            ambiguous.append(i)
        pts.append((i, v))
    return pts, ambiguous


def branch_valuations(f: RationalMap, P: PrimeSpec, alpha0: NFElem, depth: int,
                      policy: str = "nearest",
                      precision: int = DEFAULT_SIM_PRECISION) -> BranchSimRec:
    """Simulate the valuation trajectory of a branch over alpha0.

    The base point must reduce onto a purely periodic residual cycle
    (the op computes the residual orbit itself); base points with a
    residual tail never reach a cycle backwards and their branches are
    handled by the exact oracle instead.  Policies: "nearest" follows
    the preimage closest to the cycle (maximal distance valuation),
    "farthest" the minimal one, "all" tracks the full valuation tree
    (polynomial maps only, where every polygon point is exact).
    """
    if policy not in ("nearest", "farthest", "all"):
        raise ValueError(f"unknown policy {policy!r}")
    if not f.good_reduction(P):
        raise BadReductionError(f"bad reduction at p={P.p}")
    h, _ = f.height_and_untwist(P)
    if h > 0:
        raise WildRegimeError(f"positive height {h} at p={P.p}: wild regime")
    red = reduce_point(alpha0, P)
    orbit = residual_orbit(f.reduce(P), red)
    if not orbit.purely_periodic:
        raise PreconditionError(
            "base point is not residually periodic: its backward orbit never "
            "meets a cycle, every branch is eventually stepwise simple; use "
            "iterate_valuation_oracle for exact per-level data")
    if policy == "all" and not f.is_polynomial():
        raise PreconditionError(
            "the full valuation tree is only exact for polynomial maps; "
            "use policies nearest/farthest or the oracle")
    lift = lift_periodic_point(f, P, orbit.cycle, precision)
    la = lift.ring
    g = lift.sim_map
    m = lift.period
    num, den = _affine_ring_polys(g, la)

    if lift.chart.matrix is None:
        alpha_sim = alpha0
    else:
        _, _, transform = _prepare_chart(f, P, orbit.cycle)
        alpha_sim = transform(alpha0)

    a0 = la.embed_nf(alpha_sim)
    delta0 = la.val(la.sub(a0, lift.value))
    if delta0 is None:
        raise PrecisionError(
            "base point is periodic to working precision: the branch through "
            "the cycle is trivial; raise the precision or move the base point",
            lower_bound=la.B)

    # step data around each cycle point: G_j and d_j by Taylor shift
    Gs, ds, wdegs = [], [], []
    for j in range(m):
        Aj = lift.cycle_lifts[j]
        Anext = lift.cycle_lifts[(j + 1) % m]
        n_sh = _ring_taylor_shift(la, num, Aj)
        d_sh = _ring_taylor_shift(la, den, Aj)
        G = [la.sub(a, la.mul(Anext, b)) for a, b in
             zip(n_sh, d_sh + [la.zero()] * (len(n_sh) - len(d_sh)))]
        if not la.is_zero(G[0]):
            raise PrecisionError("step series has a nonzero constant term")
        Gs.append(G)
        ds.append(d_sh)
        wdegs.append(_ring_wdeg(la, G))
    e_cycle = 1
    for w in wdegs:
        e_cycle *= w
    # cross-check against the reduced-map local degrees
    assert e_cycle == branch_ram_index(f, P, orbit.cycle)

    steps = [BranchStep(level=0, distance_valuation=Fraction(delta0),
                        absolute_valuation=_abs_val(la, lift.cycle_lifts[0], Fraction(delta0)),
                        certificate_denominator=1)]
    multisets = [[(Fraction(delta0), 1)]] if policy == "all" else None

    if policy == "all":
        lanes = {Fraction(delta0): 1}
        for n in range(1, depth + 1):
            new_lanes = {}
            j = (-n) % m
            for dv, count in lanes.items():
                pts, _amb = _step_polygon_points(la, Gs[j], ds[j], dv)
                poly = newton_polygon([_pts_to_vals(pts, i) for i in
                                       range(max(q[0] for q in pts) + 1)])
                for rv in poly.root_valuations():
                    new_lanes[rv] = new_lanes.get(rv, 0) + count
            lanes = new_lanes
            multisets.append(sorted(lanes.items()))
        rec_steps = steps
    else:
        dv = Fraction(delta0)
        exited = False
        exit_level = None
        rec_steps = steps
        for n in range(1, depth + 1):
            j = (-n) % m
            pts, _amb = _step_polygon_points(la, Gs[j], ds[j], dv)
            poly = newton_polygon([_pts_to_vals(pts, i) for i in
                                   range(max(p[0] for p in pts) + 1)])
            roots = poly.root_valuations()
            dv = max(roots) if policy == "nearest" else min(roots)
            if dv <= 0:
                exited = True
                exit_level = n
                rec_steps.append(BranchStep(level=n, distance_valuation=dv,
                                            absolute_valuation=None,
                                            certificate_denominator=dv.denominator))
                break
            _check_precision_margin(la, dv)
            rec_steps.append(BranchStep(
                level=n, distance_valuation=dv,
                absolute_valuation=_abs_val(la, lift.cycle_lifts[j], dv),
                certificate_denominator=dv.denominator))
        else:
            exited = False
            exit_level = None

    if policy == "all":
        exited, exit_level = False, None
        deltas = None
    else:
        deltas = [s.distance_valuation for s in rec_steps]

    first_ram = None
    if deltas is not None:
        for s in rec_steps:
            if s.certificate_denominator > 1:
                first_ram = s.level
                break
        onset = _detect_onset(deltas, m, e_cycle)
    else:
        onset = None

    return BranchSimRec(prime=P, base_point=alpha0, policy=policy, period=m,
                        ram_index=e_cycle, steps=rec_steps,
                        first_ramified_level=first_ram, onset_level=onset,
                        exited=exited, exit_level=exit_level,
                        chart=lift.chart.describe(), level_multisets=multisets)


def _pts_to_vals(pts, i):
    for j, v in pts:
        if j == i:
            return v
    return INF


def _abs_val(la: LocalApprox, Aj, delta):
    """v(alpha) = min(delta, v(A_j)) when they differ; None when tied."""
    va = la.val(Aj)
    va = Fraction(va) if va is not None else None
    if va is None:
        return delta
    if va != delta:
        return min(va, delta)
    return None


def _check_precision_margin(la: LocalApprox, dv: Fraction):
    if dv >= Fraction(la.B, 2):
        raise PrecisionError("distance valuation too close to working precision",
                             lower_bound=int(dv))


def _ring_taylor_shift(la: LocalApprox, coeffs, a):
    """Coefficients of P(x + a), by Horner in (x + a)."""
    out = [la.zero()] * len(coeffs)
    for c in reversed(coeffs):
        # out <- out * (x + a) + c
        prev = out[:-1]
        shifted = [la.zero()] + prev
        scaled = [la.mul(t, a) for t in out]
        out = [la.add(s, t) for s, t in zip(shifted, scaled)]
        out[0] = la.add(out[0], c)
    return out


def _ring_wdeg(la: LocalApprox, coeffs):
    for i, c in enumerate(coeffs):
        v = la.val(c)
        if v == 0:
            return i
    raise PrecisionError("no unit coefficient in the step series")


def _detect_onset(deltas, m, e):
    """Least n with delta_{k+m} = delta_k / e for every later recorded k."""
    limit = len(deltas) - m
    if limit <= 0:
        return None
    onset = None
    for n in range(limit - 1, -1, -1):
        if deltas[n + m] == Fraction(deltas[n], 1) / e:
            onset = n
        else:
            break
    return onset


# ---------------------------------------------------------------------------
# exact oracle: full preimage valuation multisets by brute force
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OracleResult:
    """Root-valuation multiset of f^n(shift + x) = alpha0."""

    valuations: tuple          # finite distance valuations, sorted
    center_hits: int           # preimages equal to the center (valuation +inf)
    infinite_preimages: int    # preimages at the point at infinity

    def multiset(self):
        return list(self.valuations)


def iterate_valuation_oracle(f: RationalMap, P: PrimeSpec, alpha0: NFElem, n: int,
                             shift=None, degree_cap: int = ORACLE_DEGREE_CAP) -> OracleResult:
    """Exact multiset of v(alpha_n - shift) over all depth-n preimages.

    Brute force: composes f^n over K, forms the numerator of
    f^n(shift + x) - alpha0 and reads the Newton polygon.  `shift` is an
    element of K or a ring element from a LiftedPoint (matching P).
    """
    if f.degree ** n > degree_cap:
        raise ResourceCapError(f"degree {f.degree}^{n} exceeds the oracle cap {degree_cap}")
    fn = f.iterate(n)
    K = f.field
    num_c = list(fn.num.coeffs)
    den_c = list(fn.den.coeffs)
    H = [a - alpha0 * b for a, b in zip(num_c, den_c)]
    while H and H[-1].is_zero():
        H.pop()
    if not H:
        raise PreconditionError("alpha0 is a totally invariant value of the map")
    inf_count = f.degree ** n - (len(H) - 1)
    if shift is None or (isinstance(shift, NFElem) and shift.is_zero()):
        vals = [valuation(c, P) for c in H]
    elif isinstance(shift, NFElem):
        from arbor.algebra.numberfield import k_add
        acc = []
        for c in reversed(H):
            acc = k_add(_k_mul_linear(acc, shift, K), [c])
        vals = [valuation(c, P) if not c.is_zero() else INF for c in acc]
        vals += [INF] * (len(H) - len(acc))
    else:
        # ring-element shift: clear denominators (polygon slopes are
        # scale-invariant) and do the Taylor shift in the ring
        la = P.approx(DEFAULT_SIM_PRECISION)
        if len(shift) != la.deg:
            raise ValueError("shift does not match the prime's completion")
        den_lcm = 1
        for c in H:
            d = c.denominator_lcm()
            den_lcm = den_lcm * d // math.gcd(den_lcm, d)
        ints = [[int(x * den_lcm) for x in c.coords] for c in H]
        ring_coeffs = [la.embed_int_poly(cs) for cs in ints]
        shifted = _ring_taylor_shift(la, ring_coeffs, tuple(shift))
        vals = []
        vden = 0
        d = den_lcm
        while d % P.p == 0:
            d //= P.p
            vden += 1
        for c in shifted:
            v = la.val(c)
            vals.append(INF if v is None else Fraction(v - vden))
    poly = newton_polygon(vals)
    roots = sorted(poly.root_valuations())
    return OracleResult(valuations=tuple(roots), center_hits=poly.zero_order,
                        infinite_preimages=inf_count)


def _k_mul_linear(poly, a, K):
    """poly * (x + a) over K (ascending coefficient lists)."""
    if not poly:
        return []
    out = [K.zero()] + list(poly)
    for i in range(len(poly)):
        out[i] = out[i] + poly[i] * a
    return out


# ---------------------------------------------------------------------------
# series-level simulation (single power series around an exact fixed point)
# ---------------------------------------------------------------------------

def series_branch_valuations(coeff_valuations, delta0, depth, policy="nearest"):
    """Distance-valuation trajectory for a series g with g(0) = 0.

    `coeff_valuations` lists v(g_i) for i = 0, 1, ... (index 0 must be
    infinite); the backward recursion applies the polygon of g - w at
    each level.  Returns the list [delta_0, ..., delta_depth].
    """
    if coeff_valuations[0] != INF:
        raise ValueError("the series must vanish at the expansion point")
    deltas = [Fraction(delta0)]
    for _ in range(depth):
        pts = [Fraction(deltas[-1]) if i == 0 else v
               for i, v in enumerate(coeff_valuations)]
        poly = newton_polygon(pts)
        roots = poly.root_valuations()
        nxt = max(roots) if policy == "nearest" else min(roots)
        if nxt <= 0:
            deltas.append(nxt)
            break
        deltas.append(nxt)
    return deltas


# ---------------------------------------------------------------------------
# tame uniform bound
# ---------------------------------------------------------------------------

def tame_bound_check(f: RationalMap, P: PrimeSpec, sim: BranchSimRec) -> bool:
    """Do all certificate denominators divide (d!)^(2d-2)?

    Meaningful under the tame convention p > d with no directed cycle,
    where the ramification of every branch is uniformly bounded.
    """
    d = f.degree
    if P.p <= d:
        raise PreconditionError("tame bound requires p > deg f")
    has_cycle, _ = directed_cycle_witness(f, P)
    if has_cycle:
        raise PreconditionError("tame bound requires no directed cycle")
    bound = math.factorial(d) ** (2 * d - 2)
    return all(bound % c == 0 for c in sim.certificate_denominators())


# ---------------------------------------------------------------------------
# post-critically finite maps
# ---------------------------------------------------------------------------

@dataclass
class CriticalOrbit:
    """Forward orbit data of one critical point (or conjugate cluster)."""

    label: str
    rational: bool
    points: list               # K-points ("inf" allowed) or cluster forms
    preperiod: int | None
    period: int | None
    finite: bool


@dataclass
class PCFCore:
    pcf: bool
    conclusive: bool
    orbits: list
    postcritical_size: int | None


def _rational_critical_points(f: RationalMap):
    """Split the critical support into K-rational points and clusters.

    Extracts the monomial roots 0 and infinity, any remaining linear
    factor, and (over Q) rational roots; what is left stays a conjugate
    cluster handled at the form level, so no number-field factorization
    is ever attempted.
    """
    K = f.field
    S = f.critical_data().support_form
    points = []
    b = S.order_at_zero()
    a = S.order_at_infinity()
    if b:
        points.append(K.zero())
    if a:
        points.append(POINT_AT_INFINITY)
    core = [S.coeffs[i] for i in range(b, S.degree - a + 1)]
    # rational roots over Q itself
    if K.degree == 1 and len(core) > 1:
        qcore = [c.coords[0] for c in core]
        den = 1
        for c in qcore:
            den = den * c.denominator // math.gcd(den, c.denominator)
        zcore = [int(c * den) for c in qcore]
        for r in _int_poly_rational_roots(zcore):
            points.append(K(r))
            core = _k_divide_linear(core, K(r), K)
    if len(core) == 2:
        points.append(-core[0] / core[1])
        core = [K.one()]
    cluster = None
    if len(core) > 2:
        deg = len(core) - 1
        cluster = bf.normalize(BinaryForm(K, core, deg))
    return points, cluster


def _int_poly_rational_roots(zpoly):
    """Rational roots of an integer polynomial (used over Q only)."""
    from fractions import Fraction as Fr
    while zpoly and zpoly[0] == 0:
        zpoly = zpoly[1:]
    if not zpoly or len(zpoly) == 1:
        return []
    a0, an = abs(zpoly[0]), abs(zpoly[-1])
    roots = []
    for pnum in _divisors(a0):
        for pden in _divisors(an):
            for sign in (1, -1):
                cand = Fr(sign * pnum, pden)
                acc = Fr(0)
                for c in reversed(zpoly):
                    acc = acc * cand + c
                if acc == 0 and cand not in roots:
                    roots.append(cand)
    return sorted(roots)


def _divisors(n):
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            if d != n // d:
                out.append(n // d)
        d += 1
    return sorted(out)


def _k_divide_linear(core, root, K):
    """core / (x - root), exact."""
    from arbor.algebra.numberfield import k_divmod
    quo, rem = k_divmod(core, [-root, K.one()])
    assert not rem
    return quo


def _point_form(x, K) -> BinaryForm:
    """Normalized degree-1 form vanishing at the point."""
    if x == POINT_AT_INFINITY:
        return BinaryForm(K, [K.one(), K.zero()], 1)  # the form Y
    return bf.normalize(BinaryForm(K, [-x, K.one()], 1))


def _pushforward_form(B: BinaryForm, f: RationalMap) -> BinaryForm:
    """Form whose roots are the f-images of the roots of B (with inf).

    Sampled as x -> res(B, x den - num) and interpolated; the binary
    resultant pushes roots at infinity along automatically.
    """
    K = f.field
    b = B.degree
    samples = []
    for k in range(b + 1):
        x0 = K(k)
        G = BinaryForm(K, [x0 * c - d for c, d in zip(f.den.coeffs, f.num.coeffs)],
                       f.degree)
        samples.append((Fraction(k), bf.resultant(B, G)))
    coeffs = _k_lagrange(samples, K, b)
    return bf.normalize(BinaryForm(K, coeffs, b))


def _k_lagrange(samples, K, degree):
    """Interpolating coefficients (ascending) through (x_i, y_i) over K."""
    n = len(samples)
    coeffs = [K.zero()] * n
    for i, (xi, yi) in enumerate(samples):
        basis = [K.one()]
        denom = Fraction(1)
        for j, (xj, _) in enumerate(samples):
            if i == j:
                continue
            basis = _k_mul_linear(basis, K(-xj), K)
            denom *= xi - xj
        scale = yi * K(Fraction(1, 1) / denom)
        for k in range(len(basis)):
            coeffs[k] = coeffs[k] + basis[k] * scale
    return coeffs[:degree + 1]


MAX_ORBIT_BITS = 100000


def pcf_check(f: RationalMap, step_cap: int = 64) -> PCFCore:
    """Decide post-critical finiteness by exact forward iteration.

    Rational critical points are iterated as K-points with exact
    equality detection; conjugate clusters are iterated as squarefree
    image forms, whose repetition certifies a finite orbit.  Exceeding
    the step or coefficient-size cap yields an explicit inconclusive
    verdict, never a guess.
    """
    points, cluster = _rational_critical_points(f)
    orbits = []
    pcf = True
    conclusive = True
    post = set()
    for c in points:
        orbit = [c]
        seen = {_point_key(c): 0}
        pre = per = None
        for n in range(1, step_cap + 1):
            nxt = f.eval_point(orbit[-1])
            key = _point_key(nxt)
            if key in seen:
                pre = seen[key]
                per = n - seen[key]
                break
            if _point_bits(nxt) > MAX_ORBIT_BITS:
                break
            seen[key] = n
            orbit.append(nxt)
        finite = per is not None
        if not finite:
            pcf = False
            conclusive = conclusive and False
        label = "inf" if c == POINT_AT_INFINITY else _nf_text(c)
        orbits.append(CriticalOrbit(label=label, rational=True, points=orbit,
                                    preperiod=pre, period=per, finite=finite))
        if finite:
            for q in orbit[1:] + [f.eval_point(orbit[-1])]:
                post.add(_point_key(q))
    if cluster is not None:
        forms = [cluster]
        seen = {cluster.coeffs: 0}
        pre = per = None
        for n in range(1, step_cap + 1):
            nxt = bf.normalize(bf.squarefree_part(_pushforward_form(forms[-1], f)))
            if nxt.coeffs in seen:
                pre = seen[nxt.coeffs]
                per = n - seen[nxt.coeffs]
                break
            if _form_bits(nxt) > MAX_ORBIT_BITS:
                break
            seen[nxt.coeffs] = n
            forms.append(nxt)
        finite = per is not None
        if not finite:
            pcf = False
            conclusive = conclusive and False
        orbits.append(CriticalOrbit(label=f"cluster[deg {cluster.degree}]",
                                    rational=False, points=forms, preperiod=pre,
                                    period=per, finite=finite))
        if finite:
            for F in forms[1:]:
                post.add(F.coeffs)
    size = len(post) if pcf else None
    return PCFCore(pcf=pcf, conclusive=conclusive or pcf, orbits=orbits,
                   postcritical_size=size)


def _point_key(x):
    return x if x == POINT_AT_INFINITY else x.coords


def _point_bits(x):
    if x == POINT_AT_INFINITY:
        return 0
    return sum(c.numerator.bit_length() + c.denominator.bit_length() for c in x.coords)


def _form_bits(F):
    return sum(_point_bits(c) for c in F.coeffs)


def _nf_text(x: NFElem) -> str:
    return "[" + ",".join(str(c) for c in x.coords) + "]"


# ---------------------------------------------------------------------------
# PCF prime enumeration
# ---------------------------------------------------------------------------

@dataclass
class DeltaEntry:
    """One member c - f^n(c) of the difference set, as a projective resultant."""

    critical_label: str
    n: int
    value: NFElem              # res(point form of c, point form of f^n(c))
    is_zero: bool
    norm: Fraction | None
    factors: zz.IntFactors | None


@dataclass
class PCFReport:
    core: PCFCore
    delta_entries: list
    ramified_primes: list          # rational primes from nonzero entries
    all_primes_for_some_base: bool # some zero entry (periodic critical point)
    wild_primes: list              # p <= deg f or p | disc(min_poly)
    wild_infinitely_ramified: bool # PCF polynomial of prime-power degree
    base_field_warnings: list      # primes dividing disc(min_poly)


def pcf_primes(f: RationalMap, step_cap: int = 64,
               factor_budget: int = zz.DEFAULT_BUDGET) -> PCFReport:
    """The finite difference set of a PCF map and the primes it cuts out.

    Nonzero members are converted to rational primes through norms and
    integer factorization; zero members (periodic critical points) are
    flagged: every height-zero good prime then carries an infinitely
    ramified representation for a suitable base point.  Wild primes
    (p <= d, or p dividing disc of the base field) are listed apart; for
    PCF polynomials of prime-power degree they are all infinitely
    (wildly) ramified.
    """
    core = pcf_check(f, step_cap)
    if not core.pcf:
        raise PreconditionError("map is not post-critically finite (or cap hit)")
    K = f.field
    entries = []
    primes = set()
    any_zero = False
    for orb in core.orbits:
        if not orb.rational:
            # conjugate cluster: aggregate via resultants of cluster forms
            forms = orb.points
            for n in range(1, len(forms)):
                val = bf.resultant(forms[0], forms[n])
                is_zero = val.is_zero()
                entry = DeltaEntry(critical_label=orb.label, n=n, value=val,
                                   is_zero=is_zero,
                                   norm=None if is_zero else val.norm(),
                                   factors=None)
                if not is_zero:
                    nrm = entry.norm
                    assert nrm.denominator == 1
                    entry.factors = zz.factor_integer(int(nrm), factor_budget)
                    primes.update(entry.factors.primes())
                else:
                    any_zero = True
                entries.append(entry)
            continue
        c = orb.points[0]
        cform = _point_form(c, K)
        # the orbit is eventually periodic; n beyond preperiod+period repeats
        horizon = (orb.preperiod or 0) + (orb.period or 1)
        value_pt = c
        for n in range(1, horizon + 1):
            value_pt = f.eval_point(value_pt)
            val = bf.resultant(cform, _point_form(value_pt, K))
            is_zero = val.is_zero()
            entry = DeltaEntry(critical_label=orb.label, n=n, value=val,
                               is_zero=is_zero,
                               norm=None if is_zero else val.norm(),
                               factors=None)
            if is_zero:
                any_zero = True
            else:
                nrm = entry.norm
                assert nrm.denominator == 1
                entry.factors = zz.factor_integer(nrm.numerator, factor_budget)
                primes.update(entry.factors.primes())
            entries.append(entry)
    d = f.degree
    wild = sorted(set(p for p in zz.primes_up_to(d)))
    disc = abs(f.field.discriminant())
    base_warn = []
    if disc > 1:
        base_warn = zz.factor_integer(disc, factor_budget).primes()
    wild_flag = f.is_polynomial() and _is_prime_power(d)
    ram = sorted(p for p in primes if p not in set(wild) and p not in set(base_warn))
    return PCFReport(core=core, delta_entries=entries, ramified_primes=ram,
                     all_primes_for_some_base=any_zero,
                     wild_primes=wild, wild_infinitely_ramified=wild_flag,
                     base_field_warnings=sorted(base_warn))


def _is_prime_power(n: int) -> bool:
    for p in zz.primes_up_to(n):
        if n % p == 0:
            while n % p == 0:
                n //= p
            return n == 1
    return False


# ---------------------------------------------------------------------------
# base point verdicts and scans
# ---------------------------------------------------------------------------

VERDICT_INF_RAMIFIED = "INF_RAMIFIED"
VERDICT_NOT_INF = "NO_INF_RAMIFICATION"
VERDICT_WILD = "WILD_REGIME"
VERDICT_BAD = "BAD_REDUCTION"


@dataclass(frozen=True)
class BasepointVerdict:
    verdict: str
    cycle_witness: tuple = ()


def basepoint_verdict(f: RationalMap, alpha0: NFElem, P: PrimeSpec) -> BasepointVerdict:
    """Is the branch representation over alpha0 infinitely ramified at P?

    Criterion at height zero: some residual critical point is purely
    periodic and the reduction of alpha0 lies on its cycle.
    """
    if not f.good_reduction(P):
        return BasepointVerdict(VERDICT_BAD)
    h, _ = f.height_and_untwist(P)
    if h > 0:
        return BasepointVerdict(VERDICT_WILD)
    red = reduce_point(alpha0, P)
    for cycle in critical_cycles(f, P):
        if any(red == pt for pt in cycle):
            return BasepointVerdict(VERDICT_INF_RAMIFIED, cycle_witness=cycle)
    return BasepointVerdict(VERDICT_NOT_INF)


@dataclass
class ScanRow:
    p: int
    prime: PrimeSpec | None
    note: str = ""
    good_reduction: bool | None = None
    height: int | None = None
    tame: bool | None = None
    directed_cycle: bool | None = None
    cycle_witness: tuple = ()
    collision_depth: int | None = None
    verdict: str | None = None


@dataclass
class ScanReport:
    base_point: NFElem
    p_max: int
    depth: int
    rows: list

    def inf_ramified_primes(self):
        return sorted({r.p for r in self.rows if r.verdict == VERDICT_INF_RAMIFIED})


def scan(f: RationalMap, alpha0: NFElem, p_max: int, depth: int = 2) -> ScanReport:
    """Verdict rows for every prime of K over every rational p <= p_max.

    Primes dividing disc(min_poly) are marked and skipped; rows are
    deterministic and ordered by (p, factor).
    """
    K = f.field
    rows = []
    for p in zz.primes_up_to(p_max):
        try:
            primes = primes_above(K, p)
        except RamifiedBasePrimeError:
            rows.append(ScanRow(p=p, prime=None,
                                note="divides disc(min_poly): skipped"))
            continue
        for P in primes:
            row = ScanRow(p=p, prime=P)
            row.good_reduction = f.good_reduction(P)
            if not row.good_reduction:
                row.verdict = VERDICT_BAD
                rows.append(row)
                continue
            h, _ = f.height_and_untwist(P)
            row.height = h
            row.tame = p > f.degree
            coll = has_collision(f, P, depth)
            row.collision_depth = coll.depth if coll.collided else None
            if h > 0:
                row.verdict = VERDICT_WILD
                rows.append(row)
                continue
            has_cycle, witness = _cycle_for_scan(f, P)
            row.directed_cycle = has_cycle
            row.cycle_witness = witness
            row.verdict = basepoint_verdict(f, alpha0, P).verdict
            rows.append(row)
    return ScanReport(base_point=alpha0, p_max=p_max, depth=depth, rows=rows)


def _cycle_for_scan(f, P):
    return directed_cycle_witness(f, P)


# ---------------------------------------------------------------------------
# sparseness of common prime divisors (post-critically infinite evidence)
# ---------------------------------------------------------------------------

@dataclass
class SparsenessHit:
    p: int
    n: int                 # witness in the orbit-return family
    m: int                 # witness in the base-point family


def sparseness_scan(f: RationalMap, c, alpha0: NFElem, p_max: int,
                    depth: int = 16) -> list:
    """Primes <= p_max dividing a member of both difference families.

    The families are the orbit returns f^n(c) - c and the base-point
    differences f^m(c) - alpha0 (projective resultants, so values at
    infinity are handled); each hit carries the first witnesses (n, m).
    """
    K = f.field
    cform = _point_form(c, K)
    aform = _point_form(alpha0, K)
    first_a = {}
    first_b = {}
    value_pt = c
    for n in range(1, depth + 1):
        value_pt = f.eval_point(value_pt)
        vform = _point_form(value_pt, K)
        ra = bf.resultant(vform, cform)
        rb = bf.resultant(vform, aform)
        for res, store in ((ra, first_a), (rb, first_b)):
            if res.is_zero():
                # periodic return or orbit hit: every prime divides; record 0
                store.setdefault(0, n)
                continue
            nrm = res.norm()
            assert nrm.denominator == 1
            for p, _e in zz.factor_integer(nrm.numerator).factors:
                if p <= p_max:
                    store.setdefault(p, n)
    hits = []
    zero_a = first_a.get(0)
    zero_b = first_b.get(0)
    for p in sorted(set(first_a) | set(first_b)):
        if p == 0:
            continue
        na = first_a.get(p, zero_a)
        mb = first_b.get(p, zero_b)
        if na is not None and mb is not None:
            hits.append(SparsenessHit(p=p, n=na, m=mb))
    if zero_a is not None and zero_b is not None:
        # both families vanish somewhere: every prime <= p_max qualifies
        present = {h.p for h in hits}
        for p in zz.primes_up_to(p_max):
            if p not in present:
                hits.append(SparsenessHit(p=p, n=zero_a, m=zero_b))
        hits.sort(key=lambda h: h.p)
    return hits
