"""Incidence portraits of the pre-critical locus at a prime.

To finite depth N the pre-critical locus is the zero set of the
cumulative form: the squarefree product of the pullbacks of the
critical support form under the first N iterates.  The cumulative form
is assembled from pairwise-coprime level increments M_0, ..., M_N (the
points that first appear at each level), which makes the two collision
detectors exactly equivalent:

    v_P(disc(cumulative)) > 0
        <=>  v_P(disc(M_k)) > 0 for some k, or
             v_P(res(M_j, M_k)) > 0 for some j < k,

because disc(AB) = disc(A) disc(B) res(A, B)^2.  Both are computed and
must agree.  Directed cycles are decided exactly (not depth-truncated)
by testing each residual critical point for pure periodicity, in the
extension field it generates.

Vertices of the portrait are residual: irreducible factors of the
reduced cumulative form over the residue field, plus the infinity
marker, tagged with the level at which they first appear.
"""

from __future__ import annotations

from dataclasses import dataclass

from arbor.algebra import binforms as bf
from arbor.algebra import finitefield as ff
from arbor.algebra.binforms import BinaryForm
from arbor.algebra.finitefield import FFElem, FiniteField
from arbor.dynamics import RationalMap, ReducedMap, residual_orbit
from arbor.errors import (
    BadReductionError,
    PoweringMapError,
    ResourceCapError,
    WildRegimeError,
)
from arbor.localdata import POINT_AT_INFINITY as INF_POINT
from arbor.localdata import PrimeSpec, valuation

DEFAULT_DEPTH = 6
MAX_FORM_DEGREE = 4096


# ---------------------------------------------------------------------------
# level forms over K
# ---------------------------------------------------------------------------

@dataclass
class LevelFormRec:
    """Depth-N pre-critical data over K.

    `increments[k]` is the squarefree form of the points first appearing
    at level k; `cumulative_form` is their (squarefree) product.  The
    discriminants of the increments, their pairwise resultants and the
    discriminant of the cumulative form are kept because collision
    detection at every prime reads valuations off these field elements.
    """

    depth: int
    cumulative_form: BinaryForm
    increments: list
    cumulative_prefix: list          # cumulative form at each depth 0..N
    disc_increments: list            # disc(M_k), or 1 when deg < 2
    cross_resultants: dict           # (j, k) -> res(M_j, M_k), j < k
    disc_prefix: list                # disc(cumulative at depth k)


def _form_exact_div(F: BinaryForm, G: BinaryForm) -> BinaryForm:
    """F / G for binary forms with G | F."""
    from arbor.algebra.numberfield import k_divmod, k_trim

    a_f, b_f = F.order_at_infinity(), F.order_at_zero()
    a_g, b_g = G.order_at_infinity(), G.order_at_zero()
    core_f = [F.coeffs[i] for i in range(b_f, F.degree - a_f + 1)]
    core_g = [G.coeffs[i] for i in range(b_g, G.degree - a_g + 1)]
    quo, rem = k_divmod(core_f, core_g)
    if rem:
        raise ArithmeticError("inexact binary form division")
    deg = F.degree - G.degree
    out = [F.field(0)] * (deg + 1)
    for i, c in enumerate(quo):
        out[b_f - b_g + i] = c
    return BinaryForm(F.field, out, deg)


def _form_gcd(F: BinaryForm, G: BinaryForm) -> BinaryForm:
    from arbor.algebra.numberfield import k_gcd

    a = min(F.order_at_infinity(), G.order_at_infinity())
    b = min(F.order_at_zero(), G.order_at_zero())
    core_f = [F.coeffs[i] for i in range(F.order_at_zero(), F.degree - F.order_at_infinity() + 1)]
    core_g = [G.coeffs[i] for i in range(G.order_at_zero(), G.degree - G.order_at_infinity() + 1)]
    core = k_gcd(core_f, core_g)
    deg = (len(core) - 1) + a + b
    out = [F.field(0)] * (deg + 1)
    for i, c in enumerate(core):
        out[b + i] = c
    return BinaryForm(F.field, out, deg)


def precritical_form(f: RationalMap, depth: int,
                     max_degree: int = MAX_FORM_DEGREE) -> LevelFormRec:
    """Cumulative pre-critical form to the given depth.

    Degree grows like O(d^N); the resource cap guards runaway requests.
    Powering maps, whose pre-critical locus never reaches three points,
    are rejected.
    """
    cached = getattr(f, "_precritical_cache", None)
    if cached is None:
        cached = {}
        f._precritical_cache = cached
    if depth in cached:
        return cached[depth]
    support = f.critical_data().support_form
    K = f.field
    increments = []
    cumulative = None
    cumulative_prefix = []
    disc_increments = []
    cross = {}
    disc_prefix = []
    for k in range(depth + 1):
        if support.degree * (f.degree ** k) > max_degree:
            raise ResourceCapError(
                f"level-{k} form degree exceeds the cap {max_degree}")
        if k == 0:
            level = support
        else:
            fk = f.iterate(k)
            level = bf.squarefree_part(bf.compose_pair(support, fk.num, fk.den))
        if cumulative is None:
            inc = bf.normalize(level)
            cumulative = inc
        else:
            g = _form_gcd(level, cumulative)
            inc = level if g.degree == 0 else _form_exact_div(level, g)
            inc = bf.normalize(inc) if not _is_constant(inc) else inc
            cumulative = bf.normalize(cumulative * inc)
        increments.append(inc)
        cumulative_prefix.append(cumulative)
        disc_increments.append(
            bf.discriminant(inc) if inc.degree >= 2 else K.one())
        for j in range(k):
            cross[(j, k)] = bf.resultant(increments[j], inc) if inc.degree >= 1 else K.one()
        disc_prefix.append(
            bf.discriminant(cumulative) if cumulative.degree >= 2 else K.one())
        if k >= 1 and cumulative.degree < 3:
            raise PoweringMapError(
                "pre-critical support stays below three points: powering map")
    rec = LevelFormRec(depth=depth, cumulative_form=cumulative,
                       increments=increments, cumulative_prefix=cumulative_prefix,
                       disc_increments=disc_increments, cross_resultants=cross,
                       disc_prefix=disc_prefix)
    cached[depth] = rec
    return rec


def _is_constant(F: BinaryForm) -> bool:
    return F.degree == 0


# ---------------------------------------------------------------------------
# reduction of forms and vertex bookkeeping
# ---------------------------------------------------------------------------

def reduce_form(F: BinaryForm, P: PrimeSpec) -> BinaryForm:
    """Coefficient-wise reduction of an integrally normalized form."""
    Fq = P.field
    theta = Fq.gen()
    out = []
    for c in F.coeffs:
        acc = Fq.zero()
        for coord in reversed(c.coords):
            if coord.denominator != 1:
                raise ValueError("form is not integrally normalized")
            acc = acc * theta + Fq(int(coord))
        out.append(acc)
    return BinaryForm(Fq, out, F.degree)


def _elem_text(x: FFElem) -> str:
    key = x.field.element_key(x)
    if len(key) == 1:
        return str(key[0])
    return "[" + ",".join(str(v) for v in key) + "]"


def _factor_text(poly) -> str:
    """Label for a monic irreducible: the root for degree one (what the
    vertex actually is), the polynomial text for higher degree."""
    if len(poly) == 2:
        return _elem_text(-poly[0] / poly[1])
    terms = []
    for i in range(len(poly) - 1, -1, -1):
        c = poly[i]
        if c.is_zero():
            continue
        if i == 0:
            terms.append(_elem_text(c))
        else:
            xpow = "x" if i == 1 else f"x^{i}"
            if c == c.field.one():
                terms.append(xpow)
            else:
                terms.append(f"{_elem_text(c)}*{xpow}")
    return "+".join(terms) if terms else "0"


@dataclass(frozen=True)
class Vertex:
    """A residual point class: an irreducible factor or infinity."""

    is_infinity: bool
    factor: tuple          # factor coefficients as a tuple (empty for infinity)
    label: str
    level: int
    multiplicity: int

    def sort_key(self):
        if self.is_infinity:
            return (self.level, -1, ())
        enc = tuple(c.field.element_key(c) for c in self.factor)
        return (self.level, len(self.factor) - 1, enc)


@dataclass
class PortraitRec:
    """The depth-N incidence portrait of a map at a prime."""

    prime: PrimeSpec
    depth: int
    vertices: list                    # sorted Vertex records
    directed_edges: list              # (from_index, to_index)
    has_directed_cycle: bool
    directed_cycle_witness: tuple     # residual cycle points (possibly empty)
    has_collision_up_to_depth: bool
    collision_depth: int | None
    collision_witnesses: list         # vertex indices with multiplicity > 1
    tame: bool                        # p > deg f
    height: int
    level_forms: LevelFormRec

    @property
    def collision_count(self):
        return {i: v.multiplicity - 1 for i, v in enumerate(self.vertices)}


def _minpoly_over_base(w: FFElem, base: FiniteField):
    """Monic minimal polynomial over `base` of an element of a tower."""
    T = w.field
    if T == base:
        return (-w, base.one())
    if T.base != base:
        raise ValueError("element does not lie in a tower over the base")
    s = T.degree
    # rows: coordinates of w^0, ..., w^k over the base until dependent
    pows = [T.one()]
    for _ in range(s):
        pows.append(pows[-1] * w)
    for k in range(1, s + 1):
        # solve sum_{i<k} c_i w^i = -w^k, i.e. linear system over base
        rows = [[pows[i].coords[j] for i in range(k)] for j in range(s)]
        rhs = [pows[k].coords[j] for j in range(s)]
        sol = _solve_ff(base, rows, rhs)
        if sol is not None:
            return tuple([-c for c in sol] + [base.one()])
    raise ArithmeticError("minimal polynomial not found")


def _solve_ff(F: FiniteField, rows, rhs):
    """Solve an overdetermined consistent system over F; None if unsolvable."""
    m = len(rows)
    n = len(rows[0]) if m else 0
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    piv_cols = []
    r = 0
    for c in range(n):
        piv = None
        for i in range(r, m):
            if not aug[i][c].is_zero():
                piv = i
                break
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = aug[r][c].inverse()
        aug[r] = [x * inv for x in aug[r]]
        for i in range(m):
            if i != r and not aug[i][c].is_zero():
                factor = aug[i][c]
                aug[i] = [x - factor * y for x, y in zip(aug[i], aug[r])]
        piv_cols.append(c)
        r += 1
    # consistency
    for i in range(r, m):
        if not aug[i][n].is_zero():
            return None
    if len(piv_cols) < n:
        # underdetermined: a dependency exists earlier; reject to keep minimality
        return None
    sol = [F.zero()] * n
    for i, c in enumerate(piv_cols):
        sol[c] = aug[i][n]
    return sol


def _vertex_of_point(point, base: FiniteField):
    """(is_infinity, factor tuple) encoding of a residual point."""
    if point == INF_POINT:
        return (True, ())
    mp = _minpoly_over_base(point, base)
    return (False, tuple(mp))


def _point_of_factor(factor, base: FiniteField):
    """A root of the factor: in base for degree 1, else in the tower."""
    if len(factor) == 2:
        return -factor[0] / factor[1]
    T = ff.extension(base, list(factor))
    return T.gen()


# ---------------------------------------------------------------------------
# the portrait itself
# ---------------------------------------------------------------------------

def build_portrait(f: RationalMap, P: PrimeSpec, depth: int = DEFAULT_DEPTH) -> PortraitRec:
    """Assemble the depth-N portrait at P; see the module docstring."""
    if not f.good_reduction(P):
        raise BadReductionError(f"bad reduction at p={P.p}")
    h, _ = f.height_and_untwist(P)
    if h > 0:
        raise WildRegimeError(
            f"positive height {h} at p={P.p}: portrait logic assumes height zero")
    lf = precritical_form(f, depth)
    fbar = f.reduce(P)
    Fq = P.field

    reduced_cumulative = reduce_form(lf.cumulative_form, P)
    reduced_increments = [reduce_form(M, P) for M in lf.increments]

    # vertices: factors of the reduced cumulative form, with multiplicity
    dehom = reduced_cumulative.dehomogenize()
    entries = {}
    if dehom:
        for g, mult in ff.factor(dehom):
            key = (False, tuple(g))
            entries[key] = entries.get(key, 0) + mult
    inf_mult = reduced_cumulative.order_at_infinity()
    if inf_mult:
        entries[(True, ())] = inf_mult

    def first_level(key):
        is_inf, factor = key
        for k, Mk in enumerate(reduced_increments):
            if is_inf:
                if Mk.order_at_infinity() > 0:
                    return k
            else:
                core = Mk.dehomogenize()
                if core and not ff.poly_divmod(core, list(factor))[1]:
                    return k
        return lf.depth  # collided away in reduction; keep the last level

    vertices = []
    for key, mult in entries.items():
        is_inf, factor = key
        label = "inf" if is_inf else _factor_text(list(factor))
        vertices.append(Vertex(is_infinity=is_inf, factor=factor, label=label,
                               level=first_level(key), multiplicity=mult))
    vertices.sort(key=lambda v: v.sort_key())
    index = {(v.is_infinity, v.factor): i for i, v in enumerate(vertices)}

    # directed edges: the reduced-map image of each vertex
    edges = []
    for i, v in enumerate(vertices):
        if v.is_infinity:
            image = fbar.eval_point(INF_POINT)
        else:
            pt = _point_of_factor(v.factor, Fq)
            image = fbar.eval_point(pt)
        key = _vertex_of_point(image, Fq)
        j = index.get(key)
        if j is not None:
            edges.append((i, j))
    edges.sort()

    # collision detectors, both ways, must agree
    by_disc = None
    for k in range(depth + 1):
        fired = valuation(lf.disc_increments[k], P) > 0 if not lf.disc_increments[k].is_zero() else True
        if not fired:
            for j in range(k):
                if valuation(lf.cross_resultants[(j, k)], P) > 0:
                    fired = True
                    break
        if fired:
            by_disc = k
            break
    cum_fired = valuation(lf.disc_prefix[depth], P) > 0
    by_mult = any(v.multiplicity > 1 for v in vertices)
    if cum_fired != (by_disc is not None) or cum_fired != by_mult:
        raise AssertionError(
            "collision detectors disagree: discriminant route "
            f"{by_disc}, cumulative {cum_fired}, multiplicity {by_mult}")
    witnesses = sorted(i for i, v in enumerate(vertices) if v.multiplicity > 1)

    has_cycle, cycle = directed_cycle_witness(f, P)
    return PortraitRec(
        prime=P, depth=depth, vertices=vertices, directed_edges=edges,
        has_directed_cycle=has_cycle, directed_cycle_witness=cycle,
        has_collision_up_to_depth=by_disc is not None, collision_depth=by_disc,
        collision_witnesses=witnesses, tame=P.p > f.degree, height=h,
        level_forms=lf)


def critical_cycles(f: RationalMap, P: PrimeSpec):
    """All purely periodic residual critical orbits, as a list of cycles.

    Exact, not depth-truncated: each residual critical point is tested
    for pure periodicity inside the extension field it generates, finite
    points first in factor order, infinity last.  Requires good
    reduction and height zero.
    """
    if not f.good_reduction(P):
        raise BadReductionError(f"bad reduction at p={P.p}")
    h, _ = f.height_and_untwist(P)
    if h > 0:
        raise WildRegimeError(
            f"positive height {h} at p={P.p}: every residual point is critical; "
            "route to the wild-regime handling")
    fbar = f.reduce(P)
    Fq = P.field
    support = reduce_form(f.critical_data().support_form, P)
    candidates = []
    dehom = support.dehomogenize()
    if dehom:
        for g, _mult in ff.factor(dehom):
            candidates.append(_point_of_factor([c for c in g], Fq))
    if support.order_at_infinity() > 0:
        candidates.append(INF_POINT)
    cycles = []
    seen = set()
    for pt in candidates:
        orbit = residual_orbit(fbar, pt)
        if orbit.purely_periodic:
            marker = frozenset(_vertex_of_point(q, Fq) for q in orbit.cycle)
            if marker not in seen:
                seen.add(marker)
                cycles.append(orbit.cycle)
    return cycles


def directed_cycle_witness(f: RationalMap, P: PrimeSpec):
    """(exists, cycle): is some residual critical point purely periodic."""
    cycles = critical_cycles(f, P)
    if cycles:
        return True, cycles[0]
    return False, ()


def has_directed_cycle(f: RationalMap, P: PrimeSpec):
    return directed_cycle_witness(f, P)


# -- collision verdicts ------------------------------------------------------

@dataclass(frozen=True)
class CollisionVerdict:
    """COLLISION(depth, witness) or NONE_UP_TO(depth)."""

    collided: bool
    depth: int
    witness_labels: tuple = ()

    def __str__(self):
        if self.collided:
            return f"COLLISION(depth={self.depth}, witness={','.join(self.witness_labels)})"
        return f"NONE_UP_TO({self.depth})"


def has_collision(f: RationalMap, P: PrimeSpec, depth: int) -> CollisionVerdict:
    """First depth k <= depth at which pre-critical points collide at P."""
    if not f.good_reduction(P):
        raise BadReductionError(f"bad reduction at p={P.p}")
    lf = precritical_form(f, depth)
    first = None
    for k in range(depth + 1):
        fired = valuation(lf.disc_increments[k], P) > 0
        if not fired:
            for j in range(k):
                if valuation(lf.cross_resultants[(j, k)], P) > 0:
                    fired = True
                    break
        if fired:
            first = k
            break
    if first is None:
        return CollisionVerdict(collided=False, depth=depth)
    reduced = reduce_form(lf.cumulative_prefix[first], P)
    labels = []
    dehom = reduced.dehomogenize()
    if dehom:
        for g, mult in ff.factor(dehom):
            if mult > 1:
                labels.append(_factor_text(g))
    if reduced.order_at_infinity() > 1:
        labels.append("inf")
    return CollisionVerdict(collided=True, depth=first, witness_labels=tuple(sorted(labels)))


@dataclass(frozen=True)
class CriticalReductionVerdict:
    """BAD(witness) or GOOD_UP_TO(depth); GOOD is a semi-decision."""

    good: bool
    depth: int
    directed_cycle: bool = False
    cycle_witness: tuple = ()
    collision: CollisionVerdict | None = None

    def __str__(self):
        if self.good:
            return f"GOOD_UP_TO({self.depth})"
        reasons = []
        if self.directed_cycle:
            reasons.append("directed-cycle")
        if self.collision is not None and self.collision.collided:
            reasons.append(str(self.collision))
        return f"BAD({'; '.join(reasons)})"


def good_critical_reduction(f: RationalMap, P: PrimeSpec, depth: int) -> CriticalReductionVerdict:
    """Divisor-side criterion: no directed cycles, no collisions to depth N."""
    has_cycle, cycle = directed_cycle_witness(f, P)
    coll = has_collision(f, P, depth)
    if has_cycle or coll.collided:
        return CriticalReductionVerdict(good=False, depth=depth, directed_cycle=has_cycle,
                                        cycle_witness=cycle, collision=coll)
    return CriticalReductionVerdict(good=True, depth=depth)


# ---------------------------------------------------------------------------
# DOT export
# ---------------------------------------------------------------------------

def export_dot(portrait: PortraitRec, name: str = "portrait") -> str:
    """Deterministic DOT text: solid directed f-edges, dashed collision
    loops labeled with the residual multiplicity."""
    lines = [f'digraph "{name}" {{']
    lines.append(f'  label="p={portrait.prime.p} factor={list(portrait.prime.factor)} '
                 f'depth={portrait.depth}";')
    lines.append("  rankdir=LR;")
    for i, v in enumerate(portrait.vertices):
        lines.append(f'  v{i} [label="{v.label} (L{v.level})"];')
    for i, j in portrait.directed_edges:
        lines.append(f"  v{i} -> v{j};")
    for i in portrait.collision_witnesses:
        mult = portrait.vertices[i].multiplicity
        lines.append(f'  v{i} -> v{i} [style=dashed, dir=none, label="mult {mult}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
