"""Batch command-line front end.

Reads a JSON problem description, dispatches to the library, and emits
deterministic JSON reports (and DOT graphs on request).  All numbers in
reports are exact fraction text; nothing is ever rendered as a float,
so valuations like 1/2 survive round trips byte-for-byte.

Exit codes: 0 success, 2 parse error, 3 precondition error, 4 resource
cap.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction

import arbor
from arbor import dynamics as dyn
from arbor import localdata as ld
from arbor import portrait as pt
from arbor import ramify as rm
from arbor.algebra.numberfield import NFElem, NumberFieldSpec
from arbor.errors import ConfigError, PreconditionError, ResourceCapError
from arbor.localdata import INF, POINT_AT_INFINITY

KNOWN_OPTIONS = {
    "depth", "p_max", "prime", "base", "policy", "crit",
    "step_cap", "precision", "iterate",
}


@dataclass
class ProblemConfig:
    field_spec: NumberFieldSpec
    rational_map: dyn.RationalMap
    options: dict
    echo: dict


def _fail(msg, path):
    raise ConfigError(msg, path)


def _parse_fraction(text, path) -> Fraction:
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, str):
        body = text.strip()
        try:
            if "/" in body:
                a, b = body.split("/")
                return Fraction(int(a.strip()), int(b.strip()))
            return Fraction(int(body))
        except (ValueError, ZeroDivisionError):
            _fail(f"not decimal-free fraction text: {text!r}", path)
    _fail(f"expected fraction text, got {type(text).__name__}", path)


def _parse_nfelem(value, K: NumberFieldSpec, path) -> NFElem:
    if isinstance(value, (int, str)):
        return K(_parse_fraction(value, path))
    if isinstance(value, list):
        if len(value) > K.degree:
            _fail(f"coordinate sequence longer than the field degree {K.degree}", path)
        return K.from_coords([_parse_fraction(v, f"{path}/{i}")
                              for i, v in enumerate(value)])
    _fail("expected fraction text or coordinate sequence", path)


def parse_config(text: str) -> ProblemConfig:
    """Validate the documented schema; unknown keys are fatal."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}", "")
    if not isinstance(doc, dict):
        _fail("top level must be an object", "")
    extra = set(doc) - {"field", "map", "options"}
    if extra:
        _fail(f"unknown keys {sorted(extra)}", "/")
    if "field" not in doc:
        _fail("missing key", "/field")
    if "map" not in doc:
        _fail("missing key", "/map")

    fld = doc["field"]
    if not isinstance(fld, dict) or set(fld) - {"min_poly"}:
        _fail("field must be an object with the single key min_poly", "/field")
    mp = fld.get("min_poly")
    if not isinstance(mp, list) or not mp or not all(isinstance(c, int) for c in mp):
        _fail("min_poly must be a nonempty list of integers (ascending)", "/field/min_poly")
    if mp[-1] != 1:
        _fail("min_poly must be monic", "/field/min_poly")
    try:
        K = NumberFieldSpec(mp)
    except ValueError as exc:
        _fail(str(exc), "/field/min_poly")

    mp_map = doc["map"]
    if not isinstance(mp_map, dict) or set(mp_map) - {"num", "den"}:
        _fail("map must be an object with keys num, den", "/map")
    for key in ("num", "den"):
        if key not in mp_map or not isinstance(mp_map[key], list) or not mp_map[key]:
            _fail("missing or empty coefficient list", f"/map/{key}")
    num = [_parse_nfelem(v, K, f"/map/num/{i}") for i, v in enumerate(mp_map["num"])]
    den = [_parse_nfelem(v, K, f"/map/den/{i}") for i, v in enumerate(mp_map["den"])]
    try:
        F = dyn.RationalMap.from_affine(K, num, den)
    except (ValueError, PreconditionError) as exc:
        _fail(str(exc), "/map")

    options = doc.get("options", {})
    if not isinstance(options, dict):
        _fail("options must be an object", "/options")
    extra = set(options) - KNOWN_OPTIONS
    if extra:
        _fail(f"unknown option keys {sorted(extra)}", "/options")
    echo = {"field": {"min_poly": list(mp)},
            "map": {"num": [_nf_json(c) for c in num], "den": [_nf_json(c) for c in den]},
            "options": {k: options[k] for k in sorted(options)}}
    return ProblemConfig(field_spec=K, rational_map=F, options=dict(options), echo=echo)


# ---------------------------------------------------------------------------
# serialization: everything exact, keys sorted at dump time
# ---------------------------------------------------------------------------

def _frac_text(v) -> str:
    if v == INF or v is INF:
        return "inf"
    fr = Fraction(v)
    return str(fr.numerator) if fr.denominator == 1 else f"{fr.numerator}/{fr.denominator}"


def _nf_json(x: NFElem):
    return [_frac_text(c) for c in x.coords]


def _point_json(pt):
    if pt == POINT_AT_INFINITY:
        return "inf"
    return "[" + ",".join(str(v) for v in pt.field.element_key(pt)) + "]"


def _prime_json(P: ld.PrimeSpec):
    return {"p": P.p, "factor": list(P.factor), "residue_degree": P.residue_degree}


def _verdict_json(v: rm.BasepointVerdict):
    return {"verdict": v.verdict,
            "cycle_witness": [_point_json(q) for q in v.cycle_witness]}


def _sim_json(sim: rm.BranchSimRec):
    out = {
        "prime": _prime_json(sim.prime),
        "base_point": _nf_json(sim.base_point),
        "policy": sim.policy,
        "period": sim.period,
        "ram_index": sim.ram_index,
        "first_ramified_level": sim.first_ramified_level,
        "onset_level": sim.onset_level,
        "exited": sim.exited,
        "exit_level": sim.exit_level,
        "chart": sim.chart,
        "steps": [
            {"level": s.level,
             "distance_valuation": _frac_text(s.distance_valuation),
             "absolute_valuation": None if s.absolute_valuation is None
             else _frac_text(s.absolute_valuation),
             "certificate_denominator": s.certificate_denominator}
            for s in sim.steps],
    }
    if sim.level_multisets is not None:
        out["level_multisets"] = [
            [[_frac_text(v), c] for v, c in level] for level in sim.level_multisets]
    return out


def _portrait_json(por: pt.PortraitRec):
    return {
        "prime": _prime_json(por.prime),
        "depth": por.depth,
        "tame": por.tame,
        "height": por.height,
        "vertices": [
            {"label": v.label, "level": v.level, "multiplicity": v.multiplicity,
             "infinity": v.is_infinity}
            for v in por.vertices],
        "directed_edges": [list(e) for e in por.directed_edges],
        "has_directed_cycle": por.has_directed_cycle,
        "directed_cycle_witness": [_point_json(q) for q in por.directed_cycle_witness],
        "has_collision": por.has_collision_up_to_depth,
        "collision_depth": por.collision_depth,
        "collision_witnesses": [por.vertices[i].label for i in por.collision_witnesses],
    }


def _scan_json(rep: rm.ScanReport):
    rows = []
    for r in rep.rows:
        rows.append({
            "p": r.p,
            "prime": None if r.prime is None else _prime_json(r.prime),
            "note": r.note,
            "good_reduction": r.good_reduction,
            "height": r.height,
            "tame": r.tame,
            "directed_cycle": r.directed_cycle,
            "cycle_witness": [_point_json(q) for q in r.cycle_witness],
            "collision_depth": r.collision_depth,
            "verdict": r.verdict,
        })
    return {"base_point": _nf_json(rep.base_point), "p_max": rep.p_max,
            "depth": rep.depth, "rows": rows,
            "inf_ramified_primes": rep.inf_ramified_primes()}


def _pcf_json(core: rm.PCFCore, report):
    orbits = []
    for o in core.orbits:
        rec = {"label": o.label, "rational": o.rational, "preperiod": o.preperiod,
               "period": o.period, "finite": o.finite}
        if o.rational:
            rec["orbit"] = [p if p == POINT_AT_INFINITY else _nf_json(p)
                            for p in o.points]
        else:
            rec["orbit_forms"] = [[_nf_json(c) for c in F.coeffs] for F in o.points]
        orbits.append(rec)
    out = {"pcf": core.pcf, "conclusive": core.conclusive, "orbits": orbits,
           "postcritical_size": core.postcritical_size}
    if report is not None:
        out["delta_set"] = [
            {"critical": e.critical_label, "n": e.n, "zero": e.is_zero,
             "norm": None if e.norm is None else _frac_text(e.norm),
             "primes": None if e.factors is None else e.factors.primes(),
             "unfactored_cofactor": None if e.factors is None or e.factors.complete
             else e.factors.cofactor}
            for e in report.delta_entries]
        out["ramified_primes"] = report.ramified_primes
        out["all_primes_for_some_base_point"] = report.all_primes_for_some_base
        out["wild_primes"] = report.wild_primes
        out["wild_infinitely_ramified"] = report.wild_infinitely_ramified
        out["base_field_warnings"] = report.base_field_warnings
    return out


# ---------------------------------------------------------------------------
# command dispatch
# ---------------------------------------------------------------------------

def _opt(config, args, name, default=None):
    cli_val = getattr(args, name, None)
    if cli_val is not None:
        return cli_val
    return config.options.get(name, default)


def _primes_for(config, args):
    p = _opt(config, args, "prime")
    if p is None:
        raise ConfigError("this command needs --prime (or options.prime)", "/options/prime")
    return ld.primes_above(config.field_spec, int(p))


def _base_point(config, args, default=None):
    expr = _opt(config, args, "base", default)
    if expr is None:
        raise ConfigError("this command needs --base (or options.base)", "/options/base")
    K = config.field_spec
    if isinstance(expr, (int, str)) and not (isinstance(expr, str) and "," in expr):
        return _parse_nfelem(expr, K, "/options/base")
    if isinstance(expr, str):
        parts = [s.strip() for s in expr.split(",")]
        return _parse_nfelem(parts, K, "/options/base")
    return _parse_nfelem(expr, K, "/options/base")


def run(command: str, config: ProblemConfig, args) -> tuple:
    """Dispatch a command; returns (report_dict, dot_text_or_None)."""
    f = config.rational_map
    dot = None
    if command == "pcf":
        step_cap = int(_opt(config, args, "step_cap", 64))
        core = rm.pcf_check(f, step_cap)
        report = rm.pcf_primes(f, step_cap) if core.pcf else None
        results = _pcf_json(core, report)
    elif command == "portrait":
        depth = int(_opt(config, args, "depth", pt.DEFAULT_DEPTH))
        portraits = [pt.build_portrait(f, P, depth) for P in _primes_for(config, args)]
        results = [_portrait_json(p) for p in portraits]
        dot = "".join(pt.export_dot(p, name=f"portrait_p{p.prime.p}_{i}")
                      for i, p in enumerate(portraits))
    elif command == "branch":
        depth = int(_opt(config, args, "depth", 12))
        policy = _opt(config, args, "policy", "nearest")
        alpha0 = _base_point(config, args)
        precision = int(_opt(config, args, "precision", rm.DEFAULT_SIM_PRECISION))
        results = [_sim_json(rm.branch_valuations(f, P, alpha0, depth, policy,
                                                  precision))
                   for P in _primes_for(config, args)]
    elif command == "scan":
        p_max = _opt(config, args, "p_max")
        if p_max is None:
            raise ConfigError("scan needs --p-max (or options.p_max)", "/options/p_max")
        depth = int(_opt(config, args, "depth", 2))
        alpha0 = _base_point(config, args)
        results = _scan_json(rm.scan(f, alpha0, int(p_max), depth))
    elif command == "gcr":
        depth = int(_opt(config, args, "depth", pt.DEFAULT_DEPTH))
        out = []
        for P in _primes_for(config, args):
            v = pt.good_critical_reduction(f, P, depth)
            out.append({"prime": _prime_json(P), "verdict": str(v)})
        results = out
    elif command == "height":
        out = []
        for P in _primes_for(config, args):
            h, Qm = f.height_and_untwist(P)
            out.append({
                "prime": _prime_json(P), "height": h,
                "quotient_num": [_point_json(c) for c in Qm.num.coeffs],
                "quotient_den": [_point_json(c) for c in Qm.den.coeffs],
                "quotient_degree": Qm.degree})
        results = out
    elif command == "newton":
        n = int(_opt(config, args, "iterate", 1))
        alpha0 = _base_point(config, args, default="0")
        out = []
        for P in _primes_for(config, args):
            orc = rm.iterate_valuation_oracle(f, P, alpha0, n)
            poly_points = orc.valuations
            out.append({
                "prime": _prime_json(P), "iterate": n,
                "base_point": _nf_json(alpha0),
                "root_valuations": [_frac_text(v) for v in orc.valuations],
                "segments": _segments_of(f, P, alpha0, n),
                "center_hits": orc.center_hits,
                "infinite_preimages": orc.infinite_preimages})
        results = out
    elif command == "sparseness":
        p_max = _opt(config, args, "p_max")
        if p_max is None:
            raise ConfigError("sparseness needs --p-max (or options.p_max)",
                              "/options/p_max")
        depth = int(_opt(config, args, "depth", 16))
        alpha0 = _base_point(config, args)
        crit = config.options.get("crit")
        if crit is None:
            points, _cluster = rm._rational_critical_points(f)
            finite = [p for p in points if p != POINT_AT_INFINITY]
            if not finite:
                raise PreconditionError(
                    "no rational finite critical point; supply options.crit")
            c = finite[0]
        else:
            c = _parse_nfelem(crit, config.field_spec, "/options/crit")
        hits = rm.sparseness_scan(f, c, alpha0, int(p_max), depth)
        results = {"critical_point": _nf_json(c) if c != POINT_AT_INFINITY else "inf",
                   "base_point": _nf_json(alpha0), "p_max": int(p_max),
                   "depth": depth,
                   "hits": [{"p": h.p, "orbit_witness_n": h.n,
                             "base_witness_m": h.m} for h in hits]}
    else:
        raise ConfigError(f"unknown command {command!r}", "")
    doc = {
        "tool": "arbor",
        "version": arbor.__version__,
        "command": command,
        "input": config.echo,
        "results": results,
    }
    return doc, dot


def _segments_of(f, P, alpha0, n):
    fn = f.iterate(n)
    H = [a - alpha0 * b for a, b in zip(fn.num.coeffs, fn.den.coeffs)]
    while H and H[-1].is_zero():
        H.pop()
    vals = [ld.valuation(c, P) if not c.is_zero() else INF for c in H]
    poly = ld.newton_polygon(vals)
    return [[_frac_text(s), int(l)] for s, l in poly.segments]


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="arbor",
        description="ramification analysis of branch and arboreal extensions "
                    "of rational maps (exact arithmetic)")
    parser.add_argument("command",
                        choices=["pcf", "portrait", "branch", "scan", "gcr",
                                 "height", "newton", "sparseness"])
    parser.add_argument("--config", required=True, help="JSON problem description")
    parser.add_argument("--prime", type=int, default=None)
    parser.add_argument("--p-max", dest="p_max", type=int, default=None)
    parser.add_argument("--depth", type=int, default=None)
    parser.add_argument("--base", type=str, default=None)
    parser.add_argument("--policy", type=str, default=None,
                        choices=["nearest", "farthest", "all"])
    parser.add_argument("--dot", type=str, default=None, help="write DOT graph here")
    parser.add_argument("--json", dest="json_path", type=str, default=None,
                        help="write the JSON report here instead of stdout")
    args = parser.parse_args(argv)

    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            config = parse_config(fh.read())
        doc, dot = run(args.command, config, args)
    except ConfigError as exc:
        _emit_error(args, 2, "parse", str(exc))
        return 2
    except PreconditionError as exc:
        _emit_error(args, 3, "precondition", str(exc))
        return 3
    except ResourceCapError as exc:
        _emit_error(args, 4, "resource-cap", str(exc))
        return 4
    except OSError as exc:
        _emit_error(args, 2, "io", str(exc))
        return 2

    text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if args.json_path:
        with open(args.json_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.dot and dot is not None:
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(dot)
    return 0


def _emit_error(args, code, kind, message):
    doc = {"tool": "arbor", "version": arbor.__version__, "error": {
        "kind": kind, "exit_code": code, "message": message}}
    sys.stderr.write(json.dumps(doc, sort_keys=True, indent=2) + "\n")


if __name__ == "__main__":
    sys.exit(main())
