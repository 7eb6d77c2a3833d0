"""Command-line front end.

Exit codes: 0 the property holds or the construction succeeded, 1 the
property is refuted (a witness is printed), 2 usage or input error,
3 a budget was exceeded.
"""
from __future__ import annotations

import argparse
import sys

from . import io
from .errors import (
    BudgetExceeded, GentopError, InvalidAction, NotContinuous, NotDiffuse,
    ParseError, WitnessNotFound,
)

OK, REFUTED, USAGE, BUDGET = 0, 1, 2, 3


class Failure(Exception):
    """Input problem found after parsing; reported with exit code 2."""


def _doc(paths):
    return io.parse_files(paths)


def _pick(table, name, kind):
    if not table:
        raise Failure(f"no {kind} defined in the input")
    if name is None:
        return table[list(table)[-1]]
    if name not in table:
        raise Failure(f"no {kind} named {name!r}")
    return table[name]


def _space(doc, name=None):
    return _pick(doc.spaces, name, "space")


def _map(doc, name=None):
    return _pick(doc.maps, name, "map")


def _set(space, text):
    try:
        S = io.parse_set(text)
    except ValueError as exc:
        raise Failure(str(exc)) from None
    space.mask(S)
    return S


# ------------------------------------------------------------------ check

def cmd_check_zdense(a, out):
    from .negligible import is_zdense
    doc = _doc(a.files)
    X = _space(doc, a.space)
    U = _set(X, a.set)
    v = is_zdense(X, U)
    out.append(f"space: {X.name}")
    out.append(f"set: {io.format_set(U)}")
    out.append(f"Z-dense: {v.ok}")
    if not v.ok:
        out.append(f"witness: connected open {io.format_set(v.witness)} meets it in a disconnected or empty set")
    return OK if v.ok else REFUTED


def cmd_check_negligible(a, out):
    from .negligible import local_witness, negligible_by_definition
    doc = _doc(a.files)
    X = _space(doc, a.space)
    I = _set(X, a.set)
    U = _set(X, a.open) if a.open else frozenset(X.points)
    u, i = X.mask(U), X.mask(I)
    if not X.is_open_mask(u):
        raise Failure(f"{io.format_set(U)} is not open")
    if i & ~u:
        raise Failure("the set is not inside the open set")
    ok = negligible_by_definition(X, u, i)
    out.append(f"space: {X.name}")
    out.append(f"element: ({io.format_set(U)}, {io.format_set(I)})")
    out.append(f"negligible: {ok}")
    if not ok:
        if X.closure_mask(i) & u != i:
            out.append("witness: not closed in the open set")
        else:
            bad = local_witness(X, i)
            if bad is not None:
                out.append(f"witness: minimal open of {io.format_point(X.points[bad])} minus the set is empty or disconnected")
    return OK if ok else REFUTED


def cmd_check_diffuse(a, out):
    from .gencat import is_diffuse
    doc = _doc(a.files)
    f = _map(doc, a.map)
    out.append(f"map: {f.name} : {f.dom.name} -> {f.cod.name}")
    try:
        v = is_diffuse(f)
    except NotContinuous as exc:
        out.append("continuous: False")
        out.append(f"witness: {io.format_point(exc.witness)}")
        return REFUTED
    out.append("continuous: True")
    out.append(f"diffuse: {v.ok}")
    if not v.ok:
        U, I = v.witness
        out.append(f"witness: ({io.format_set(U)}, {io.format_set(I)}) pulls back non-negligibly")
    return OK if v.ok else REFUTED


def cmd_check_embedding(a, out):
    from .gencat import is_injective, is_local_embedding, is_open_embedding, is_open_map
    doc = _doc(a.files)
    f = _map(doc, a.map)
    out.append(f"map: {f.name} : {f.dom.name} -> {f.cod.name}")
    try:
        emb = is_open_embedding(f)
    except NotContinuous as exc:
        out.append("continuous: False")
        out.append(f"witness: {io.format_point(exc.witness)}")
        return REFUTED
    out.append(f"open map: {is_open_map(f)}")
    out.append(f"injective: {is_injective(f)}")
    out.append(f"local embedding: {is_local_embedding(f)}")
    out.append(f"open embedding: {emb}")
    return OK if emb else REFUTED


def cmd_check_cover(a, out):
    from .gencat import is_cover
    doc = _doc(a.files)
    target = _space(doc, a.target)
    names = a.legs.split(",") if a.legs else list(doc.maps)
    legs = [_map(doc, n) for n in names]
    try:
        v = is_cover(legs, target, a.mode)
    except NotContinuous as exc:
        out.append("cover: False")
        out.append(f"witness: leg not continuous at {io.format_point(exc.witness)}")
        return REFUTED
    out.append(f"target: {target.name}  legs: {', '.join(names)}  mode: {a.mode}")
    out.append(f"cover: {v.ok}")
    if not v.ok:
        out.append(f"witness: {_fmt_witness(v.witness, names)}")
    return OK if v.ok else REFUTED


def _fmt_witness(w, names):
    if isinstance(w, tuple) and len(w) == 2 and isinstance(w[1], int) and w[0] != "uncovered":
        return f"{w[0]} (leg {names[w[1]]})"
    if isinstance(w, tuple) and w and w[0] == "uncovered":
        return f"uncovered point {io.format_point(w[1])}"
    return str(w)


# --------------------------------------------------------------- pullback

def cmd_pullback_embedding(a, out):
    from .gencat import pullback_embedding
    doc = _doc(a.files)
    f, u = _map(doc, a.f), _map(doc, a.u)
    V, v, g = pullback_embedding(f, u)
    V.name = "V"
    out.append(io.emit_space(V).rstrip("\n"))
    out.append(io.emit_map(_renamed(v, V), "v").rstrip("\n"))
    out.append(io.emit_map(_renamed(g, V), "g").rstrip("\n"))
    return OK


def _renamed(f, V):
    from .fintop import ContinuousMap
    return ContinuousMap.from_indices(V, f.cod, f.img)


def cmd_pullback_general(a, out):
    from .lambda_rep import lambda_lines, pullback_via_lambda, verify_general_pullback
    doc = _doc(a.files)
    c, b = _map(doc, a.c), _map(doc, a.b)
    I = _set(b.dom, a.ramified) if a.ramified else frozenset()
    res = pullback_via_lambda(c, b, I)
    out.append(f"set pullback points: {len(res.set_pullback)}")
    out.append(f"K: {io.format_set(res.K)}")
    out.extend(lambda_lines(res.lam))
    if a.probes:
        v = verify_general_pullback(c, b, res, a.probes)
        out.append(f"universal property up to probe size {a.probes}: {v.ok}")
        if not v.ok:
            out.append(f"witness: {v.witness}")
            return REFUTED
    return OK


# ----------------------------------------------------------------- canopy

def _canopy(doc, name):
    return _pick(doc.canopies, name, "canopy")


def cmd_canopy_validate(a, out):
    from .canopy import check_canopy
    can = _canopy(_doc(a.files), a.canopy)
    fail = check_canopy(can)
    out.append(f"canopy: {can.name}  charts: {len(can.index)}  overlaps: {len(can.overlaps)}")
    if fail is None:
        out.append("valid: True")
        return OK
    out.append("valid: False")
    out.append(f"law: {fail.law}  axiom: {fail.axiom}")
    out.append(f"witness: {fail.witness}")
    return REFUTED


def cmd_canopy_affinize(a, out):
    from .canopy import affinize, check_canopy
    can = _canopy(_doc(a.files), a.canopy)
    fail = check_canopy(can)
    if fail is not None:
        out.append(f"invalid canopy: {fail}")
        return REFUTED
    aff = affinize(can)
    X = aff.space
    X.name = X.name or "affinization"
    out.append(io.emit_space(X).rstrip("\n"))
    return OK


def cmd_canopy_verify(a, out):
    from .canopy import affinize, check_canopy, verify_affinization
    can = _canopy(_doc(a.files), a.canopy)
    fail = check_canopy(can)
    if fail is not None:
        out.append(f"invalid canopy: {fail}")
        return REFUTED
    rep = verify_affinization(affinize(can), a.probes)
    out.extend(rep.lines())
    return OK if rep.ok else REFUTED


# --------------------------------------------------------------- quotient

def _action(doc, name):
    return _pick(doc.actions, name, "action")


def cmd_quotient_certify(a, out):
    from .grpquot import certify_pseudoetale, fiber_bound_check
    act = _action(_doc(a.files), a.action)
    cert = certify_pseudoetale(act)
    out.extend(cert.lines())
    if cert.accepted:
        out.append(f"fibers at most |G|: {fiber_bound_check(cert.projection, len(act.elements))}")
    return OK if cert.accepted else REFUTED


def cmd_quotient_build(a, out):
    from .grpquot import build_quotient
    act = _action(_doc(a.files), a.action)
    A, b = build_quotient(act)
    A.name = "orbits"
    out.append(io.emit_space(A).rstrip("\n"))
    out.append(io.emit_map(_renamed(b, act.space), "b").rstrip("\n"))
    return OK


def cmd_quotient_verify(a, out):
    from .grpquot import quotient_property_check
    act = _action(_doc(a.files), a.action)
    rep = quotient_property_check(act, a.probes)
    out.append(f"b diffuse: {rep.b_diffuse.ok}")
    if not rep.b_diffuse.ok:
        U, I = rep.b_diffuse.witness
        out.append(f"witness: ({io.format_set(U)}, {io.format_set(I)})")
    out.append(f"maps checked: {rep.checked}")
    out.append(f"violations: {len(rep.violations)}")
    for probe, h, lhs, rhs in rep.violations:
        pairs = ", ".join(f"{io.format_point(x)}->{io.format_point(y)}" for x, y in h.items())
        out.append(f"  {probe}: {{{pairs}}} diffuse {lhs}, after b {rhs}")
    return OK if rep.ok else REFUTED


# --------------------------------------------------------------- morphism

def cmd_morphism_equal(a, out):
    from .quotmor import COMPONENT_WISE, pointwise_vs_component_report
    doc = io.Document()
    io.parse_file(a.f, doc)
    f = _map(doc, a.fname) if a.fname else doc.last("map")
    io.parse_file(a.g, doc)
    g = _map(doc, a.gname) if a.gname else doc.last("map")
    io.parse_file(a.act, doc)
    act = doc.last("action")
    if f is None or g is None or act is None:
        raise Failure("need one map in each map file and an action")
    verdict = pointwise_vs_component_report(f, g, act)
    out.append(io.write_csv(verdict.csv_rows()).rstrip("\n"))
    return OK if verdict.kind == COMPONENT_WISE else REFUTED


# ----------------------------------------------------------------- lambda

def _instance(a, doc):
    from .lambda_rep import make_instance
    X = _space(doc, a.space)
    elems = []
    for text in a.element or []:
        left, sep, right = text.partition(":")
        if not sep:
            raise Failure(f"element {text!r} is not of the form U:I")
        elems.append((_set(X, left), _set(X, right)))
    return make_instance(X, elems)


def cmd_lambda_build(a, out):
    from .lambda_rep import lambda_construct, lambda_lines
    lam = lambda_construct(_instance(a, _doc(a.files)))
    out.extend(lambda_lines(lam))
    return OK


def cmd_lambda_verify(a, out):
    from .lambda_rep import lambda_construct, verify_representability
    lam = lambda_construct(_instance(a, _doc(a.files)))
    rep = verify_representability(lam, a.probes)
    out.extend(rep.lines())
    return OK if rep.ok else REFUTED


# ---------------------------------------------------------------- schwarz

def cmd_schwarz_report(a, out):
    from .schwarz import SchwarzConfig, csv_rows, diffuse_sample_report, pathology_witness_search, sign_bands
    try:
        cfg = SchwarzConfig(step=a.grid, n_max=a.nmax)
    except ValueError as exc:
        raise Failure(str(exc)) from None
    rep = diffuse_sample_report(cfg)
    out.extend(rep.lines())
    try:
        wit = pathology_witness_search(cfg)
    except WitnessNotFound as exc:
        out.append(f"witness search failed: {exc}")
        return REFUTED
    out.append(f"pathology witnesses: {len(wit.witnesses)} target-radius pairs")
    out.append(f"orbit agreement residual: {wit.orbit_residual:.3g}")
    bands = sign_bands()
    out.append(f"sign bands in (0.1, 0.7): {len(bands)}")
    for lo, hi, s in bands:
        out.append(f"  [{lo:.4f}, {hi:.4f}] relating element {'-1' if s > 0 else '1'}")
    text = io.write_csv(csv_rows(wit))
    if a.csv == "-":
        out.append(text.rstrip("\n"))
    elif a.csv:
        with open(a.csv, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return OK


# ------------------------------------------------------------------ probe

def cmd_probe_catalog(a, out):
    from .fintop import probe_catalog
    for S in probe_catalog(a.n, cap=max(a.n, 4) if a.allow_large else 4):
        out.append(io.emit_space(S).rstrip("\n"))
    return OK


# ----------------------------------------------------------------- parser

def build_parser():
    p = argparse.ArgumentParser(prog="gentop", description="Finite models of diffuse maps, canopies and group quotients.")
    p.add_argument("--output", "-o", help="write the report here instead of standard output")
    top = p.add_subparsers(dest="verb", required=True)

    check = top.add_parser("check").add_subparsers(dest="what", required=True)
    c = check.add_parser("zdense")
    c.add_argument("files", nargs="+")
    c.add_argument("--set", required=True)
    c.add_argument("--space")
    c.set_defaults(run=cmd_check_zdense)
    c = check.add_parser("negligible")
    c.add_argument("files", nargs="+")
    c.add_argument("--set", required=True)
    c.add_argument("--open")
    c.add_argument("--space")
    c.set_defaults(run=cmd_check_negligible)
    for name, fn in (("diffuse", cmd_check_diffuse), ("embedding", cmd_check_embedding)):
        c = check.add_parser(name)
        c.add_argument("files", nargs="+")
        c.add_argument("--map")
        c.set_defaults(run=fn)
    c = check.add_parser("cover")
    c.add_argument("files", nargs="+")
    c.add_argument("--target")
    c.add_argument("--legs", help="comma separated map names")
    c.add_argument("--mode", default="pseudogeometric", choices=("pseudogeometric", "pseudoetale"))
    c.set_defaults(run=cmd_check_cover)

    pb = top.add_parser("pullback").add_subparsers(dest="what", required=True)
    c = pb.add_parser("embedding")
    c.add_argument("files", nargs="+")
    c.add_argument("--f", required=True)
    c.add_argument("--u", required=True)
    c.set_defaults(run=cmd_pullback_embedding)
    c = pb.add_parser("general")
    c.add_argument("files", nargs="+")
    c.add_argument("--c", required=True)
    c.add_argument("--b", required=True)
    c.add_argument("--ramified", help="negligible set I off which b is a local homeomorphism")
    c.add_argument("--probes", type=int, default=0)
    c.set_defaults(run=cmd_pullback_general)

    cp = top.add_parser("canopy").add_subparsers(dest="what", required=True)
    for name, fn in (("validate", cmd_canopy_validate), ("affinize", cmd_canopy_affinize), ("verify", cmd_canopy_verify)):
        c = cp.add_parser(name)
        c.add_argument("files", nargs="+")
        c.add_argument("--canopy")
        if name == "verify":
            c.add_argument("--probes", type=int, default=3)
        c.set_defaults(run=fn)

    qp = top.add_parser("quotient").add_subparsers(dest="what", required=True)
    for name, fn in (("certify", cmd_quotient_certify), ("build", cmd_quotient_build), ("verify", cmd_quotient_verify)):
        c = qp.add_parser(name)
        c.add_argument("files", nargs="+")
        c.add_argument("--action")
        if name == "verify":
            c.add_argument("--probes", type=int, default=3)
        c.set_defaults(run=fn)

    mp = top.add_parser("morphism").add_subparsers(dest="what", required=True)
    c = mp.add_parser("equal")
    c.add_argument("f")
    c.add_argument("g")
    c.add_argument("act")
    c.add_argument("--fname")
    c.add_argument("--gname")
    c.set_defaults(run=cmd_morphism_equal)

    lp = top.add_parser("lambda").add_subparsers(dest="what", required=True)
    for name, fn in (("build", cmd_lambda_build), ("verify", cmd_lambda_verify)):
        c = lp.add_parser(name)
        c.add_argument("files", nargs="+")
        c.add_argument("--space")
        c.add_argument("--element", action="append", help="base element as U:I, e.g. '{l,m,r}:{m}'")
        if name == "verify":
            c.add_argument("--probes", type=int, default=3)
        c.set_defaults(run=fn)

    sp = top.add_parser("schwarz").add_subparsers(dest="what", required=True)
    c = sp.add_parser("report")
    c.add_argument("--nmax", type=int, default=5)
    c.add_argument("--grid", type=float, default=0.05)
    c.add_argument("--csv", help="CSV path, or - for standard output")
    c.set_defaults(run=cmd_schwarz_report)

    pp = top.add_parser("probe").add_subparsers(dest="what", required=True)
    c = pp.add_parser("catalog")
    c.add_argument("n", type=int)
    c.add_argument("--allow-large", action="store_true", help="permit the 139 five-point spaces")
    c.set_defaults(run=cmd_probe_catalog)
    return p


def run(argv=None):
    """(exit code, report text, output path or None)."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return (exc.code if isinstance(exc.code, int) else USAGE), "", None
    out = []
    try:
        code = args.run(args, out)
    except BudgetExceeded as exc:
        out.append(f"budget exceeded: {exc}")
        code = BUDGET
    except ParseError as exc:
        out.append(f"parse error: {exc}")
        code = USAGE
    except InvalidAction as exc:
        out.append(f"invalid action: {exc}")
        code = USAGE
    except NotDiffuse as exc:
        out.append(f"not diffuse: {exc}")
        code = REFUTED
    except (Failure, GentopError) as exc:
        out.append(f"error: {exc}")
        code = USAGE
    text = "\n".join(out) + ("\n" if out else "")
    return code, text, args.output


def main(argv=None):
    code, text, dest = run(argv)
    if dest:
        with open(dest, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
