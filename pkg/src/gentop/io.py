"""Line-oriented text formats for spaces, maps, actions and canopies.

A document is a sequence of blocks, each opened by a header line:

    space <name>
    points a b c
    minopen a : a
    map <name> : <A> -> <B>
    a -> b
    action <name> on <space>
    elements e g
    identity e
    table g g = e
    act g : a -> b
    canopy <name>
    chart <j> <space>
    overlap <j> <k> <space>
    rho1 <j> <k> : z -> x
    rho2 <j> <k> : z -> y

Points are atoms (integers or bare words) or parenthesised tuples such as
``(2,1)``.  ``#`` starts a comment.  Blocks may refer to any space defined
earlier in the same document or in documents loaded before it.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .errors import GentopError, ParseError, UnknownPoint
from .fintop import ContinuousMap, FinSpace, make_space, point_key

HEADERS = ("space", "map", "action", "canopy")


# ----------------------------------------------------------------- points

def parse_point(text):
    p, rest = _point(text.strip(), 0)
    if rest != len(text.strip()):
        raise ValueError(f"trailing characters in point {text!r}")
    return p


def _point(s, i):
    if i >= len(s):
        raise ValueError("expected a point")
    if s[i] == "(":
        items = []
        i += 1
        while True:
            p, i = _point(s, i)
            items.append(p)
            if i < len(s) and s[i] == ",":
                i += 1
                continue
            if i < len(s) and s[i] == ")":
                return tuple(items), i + 1
            raise ValueError(f"unbalanced parentheses in {s!r}")
    j = i
    while j < len(s) and s[j] not in "(),{} \t":
        j += 1
    atom = s[i:j]
    if not atom:
        raise ValueError(f"empty point in {s!r}")
    try:
        return int(atom), j
    except ValueError:
        return atom, j


def split_points(text):
    """Whitespace or comma separated points, parentheses respected."""
    s = text.strip()
    out = []
    i = 0
    while i < len(s):
        if s[i] in " \t,":
            i += 1
            continue
        p, i = _point(s, i)
        out.append(p)
    return out


def parse_set(text):
    """Set literal such as ``{l, r}`` or ``{(m,m)}``; braces optional."""
    s = text.strip()
    if s.startswith("{"):
        if not s.endswith("}"):
            raise ValueError(f"unterminated set literal {text!r}")
        s = s[1:-1]
    return frozenset(split_points(s))


def format_point(p):
    if isinstance(p, tuple):
        return "(" + ",".join(format_point(q) for q in p) + ")"
    return str(p)


def format_set(S):
    return "{" + ", ".join(format_point(p) for p in sorted(S, key=point_key)) + "}"


# --------------------------------------------------------------- registry

@dataclass
class Document:
    spaces: dict = field(default_factory=dict)
    maps: dict = field(default_factory=dict)
    actions: dict = field(default_factory=dict)
    canopies: dict = field(default_factory=dict)
    order: list = field(default_factory=list)

    def last(self, kind):
        for k, name in reversed(self.order):
            if k == kind:
                return getattr(self, kind + "s" if kind != "canopy" else "canopies")[name]
        return None


def _lines(text):
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield n, line


def _blocks(text, fname):
    cur = None
    for n, line in _lines(text):
        word = line.split(None, 1)[0]
        if word in HEADERS:
            if cur:
                yield cur
            cur = (word, n, line, [])
        elif cur is None:
            raise ParseError(fname, n, f"expected one of {', '.join(HEADERS)}, found {word!r}")
        else:
            cur[3].append((n, line))
    if cur:
        yield cur


def parse_text(text, fname="<text>", doc=None):
    doc = doc if doc is not None else Document()
    for kind, n, header, body in _blocks(text, fname):
        try:
            if kind == "space":
                obj = _space_block(header, body, fname, n)
                prev = doc.spaces.get(obj.name)
                if prev is not None and prev != obj:
                    raise ParseError(fname, n, f"space {obj.name} redefined differently")
                doc.spaces[obj.name] = prev or obj
            elif kind == "map":
                obj = _map_block(header, body, fname, n, doc)
                doc.maps[obj.name] = obj
            elif kind == "action":
                obj = _action_block(header, body, fname, n, doc)
                doc.actions[obj.name] = obj
            else:
                obj = _canopy_block(header, body, fname, n, doc)
                doc.canopies[obj.name] = obj
        except ParseError:
            raise
        except ValueError as exc:
            if isinstance(exc, GentopError) and not isinstance(exc, UnknownPoint):
                raise
            raise ParseError(fname, getattr(exc, "line", n), str(exc)) from None
        doc.order.append((kind, obj.name))
    return doc


def parse_file(path, doc=None):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(str(path), 0, f"cannot read file: {exc.strerror}") from None
    return parse_text(text, str(path), doc)


def parse_files(paths):
    """Parse every file into one shared document before anything is computed."""
    doc = Document()
    for p in paths:
        parse_file(p, doc)
    return doc


def _header_name(header, fname, n, minimum=2):
    parts = header.split()
    if len(parts) < minimum:
        raise ParseError(fname, n, f"{parts[0]} header needs a name")
    return parts


def _space_block(header, body, fname, n):
    parts = _header_name(header, fname, n)
    if len(parts) != 2:
        raise ParseError(fname, n, "space header is 'space <name>'")
    name = parts[1]
    points = None
    table = {}
    where = {}
    for ln, line in body:
        word, _, rest = line.partition(" ")
        if word == "points":
            if points is not None:
                raise ParseError(fname, ln, "points given twice")
            try:
                points = split_points(rest)
            except ValueError as exc:
                raise ParseError(fname, ln, str(exc)) from None
            if len(set(points)) != len(points):
                raise ParseError(fname, ln, "repeated point")
        elif word == "minopen":
            left, sep, right = rest.partition(":")
            if not sep:
                raise ParseError(fname, ln, "minopen line is 'minopen <p> : <q> ...'")
            try:
                p = parse_point(left)
                qs = split_points(right)
            except ValueError as exc:
                raise ParseError(fname, ln, str(exc)) from None
            if p in table:
                raise ParseError(fname, ln, f"minimal open of {format_point(p)} given twice")
            if points is not None and p not in points:
                raise ParseError(fname, ln, f"unknown point {format_point(p)}")
            table[p] = qs
            where[p] = ln
        else:
            raise ParseError(fname, ln, f"unexpected {word!r} in space block")
    if points is None:
        raise ParseError(fname, n, "space block has no points line")
    known = set(points)
    for p, qs in table.items():
        ln = where[p]
        if p not in known:
            raise ParseError(fname, ln, f"unknown point {format_point(p)}")
        for q in qs:
            if q not in known:
                raise ParseError(fname, ln, f"minimal open of {format_point(p)} mentions unknown point {format_point(q)}")
        if p not in qs:
            raise ParseError(fname, ln, f"{format_point(p)} is not in its own minimal open")
    for p, qs in table.items():
        for q in qs:
            if q in table and not set(table[q]) <= set(qs):
                raise ParseError(fname, where[p], f"{format_point(q)} lies in the minimal open of {format_point(p)} but its own minimal open is not contained in it")
    try:
        return make_space(points, table, name)
    except ValueError as exc:
        raise ParseError(fname, n, str(exc)) from None


def _space_ref(doc, name, fname, n):
    if name not in doc.spaces:
        raise ParseError(fname, n, f"unknown space {name!r}")
    return doc.spaces[name]


def _pairs(body, fname, dom, cod):
    f = {}
    for ln, line in body:
        left, sep, right = line.partition("->")
        if not sep:
            raise ParseError(fname, ln, "expected 'p -> q'")
        try:
            p, q = parse_point(left), parse_point(right)
        except ValueError as exc:
            raise ParseError(fname, ln, str(exc)) from None
        if p not in dom:
            raise ParseError(fname, ln, f"{format_point(p)} is not a point of {dom.name}")
        if q not in cod:
            raise ParseError(fname, ln, f"{format_point(q)} is not a point of {cod.name}")
        if p in f:
            raise ParseError(fname, ln, f"{format_point(p)} mapped twice")
        f[p] = q
    return f


def _map_block(header, body, fname, n, doc):
    left, sep, right = header[len("map"):].partition(":")
    arrow = right.split("->")
    if not sep or len(arrow) != 2 or not left.strip():
        raise ParseError(fname, n, "map header is 'map <name> : <A> -> <B>'")
    name = left.strip()
    A = _space_ref(doc, arrow[0].strip(), fname, n)
    B = _space_ref(doc, arrow[1].strip(), fname, n)
    f = _pairs(body, fname, A, B)
    missing = [p for p in A.points if p not in f]
    if missing:
        raise ParseError(fname, n, f"no image given for {format_point(missing[0])}")
    # continuity is a property to check, not a parse condition
    return ContinuousMap(A, B, f, check=False, name=name)


def _action_block(header, body, fname, n, doc):
    from .grpquot import make_action
    parts = header.split()
    if len(parts) != 4 or parts[2] != "on":
        raise ParseError(fname, n, "action header is 'action <name> on <space>'")
    name = parts[1]
    M = _space_ref(doc, parts[3], fname, n)
    elements = identity = None
    mul = {}
    maps = {}
    for ln, line in body:
        word, _, rest = line.partition(" ")
        try:
            if word == "elements":
                elements = split_points(rest)
            elif word == "identity":
                identity = parse_point(rest)
            elif word == "table":
                lhs, sep, rhs = rest.partition("=")
                gh = split_points(lhs)
                if not sep or len(gh) != 2:
                    raise ParseError(fname, ln, "table line is 'table g h = gh'")
                mul[(gh[0], gh[1])] = parse_point(rhs)
            elif word == "act":
                g, sep, pair = rest.partition(":")
                if not sep:
                    raise ParseError(fname, ln, "act line is 'act g : p -> q'")
                g = parse_point(g)
                maps.setdefault(g, {}).update(_pairs([(ln, pair)], fname, M, M))
            else:
                raise ParseError(fname, ln, f"unexpected {word!r} in action block")
        except ParseError:
            raise
        except ValueError as exc:
            raise ParseError(fname, ln, str(exc)) from None
    if elements is None or identity is None:
        raise ParseError(fname, n, "action block needs elements and identity lines")
    for g, m in maps.items():
        missing = [p for p in M.points if p not in m]
        if missing:
            raise ParseError(fname, n, f"map for {format_point(g)} misses {format_point(missing[0])}")
    # table and homeomorphism problems surface as InvalidAction
    return make_action(M, elements, identity, mul, maps, name)


def _canopy_block(header, body, fname, n, doc):
    from .canopy import Canopy
    parts = header.split()
    if len(parts) != 2:
        raise ParseError(fname, n, "canopy header is 'canopy <name>'")
    charts = {}
    overlaps = {}
    rho = {"rho1": {}, "rho2": {}}
    lines = {}
    for ln, line in body:
        word, _, rest = line.partition(" ")
        try:
            if word == "chart":
                j, sname = rest.split()
                charts[parse_point(j)] = _space_ref(doc, sname, fname, ln)
            elif word == "overlap":
                j, k, sname = rest.split()
                overlaps[(parse_point(j), parse_point(k))] = _space_ref(doc, sname, fname, ln)
            elif word in rho:
                jk, sep, pair = rest.partition(":")
                j, k = split_points(jk)
                key = (j, k)
                rho[word].setdefault(key, []).append((ln, pair))
                lines.setdefault(key, ln)
            else:
                raise ParseError(fname, ln, f"unexpected {word!r} in canopy block")
        except ParseError:
            raise
        except ValueError as exc:
            raise ParseError(fname, ln, str(exc)) from None
    maps = {"rho1": {}, "rho2": {}}
    for key, Z in overlaps.items():
        j, k = key
        if j not in charts or k not in charts:
            raise ParseError(fname, n, f"overlap {key} refers to an unknown chart")
        for which, target in (("rho1", charts[j]), ("rho2", charts[k])):
            f = _pairs(rho[which].get(key, []), fname, Z, target)
            missing = [p for p in Z.points if p not in f]
            if missing:
                raise ParseError(fname, lines.get(key, n), f"{which} of overlap {key} misses {format_point(missing[0])}")
            maps[which][key] = ContinuousMap(Z, target, f, check=False)
    for which in rho:
        for key in rho[which]:
            if key not in overlaps:
                raise ParseError(fname, lines[key], f"{which} given for undeclared overlap {key}")
    index = tuple(sorted(charts, key=point_key))
    return Canopy(index, charts, overlaps, maps["rho1"], maps["rho2"], parts[1])


# -------------------------------------------------------------- emitters

def emit_space(space, name=None):
    name = name or space.name or "X"
    out = [f"space {name}", " ".join(["points"] + [format_point(p) for p in space.points])]
    for p, m in zip(space.points, space.masks):
        out.append(f"minopen {format_point(p)} : " + " ".join(format_point(q) for q in space.sorted_points(m)))
    return "\n".join(out) + "\n"


def emit_map(f, name=None, with_spaces=False):
    name = name or f.name or "f"
    out = []
    if with_spaces:
        out.append(emit_space(f.dom).rstrip("\n"))
        if f.cod.name != f.dom.name:
            out.append(emit_space(f.cod).rstrip("\n"))
    out.append(f"map {name} : {f.dom.name} -> {f.cod.name}")
    for p, j in zip(f.dom.points, f.img):
        out.append(f"{format_point(p)} -> {format_point(f.cod.points[j])}")
    return "\n".join(out) + "\n"


def emit_action(action, name=None):
    name = name or action.name or "G"
    els = list(action.elements)
    out = [f"action {name} on {action.space.name}"]
    out.append("elements " + " ".join(format_point(g) for g in els))
    out.append(f"identity {format_point(action.identity)}")
    for g in els:
        for h in els:
            out.append(f"table {format_point(g)} {format_point(h)} = {format_point(action.mul[(g, h)])}")
    for g in els:
        if g == action.identity:
            continue
        a = action.act[g]
        for p, j in zip(a.dom.points, a.img):
            out.append(f"act {format_point(g)} : {format_point(p)} -> {format_point(a.cod.points[j])}")
    return "\n".join(out) + "\n"


def emit_canopy(canopy, name=None):
    name = name or canopy.name or "C"
    out = [f"canopy {name}"]
    for j in canopy.index:
        out.append(f"chart {format_point(j)} {canopy.objects[j].name}")
    for key in canopy.overlap_keys():
        j, k = key
        out.append(f"overlap {format_point(j)} {format_point(k)} {canopy.overlaps[key].name}")
    for key in canopy.overlap_keys():
        j, k = key
        for which in ("rho1", "rho2"):
            r = getattr(canopy, which)[key]
            for p, t in zip(r.dom.points, r.img):
                out.append(f"{which} {format_point(j)} {format_point(k)} : {format_point(p)} -> {format_point(r.cod.points[t])}")
    return "\n".join(out) + "\n"


def write_csv(rows):
    """CSV text with LF endings; quoting only when a field needs it."""
    import csv
    import io as _io
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for row in rows:
        w.writerow(row)
    return buf.getvalue()


def emit_canopy_document(canopy, name=None):
    """Spaces and canopy in one self-contained text; unnamed spaces get chart and overlap names."""
    from dataclasses import replace
    objects = {}
    overlaps = {}
    rho1, rho2 = {}, {}
    blocks = []
    seen = {}

    def named(space, fallback):
        label = space.name or fallback
        if label in seen and seen[label] != space:
            label = fallback
        if label not in seen:
            seen[label] = space
            blocks.append(emit_space(space, label))
        return FinSpace(space.points, space.masks, label)

    for j in canopy.index:
        objects[j] = named(canopy.objects[j], f"chart_{_slug(j)}")
    for key in canopy.overlap_keys():
        j, k = key
        Z = named(canopy.overlaps[key], f"overlap_{_slug(j)}_{_slug(k)}")
        overlaps[key] = Z
        rho1[key] = ContinuousMap.from_indices(Z, objects[j], canopy.rho1[key].img)
        rho2[key] = ContinuousMap.from_indices(Z, objects[k], canopy.rho2[key].img)
    renamed = replace(canopy, objects=objects, overlaps=overlaps, rho1=rho1, rho2=rho2)
    blocks.append(emit_canopy(renamed, name))
    return "".join(blocks)


def _slug(p):
    return format_point(p).replace("(", "").replace(")", "").replace(",", "_")
