"""Line-oriented text format for sites, presheaves, functors, 2-cells and
colimit-preserving functor specs.

A file is a sequence of blocks::

    category E
      p = 2
      objects = *
      dim * * = 2
      comp * * * = 1 0; 0 0; 0 0; 0 1
      ident * = 1 1
    end

Blocks open with a keyword and a name and close with ``end``; fields are
``key args... = value`` lines; matrices are ``;``-separated rows of
space-separated residues; ``#`` at the start of a token begins a comment.
``import path`` at top level splices another file in place.  The exact
grammar is in ``docs/format.ebnf``.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import exactalg as ea
from .lincat import (LinearCategory, LinearFunctor, NatTransform, compose_functors, identity_functor,
                     naturality_failures, validate_category, validate_functor)
from .presheaf import Presheaf, PresheafMorphism, Sieve, maximal_sieve, sieve_generated, zero_sieve
from .topology import CoverSystem, Site, TopologyError

KINDS = ("scalar", "category", "topology", "presheaf", "functor", "nattrans", "spec")
_NAME = re.compile(r"^[^\s=;#]+$")


class WorkspaceError(ValueError):
    """Syntax or semantic error; carries a location or the offending block."""

    def __init__(self, msg, line=None, col=None, block=None, source=None):
        self.msg, self.line, self.col, self.block, self.source = msg, line, col, block, source
        where = []
        if source is not None:
            where.append(str(source))
        if line is not None:
            where.append(f"{line}:{col or 1}")
        if block is not None:
            where.append(f"block {block}")
        super().__init__(("[" + " ".join(where) + "] " if where else "") + msg)


@dataclass
class Entry:
    kind: str
    name: str
    obj: object
    refs: dict = field(default_factory=dict)


# --- matrices ------------------------------------------------------------------------

def parse_matrix(text: str, p: int) -> np.ndarray:
    rows = [r.split() for r in text.split(";")]
    if any(not r for r in rows) or len({len(r) for r in rows}) != 1:
        raise ValueError(f"ragged or empty matrix {text!r}")
    try:
        return ea.reduce(np.array([[int(x) for x in r] for r in rows], dtype=np.int64), p)
    except ValueError:
        raise ValueError(f"non-integer entry in {text!r}") from None


def parse_vector(text: str, p: int) -> np.ndarray:
    m = parse_matrix(text, p)
    if m.shape[0] != 1:
        raise ValueError(f"expected a single row, got {text!r}")
    return m[0]


def format_matrix(m) -> str:
    m = np.atleast_2d(np.asarray(m))
    return "; ".join(" ".join(str(int(x)) for x in row) for row in m)


# --- workspace -------------------------------------------------------------------------

class Workspace:
    """Named, ordered collection of parsed objects."""

    def __init__(self):
        self.entries: dict[str, Entry] = {}
        self._sites: dict[str, Site] = {}
        self._specs: dict = {}
        self._morphisms: dict = {}

    def __contains__(self, name):
        return name in self.entries

    def __iter__(self):
        return iter(self.entries.values())

    def names(self, kind=None):
        return [e.name for e in self.entries.values() if kind is None or e.kind == kind]

    def _add(self, entry: Entry):
        if entry.name in self.entries:
            raise WorkspaceError(f"duplicate name {entry.name!r}", block=entry.name)
        if not _NAME.match(entry.name):
            raise WorkspaceError(f"invalid name {entry.name!r}", block=entry.name)
        self.entries[entry.name] = entry
        return entry.obj

    def get(self, name, kinds=None) -> Entry:
        if name not in self.entries:
            raise WorkspaceError(f"undefined name {name!r}")
        e = self.entries[name]
        if kinds is not None and e.kind not in kinds:
            raise WorkspaceError(f"{name!r} is a {e.kind}, expected {' or '.join(kinds)}")
        return e

    # builders (shared by the parser and by programmatic construction)
    def add_scalar(self, name, p):
        if p < 2 or any(p % d == 0 for d in range(2, int(p ** 0.5) + 1)):
            raise WorkspaceError(f"{p} is not prime", block=name)
        return self._add(Entry("scalar", name, int(p)))

    def add_category(self, name, cat: LinearCategory, field_ref=None):
        rep = validate_category(cat)
        if not rep.ok:
            raise WorkspaceError(rep.violations[0], block=name)
        return self._add(Entry("category", name, cat, {"field": field_ref} if field_ref else {}))

    def add_topology(self, name, category: str, cs: CoverSystem):
        cat = self.get(category, ("category",)).obj
        if cs.cat is not cat:
            raise WorkspaceError("cover system lives on another category", block=name)
        return self._add(Entry("topology", name, cs, {"category": category}))

    def add_presheaf(self, name, site: str, f: Presheaf):
        if self.category_of(site) is not f.cat:
            raise WorkspaceError("presheaf lives on another category", block=name)
        rep = f.validate()
        if not rep.ok:
            raise WorkspaceError(rep.violations[0], block=name)
        return self._add(Entry("presheaf", name, f, {"site": site}))

    def add_functor(self, name, source: str, target: str, fn: LinearFunctor, form=None):
        if self.category_of(source) is not fn.source or self.category_of(target) is not fn.target:
            raise WorkspaceError("functor does not run between the named sites", block=name)
        rep = validate_functor(fn)
        if not rep.ok:
            raise WorkspaceError(rep.violations[0], block=name)
        return self._add(Entry("functor", name, fn, {"source": source, "target": target, "form": form}))

    def add_nattrans(self, name, source: str, target: str, alpha: NatTransform):
        return self._add(Entry("nattrans", name, alpha, {"source": source, "target": target}))

    def add_spec(self, name, **refs):
        return self._add(Entry("spec", name, None, refs))

    # resolution
    def category_of(self, site_name) -> LinearCategory:
        e = self.get(site_name, ("category", "topology"))
        return e.obj if e.kind == "category" else e.obj.cat

    def site(self, name) -> Site:
        """Unchecked site; commands run ``check_topology`` themselves."""
        if name not in self._sites:
            e = self.get(name, ("category", "topology"))
            if e.kind == "category":
                self._sites[name] = Site(e.obj, name=name, check=False)
            else:
                self._sites[name] = Site(e.obj.cat, e.obj, name=name, check=False)
        return self._sites[name]

    def checked_site(self, name) -> Site:
        from .topology import check_topology

        s = self.site(name)
        rep = check_topology(s.topology)
        if not rep.ok:
            raise TopologyError(f"site {name}: {rep.violations[0]}")
        return s

    def functor(self, name) -> LinearFunctor:
        return self.get(name, ("functor",)).obj

    def presheaf(self, name) -> Presheaf:
        return self.get(name, ("presheaf",)).obj

    def nattrans(self, name) -> NatTransform:
        return self.get(name, ("nattrans",)).obj

    def morphism(self, name):
        from .sitemorph import SiteMorphism

        if name not in self._morphisms:
            e = self.get(name, ("functor",))
            self._morphisms[name] = SiteMorphism(e.obj, self.checked_site(e.refs["source"]),
                                                 self.checked_site(e.refs["target"]), name=name)
        return self._morphisms[name]

    def spec(self, name):
        from .rooffrac import ColimFunctorSpec, identity_spec, upper_spec

        if name not in self._specs:
            e = self.get(name, ("spec",))
            r = e.refs
            if r["kind"] == "identity":
                self._specs[name] = identity_spec(self.checked_site(r["site"]))
            elif r["kind"] == "upper":
                self._specs[name] = upper_spec(self.morphism(r["morphism"]))
            else:
                src, tgt = self.checked_site(r["source"]), self.checked_site(r["target"])
                phi = {a: self.presheaf(v) for a, v in r["values"].items()}
                phimap = {}
                for (a, a2), mats in r["maps"].items():
                    phimap[(a, a2)] = [PresheafMorphism(phi[a], phi[a2], comps, name=f"{name}({a}->{a2})[{j}]")
                                       for j, comps in enumerate(mats)]
                self._specs[name] = ColimFunctorSpec(src, tgt, phi, phimap, name=name)
        return self._specs[name]

    def __eq__(self, other):
        return isinstance(other, Workspace) and serialize(self) == serialize(other)

    __hash__ = None


# --- parsing ------------------------------------------------------------------------------

@dataclass
class _Field:
    key: str
    args: list
    value: str
    line: int
    col: int


def _strip_comment(line: str) -> str:
    m = re.search(r"(^|\s)#", line)
    return line[:m.start()] if m else line


def _lex(text: str, source):
    """Yield ``(kind, payload, line)`` where kind is import/open/field/end."""
    for n, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw).rstrip()
        if not line.strip():
            continue
        col = len(line) - len(line.lstrip()) + 1
        body = line.strip()
        if "=" in body:
            lhs, _, rhs = body.partition("=")
            toks = lhs.split()
            if not toks:
                raise WorkspaceError("field without a key", n, col, source=source)
            yield "field", _Field(toks[0], toks[1:], rhs.strip(), n, col), n
            continue
        toks = body.split()
        if toks == ["end"]:
            yield "end", None, n
        elif toks[0] == "import" and len(toks) == 2:
            yield "import", toks[1], n
        elif toks[0] in KINDS and len(toks) == 2:
            yield "open", (toks[0], toks[1], col), n
        else:
            raise WorkspaceError(f"unexpected {body!r}", n, col, source=source)


def parse(text: str, source=None, workspace: Workspace | None = None, base_dir=None) -> Workspace:
    ws = workspace if workspace is not None else Workspace()
    block = None
    for kind, payload, n in _lex(text, source):
        if kind == "import":
            if block is not None:
                raise WorkspaceError("import inside a block", n, 1, source=source)
            path = Path(base_dir or ".") / payload
            try:
                sub = path.read_text(encoding="utf-8")
            except OSError as exc:
                raise WorkspaceError(f"cannot import {payload}: {exc.strerror}", n, 1, source=source) from None
            parse(sub, source=str(path), workspace=ws, base_dir=path.parent)
        elif kind == "open":
            if block is not None:
                raise WorkspaceError(f"block {block[1]} is not closed", n, payload[2], source=source)
            block = (payload[0], payload[1], [], n)
        elif kind == "field":
            if block is None:
                raise WorkspaceError("field outside a block", n, payload.col, source=source)
            block[2].append(payload)
        else:
            if block is None:
                raise WorkspaceError("'end' without a block", n, 1, source=source)
            _build(ws, *block[:3], source=source)
            block = None
    if block is not None:
        raise WorkspaceError(f"block {block[1]} is not closed", block[3], 1, source=source)
    return ws


def parse_file(path) -> Workspace:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise WorkspaceError(f"cannot read {path}: {exc.strerror}") from None
    return parse(text, source=str(path), base_dir=path.parent)


class _Fields:
    def __init__(self, kind, name, fields, source):
        self.kind, self.name, self.fields, self.source = kind, name, fields, source
        self.used = set()

    def err(self, msg, f: _Field | None = None):
        if f is None:
            return WorkspaceError(msg, block=self.name, source=self.source)
        return WorkspaceError(msg, f.line, f.col, block=self.name, source=self.source)

    def one(self, key, required=True):
        hits = [f for f in self.fields if f.key == key]
        self.used.add(key)
        if len(hits) > 1:
            raise self.err(f"field {key!r} given twice", hits[1])
        if not hits:
            if required:
                raise self.err(f"missing field {key!r}")
            return None
        if hits[0].args:
            raise self.err(f"field {key!r} takes no arguments", hits[0])
        return hits[0]

    def many(self, key, nargs):
        self.used.add(key)
        out = []
        for f in self.fields:
            if f.key == key:
                if len(f.args) != nargs:
                    raise self.err(f"field {key!r} takes {nargs} argument(s)", f)
                out.append(f)
        return out

    def finish(self):
        for f in self.fields:
            if f.key not in self.used:
                raise self.err(f"unknown field {f.key!r} in {self.kind}", f)


def _build(ws: Workspace, kind, name, fields, source=None):
    b = _Fields(kind, name, fields, source)
    try:
        globals()[f"_build_{kind}"](ws, name, b)
    except WorkspaceError as exc:
        if exc.block is None and exc.line is None:
            raise b.err(exc.msg) from None
        raise
    except (ValueError, KeyError, IndexError) as exc:
        raise b.err(str(exc)) from None
    b.finish()


def _resolve(ws, b, f: _Field, kinds):
    try:
        return ws.get(f.value, kinds)
    except WorkspaceError as exc:
        raise b.err(exc.msg, f) from None


def _build_scalar(ws, name, b):
    f = b.one("p")
    try:
        p = int(f.value)
    except ValueError:
        raise b.err(f"not an integer: {f.value!r}", f) from None
    ws.add_scalar(name, p)


def _prime(ws, b):
    fp, fr = b.one("p", required=False), b.one("field", required=False)
    if (fp is None) == (fr is None):
        raise b.err("give exactly one of 'p' or 'field'")
    if fr is not None:
        return _resolve(ws, b, fr, ("scalar",)).obj, fr.value
    p = int(fp.value)
    if p < 2 or any(p % d == 0 for d in range(2, int(p ** 0.5) + 1)):
        raise b.err(f"{p} is not prime", fp)
    return p, None


def _build_category(ws, name, b):
    p, ref = _prime(ws, b)
    objs = b.one("objects").value.split()
    if len(set(objs)) != len(objs):
        raise b.err("duplicate object names")
    dims = {(x, y): 0 for x in objs for y in objs}
    for f in b.many("dim", 2):
        if tuple(f.args) not in dims:
            raise b.err(f"unknown objects {f.args}", f)
        dims[tuple(f.args)] = int(f.value)
    comp = {(x, y, z): ea.zeros(dims[(y, z)] * dims[(x, y)], dims[(x, z)]) for x, y, z in
            itertools.product(objs, repeat=3)}
    for f in b.many("comp", 3):
        x, y, z = f.args
        if (x, y, z) not in comp:
            raise b.err(f"unknown objects {f.args}", f)
        m = parse_matrix(f.value, p)
        if m.shape != comp[(x, y, z)].shape:
            raise b.err(f"comp {x} {y} {z} has shape {m.shape}, expected {comp[(x, y, z)].shape}", f)
        comp[(x, y, z)] = m
    comp = {k: v.reshape(dims[(k[1], k[2])], dims[(k[0], k[1])], dims[(k[0], k[2])]) for k, v in comp.items()}
    ident = {x: np.zeros(dims[(x, x)], dtype=np.int64) for x in objs}
    for f in b.many("ident", 1):
        x = f.args[0]
        if x not in ident:
            raise b.err(f"unknown object {x}", f)
        v = parse_vector(f.value, p)
        if v.shape != ident[x].shape:
            raise b.err(f"identity of {x} needs {dims[(x, x)]} entries", f)
        ident[x] = v
    names = {}
    for f in b.many("basis", 2):
        x, y = f.args
        labels = f.value.split()
        if len(labels) != dims.get((x, y), -1):
            raise b.err(f"basis of hom({x},{y}) needs {dims.get((x, y))} labels", f)
        names.update({(x, y, j): s for j, s in enumerate(labels)})
    cat = LinearCategory(objs, dims, comp, ident, p, names=names, name=name)
    ws.add_category(name, cat, field_ref=ref)


def parse_sieve(cat: LinearCategory, base, text: str) -> Sieve:
    t = text.strip()
    if t == "max":
        return maximal_sieve(cat, base)
    if t == "zero":
        return zero_sieve(cat, base)
    family = []
    for part in t.split(";"):
        toks = part.split()
        if not toks or toks[0] not in cat.objects:
            raise ValueError(f"sieve generator {part.strip()!r} must start with an object name")
        x = toks[0]
        v = np.array([int(s) for s in toks[1:]], dtype=np.int64) % cat.p
        if len(v) != cat.d(x, base):
            raise ValueError(f"generator from {x} needs {cat.d(x, base)} coordinates")
        family.append((x, v))
    return sieve_generated(cat, base, family)


def format_sieve(s: Sieve) -> str:
    if s.is_maximal():
        return "max"
    if s.is_zero():
        return "zero"
    return "; ".join(f"{x} " + " ".join(str(int(c)) for c in row) for x, row in s.generators())


def _build_topology(ws, name, b):
    f = b.one("category")
    cat = _resolve(ws, b, f, ("category",)).obj
    covers = {x: [] for x in cat.objects}
    for c in b.many("cover", 1):
        x = c.args[0]
        if x not in covers:
            raise b.err(f"unknown object {x}", c)
        try:
            covers[x].append(parse_sieve(cat, x, c.value))
        except ValueError as exc:
            raise b.err(str(exc), c) from None
    ws.add_topology(name, f.value, CoverSystem(cat, covers))


def _build_presheaf(ws, name, b):
    f = b.one("site")
    _resolve(ws, b, f, ("category", "topology"))
    cat = ws.category_of(f.value)
    dims = {x: 0 for x in cat.objects}
    for d in b.many("dim", 1):
        if d.args[0] not in dims:
            raise b.err(f"unknown object {d.args[0]}", d)
        dims[d.args[0]] = int(d.value)
    act = {(x, y): np.zeros((cat.d(x, y), dims[x], dims[y]), dtype=np.int64)
           for x in cat.objects for y in cat.objects}
    for a in b.many("act", 3):
        x, y, j = a.args
        if (x, y) not in act or not 0 <= int(j) < cat.d(x, y):
            raise b.err(f"no basis morphism {j} in hom({x},{y})", a)
        m = parse_matrix(a.value, cat.p)
        if m.shape != (dims[x], dims[y]):
            raise b.err(f"act {x} {y} {j} has shape {m.shape}, expected {(dims[x], dims[y])}", a)
        act[(x, y)][int(j)] = m
    ws.add_presheaf(name, f.value, Presheaf(cat, dims, act, name=name, check=False))


def _build_functor(ws, name, b):
    fs, ft = b.one("source"), b.one("target")
    _resolve(ws, b, fs, ("category", "topology"))
    _resolve(ws, b, ft, ("category", "topology"))
    src, tgt = ws.category_of(fs.value), ws.category_of(ft.value)
    fc, fi = b.one("compose", required=False), b.one("identity", required=False)
    if fc is not None:
        parts = fc.value.split()
        if len(parts) != 2:
            raise b.err("compose takes two functor names (outer first)", fc)
        g, f = (_resolve(ws, b, _Field("", [], s, fc.line, fc.col), ("functor",)).obj for s in parts)
        if f.target is not g.source:
            raise b.err("functors in compose are not composable", fc)
        fn = compose_functors(g, f, name=name)
        form = ("compose", parts[0], parts[1])
    elif fi is not None:
        if fs.value != ft.value:
            raise b.err("identity functor needs equal source and target")
        fn, form = identity_functor(src, name=name), ("identity",)
    else:
        fobj = {}
        for o in b.many("obj", 1):
            if o.args[0] not in src.objects or o.value not in tgt.objects:
                raise b.err(f"bad object assignment {o.args[0]} -> {o.value}", o)
            fobj[o.args[0]] = o.value
        missing = [x for x in src.objects if x not in fobj]
        if missing:
            raise b.err(f"objects {missing} are not assigned")
        fmap = {(x, y): ea.zeros(tgt.d(fobj[x], fobj[y]), src.d(x, y)) for x in src.objects for y in src.objects}
        for m in b.many("map", 2):
            key = tuple(m.args)
            if key not in fmap:
                raise b.err(f"unknown objects {m.args}", m)
            mat = parse_matrix(m.value, tgt.p)
            if mat.shape != fmap[key].shape:
                raise b.err(f"map {key[0]} {key[1]} has shape {mat.shape}, expected {fmap[key].shape}", m)
            fmap[key] = mat
        fn, form = LinearFunctor(src, tgt, fobj, fmap, name=name), None
    if fn.source is not src or fn.target is not tgt:
        raise b.err("functor does not run between the named sites")
    ws.add_functor(name, fs.value, ft.value, fn, form=form)


def _build_nattrans(ws, name, b):
    fs, ft = b.one("source"), b.one("target")
    f = _resolve(ws, b, fs, ("functor",)).obj
    g = _resolve(ws, b, ft, ("functor",)).obj
    comps = {}
    for a in b.many("at", 1):
        x = a.args[0]
        if x not in f.source.objects:
            raise b.err(f"unknown object {x}", a)
        comps[x] = parse_vector(a.value, f.target.p)
    for x in f.source.objects:
        comps.setdefault(x, np.zeros(f.target.d(f(x), g(x)), dtype=np.int64))
        if len(comps[x]) != f.target.d(f(x), g(x)):
            raise b.err(f"component at {x} needs {f.target.d(f(x), g(x))} coordinates")
    alpha = NatTransform(f, g, comps, name=name, check=False)
    bad = naturality_failures(alpha)
    if bad:
        raise b.err(bad[0])
    ws.add_nattrans(name, fs.value, ft.value, alpha)


def _build_spec(ws, name, b):
    k = b.one("kind")
    if k.value == "identity":
        s = b.one("site")
        _resolve(ws, b, s, ("category", "topology"))
        ws.add_spec(name, kind="identity", site=s.value)
    elif k.value == "upper":
        m = b.one("morphism")
        _resolve(ws, b, m, ("functor",))
        ws.add_spec(name, kind="upper", morphism=m.value)
    elif k.value == "explicit":
        fs, ft = b.one("source"), b.one("target")
        _resolve(ws, b, fs, ("category", "topology"))
        _resolve(ws, b, ft, ("category", "topology"))
        src, tgt = ws.category_of(fs.value), ws.category_of(ft.value)
        values = {}
        for v in b.many("value", 1):
            pre = _resolve(ws, b, v, ("presheaf",)).obj
            if pre.cat is not tgt or v.args[0] not in src.objects:
                raise b.err(f"value at {v.args[0]} must be a presheaf on {ft.value}", v)
            values[v.args[0]] = v.value
        if set(values) != set(src.objects):
            raise b.err("every source object needs a value")
        phi = {a: ws.presheaf(values[a]) for a in src.objects}
        maps = {(a, a2): [{c: ea.zeros(phi[a2].dims[c], phi[a].dims[c]) for c in tgt.objects}
                          for _ in range(src.d(a, a2))] for a in src.objects for a2 in src.objects}
        for m in b.many("map", 4):
            a, a2, j, c = m.args
            if (a, a2) not in maps or not 0 <= int(j) < src.d(a, a2) or c not in tgt.objects:
                raise b.err(f"bad map index {m.args}", m)
            mat = parse_matrix(m.value, tgt.p)
            if mat.shape != maps[(a, a2)][int(j)][c].shape:
                raise b.err(f"map {' '.join(m.args)} has shape {mat.shape}", m)
            maps[(a, a2)][int(j)][c] = mat
        ws.add_spec(name, kind="explicit", source=fs.value, target=ft.value, values=values, maps=maps)
    else:
        raise b.err(f"unknown spec kind {k.value!r}", k)


# --- serialization -------------------------------------------------------------------

def serialize(ws: Workspace) -> str:
    out = []
    for e in ws:
        lines = globals()[f"_ser_{e.kind}"](ws, e)
        out.append(f"{e.kind} {e.name}\n" + "".join(f"  {ln}\n" for ln in lines) + "end\n")
    return "\n".join(out)


def _ser_scalar(ws, e):
    return [f"p = {e.obj}"]


def _ser_category(ws, e):
    c: LinearCategory = e.obj
    lines = [f"field = {e.refs['field']}" if e.refs.get("field") else f"p = {c.p}",
             "objects = " + " ".join(c.objects)]
    for x, y in itertools.product(c.objects, repeat=2):
        if c.d(x, y):
            lines.append(f"dim {x} {y} = {c.d(x, y)}")
            labels = [c.names.get((x, y, j)) for j in range(c.d(x, y))]
            if all(lbl is not None for lbl in labels):
                lines.append(f"basis {x} {y} = " + " ".join(labels))
    for x, y, z in itertools.product(c.objects, repeat=3):
        t = c.comp[(x, y, z)]
        if t.size:
            lines.append(f"comp {x} {y} {z} = " + format_matrix(t.reshape(-1, t.shape[2])))
    for x in c.objects:
        if c.d(x, x):
            lines.append(f"ident {x} = " + format_matrix(c.ident[x]))
    return lines


def _ser_topology(ws, e):
    cs: CoverSystem = e.obj
    lines = [f"category = {e.refs['category']}"]
    for x in cs.cat.objects:
        lines += [f"cover {x} = {format_sieve(s)}" for s in cs.covering(x)]
    return lines


def _ser_presheaf(ws, e):
    f: Presheaf = e.obj
    lines = [f"site = {e.refs['site']}"]
    lines += [f"dim {x} = {f.dims[x]}" for x in f.cat.objects if f.dims[x]]
    for (x, y), t in f.act.items():
        if t.size:
            lines += [f"act {x} {y} {j} = {format_matrix(t[j])}" for j in range(t.shape[0]) if np.any(t[j])]
    return lines


def _ser_functor(ws, e):
    fn: LinearFunctor = e.obj
    lines = [f"source = {e.refs['source']}", f"target = {e.refs['target']}"]
    form = e.refs.get("form")
    if form and form[0] == "compose":
        return lines + [f"compose = {form[1]} {form[2]}"]
    if form and form[0] == "identity":
        return lines + ["identity = yes"]
    lines += [f"obj {x} = {fn(x)}" for x in fn.source.objects]
    lines += [f"map {x} {y} = {format_matrix(m)}" for (x, y), m in fn.fmap.items() if m.size and np.any(m)]
    return lines


def _ser_nattrans(ws, e):
    a: NatTransform = e.obj
    lines = [f"source = {e.refs['source']}", f"target = {e.refs['target']}"]
    return lines + [f"at {x} = {format_matrix(a[x])}" for x in a.source.source.objects if len(a[x])]


def _ser_spec(ws, e):
    r = e.refs
    if r["kind"] == "identity":
        return ["kind = identity", f"site = {r['site']}"]
    if r["kind"] == "upper":
        return ["kind = upper", f"morphism = {r['morphism']}"]
    lines = ["kind = explicit", f"source = {r['source']}", f"target = {r['target']}"]
    lines += [f"value {a} = {v}" for a, v in r["values"].items()]
    for (a, a2), mats in r["maps"].items():
        for j, comps in enumerate(mats):
            lines += [f"map {a} {a2} {j} {c} = {format_matrix(m)}" for c, m in comps.items() if m.size and np.any(m)]
    return lines


# --- the built-in fixture workspace ------------------------------------------------------

def builtin_workspace() -> Workspace:
    """The fixture corpus under stable names (shipped as ``workspaces/fixtures.lsw``)."""
    from . import fixtures as fx
    from .presheaf import representable

    ws = Workspace()
    ws.add_scalar("F2", fx.P)
    ws.add_category("FIX-P", fx.point_category("FIX-P"), field_ref="F2")
    ws.add_category("FIX-E.cat", fx.idempotent_category("FIX-E.cat"), field_ref="F2")
    ecat = ws.get("FIX-E.cat").obj
    pcat = ws.get("FIX-P").obj
    ws.add_topology("FIX-P0", "FIX-P", CoverSystem(pcat, {"*": [maximal_sieve(pcat, "*"), zero_sieve(pcat, "*")]}))
    ws.add_topology("FIX-E", "FIX-E.cat", CoverSystem(ecat, {"*": [maximal_sieve(ecat, "*"), fx.e1_sieve(ecat)]}))
    ws.add_topology("FIX-E/e2", "FIX-E.cat", CoverSystem(ecat, {"*": [maximal_sieve(ecat, "*"), fx.e2_sieve(ecat)]}))
    ws.add_topology("FIX-E-with-both-idempotent-sieves", "FIX-E.cat",
                    CoverSystem(ecat, {"*": [maximal_sieve(ecat, "*"), fx.e1_sieve(ecat), fx.e2_sieve(ecat)]}))
    _, _, inc = fx.fix_dg()
    big = inc.target
    bcat = LinearCategory(big.objects, big.dims, big.comp, big.ident, big.p, name="FIX-DG.B")
    ws.add_category("FIX-DG.B", bcat, field_ref="F2")
    acat = LinearCategory(inc.source.objects, inc.source.dims, inc.source.comp, inc.source.ident, big.p,
                          name="FIX-DG.A")
    ws.add_category("FIX-DG.A", acat, field_ref="F2")
    ws.add_functor("FIX-DG.f", "FIX-DG.A", "FIX-DG.B", LinearFunctor(acat, bcat, inc.fobj, inc.fmap, name="FIX-DG.f"))
    ws.add_functor("FIX-DG.id", "FIX-DG.B", "FIX-DG.B", identity_functor(bcat, name="FIX-DG.id"), form=("identity",))
    tw = fx.twist_matrix()
    from .lincat import conjugated_functor

    v, theta = conjugated_functor(ws.functor("FIX-DG.id"), {"u": np.array([1]), "v": tw}, name="FIX-DG.twisted")
    ws.add_functor("FIX-DG.twisted", "FIX-DG.B", "FIX-DG.B", v)
    ws.add_nattrans("FIX-DG.theta", "FIX-DG.twisted", "FIX-DG.id",
                    NatTransform(v, ws.functor("FIX-DG.id"), theta.components, name="FIX-DG.theta"))
    ws.add_functor("FIX-E.id", "FIX-E", "FIX-E", identity_functor(ecat, name="FIX-E.id"), form=("identity",))
    ide = ws.functor("FIX-E.id")
    ws.add_nattrans("FIX-E.one", "FIX-E.id", "FIX-E.id", NatTransform(ide, ide, {"*": fx.E1 + fx.E2}, name="FIX-E.one"))
    ws.add_nattrans("FIX-E.e1", "FIX-E.id", "FIX-E.id", NatTransform(ide, ide, {"*": fx.E1}, name="FIX-E.e1"))
    ws.add_functor("FIX-E.swap", "FIX-E", "FIX-E/e2",
                   LinearFunctor(ecat, ecat, {"*": "*"}, {("*", "*"): np.array([[0, 1], [1, 0]])}, name="FIX-E.swap"))
    ws.add_functor("P->E", "FIX-P", "FIX-E",
                   LinearFunctor(pcat, ecat, {"*": "*"}, {("*", "*"): np.array([[1], [1]])}, name="P->E"))
    ws.add_functor("FIX-P0.id", "FIX-P0", "FIX-P0", identity_functor(pcat, name="FIX-P0.id"), form=("identity",))
    idp0 = ws.functor("FIX-P0.id")
    ws.add_nattrans("FIX-P0.zero", "FIX-P0.id", "FIX-P0.id", NatTransform(idp0, idp0, {"*": np.array([0])}, name="FIX-P0.zero"))
    ws.add_nattrans("FIX-P0.one", "FIX-P0.id", "FIX-P0.id", NatTransform(idp0, idp0, {"*": np.array([1])}, name="FIX-P0.one"))
    h = representable(ecat, "*")
    ws.add_presheaf("FIX-E.h_star", "FIX-E", Presheaf(ecat, h.dims, h.act, name="FIX-E.h_star"))
    for i in (1, 2):
        m = fx.module_e(i)
        ws.add_presheaf(f"FIX-E.M_e{i}", "FIX-E", Presheaf(ecat, m.dims, m.act, name=f"FIX-E.M_e{i}"))
    ws.add_presheaf("FIX-P0.k", "FIX-P0", Presheaf(pcat, {"*": 1}, {("*", "*"): np.ones((1, 1, 1), dtype=np.int64)},
                                                     name="FIX-P0.k"))
    ws.add_spec("id.FIX-P", kind="identity", site="FIX-P")
    ws.add_spec("id.FIX-E", kind="identity", site="FIX-E")
    ws.add_spec("FIX-DG.f^s", kind="upper", morphism="FIX-DG.f")
    zero = {"*": ea.zeros(1, 1)}
    ws.add_spec("FIX-E.e1-part", kind="explicit", source="FIX-E", target="FIX-E", values={"*": "FIX-E.M_e1"},
                maps={("*", "*"): [{"*": np.array([[1]])}, zero]})
    return ws
