"""Line-oriented text format for groups, complexes, maps and extensions.

A document is a sequence of named entities:

    group Z4
      gens 1
      rels [[4]]

    complex K
      deg -1: Zfree
      deg 0: Zfree
      d -1: [[2]]

    map f : K -> A
      deg 0: [[1]]

    fraction i : B -> E
      apex M
      q deg 0: [[1]]
      p deg 0: [[2]]

    extension X
      A Acx
      B Bcx
      E Ecx
      i ifrac
      j jmap
      R deg 0: [[0]]

    class x : A -> B
      degree 1
      divisors [2]
      coords [1]

Blank lines and ``#`` comments are ignored. Every reference must
resolve, and every entity re-validates on load (d o d = 0, chain-map
commutation, quasi-iso legs, homotopy identities); failures raise
``DocSemanticError`` naming the invariant, syntax problems raise
``DocParseError`` with line and column.
"""

from __future__ import annotations

from .complexes import ChainHomotopy, ChainMap, Complex
from .derived import DerivedClass, ExtGroup
from .extensions import Extension
from .roofs import Fraction
from .zmodule import FpGroup, GroupMorphism, IntMatrix, ZModuleError


class DocParseError(ValueError):
    def __init__(self, msg, line, col=None):
        where = f"line {line}" + (f", col {col}" if col is not None else "")
        super().__init__(f"{where}: {msg}")
        self.line = line
        self.col = col


class DocSemanticError(ValueError):
    def __init__(self, msg, line=None):
        super().__init__(msg if line is None else f"line {line}: {msg}")
        self.line = line


def _parse_matrix(text, lineno):
    """Parse [] or [[1, 2], [3]]-style integer rows."""
    rows = []
    pos = 0
    text = text.strip()

    def err(msg, p):
        raise DocParseError(msg, lineno, p + 1)

    if not text.startswith("["):
        err("expected '['", 0)
    if text == "[]":
        return []
    if not text.startswith("[[") or not text.endswith("]]"):
        err("matrix must look like [[..], [..]] or []", 0)
    body = text[1:-1]
    depth = 0
    row = ""
    for idx, ch in enumerate(body):
        if ch == "[":
            if depth == 1:
                err("nested brackets too deep", idx)
            depth = 1
            row = ""
        elif ch == "]":
            if depth != 1:
                err("unbalanced ']'", idx)
            depth = 0
            entries = []
            for part in row.split(","):
                part = part.strip()
                if not part:
                    if row.strip():
                        err("empty entry", idx)
                    continue
                try:
                    entries.append(int(part))
                except ValueError:
                    err(f"not an integer: {part!r}", idx)
            rows.append(entries)
        elif depth == 1:
            row += ch
        elif ch in ", \t":
            continue
        else:
            err(f"unexpected character {ch!r}", idx)
    if depth != 0:
        err("unbalanced '['", len(body))
    width = {len(r) for r in rows}
    if len(width) > 1:
        err("ragged matrix rows", 0)
    return rows


def _parse_vector(text, lineno):
    t = text.strip()
    if not (t.startswith("[") and t.endswith("]")):
        raise DocParseError("expected [a, b, ...]", lineno, 1)
    inner = t[1:-1].strip()
    if not inner:
        return []
    out = []
    for part in inner.split(","):
        try:
            out.append(int(part.strip()))
        except ValueError:
            raise DocParseError(f"not an integer: {part.strip()!r}", lineno, 1)
    return out


class Document:
    """Named entities with cross-references resolved and re-validated."""

    def __init__(self):
        self.groups = {}
        self.complexes = {}
        self.maps = {}
        self.fractions = {}
        self.extensions = {}
        self.classes = {}
        self.order = []  # (kind, name) in declaration order


def parse(text: str) -> Document:
    doc = Document()
    current = None  # (kind, name, data, lineno)
    pending = []

    def flush():
        if current is not None:
            pending.append(current)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        indented = line[0] in " \t"
        stripped = line.strip()
        if not indented:
            flush()
            parts = stripped.split()
            kind = parts[0]
            if kind in ("group", "complex", "extension"):
                if len(parts) != 2:
                    raise DocParseError(f"usage: {kind} NAME", lineno)
                current = (kind, parts[1], {"_lines": []}, lineno)
            elif kind in ("map", "fraction", "class"):
                rest = stripped[len(kind):].strip()
                if ":" not in rest or "->" not in rest:
                    raise DocParseError(f"usage: {kind} NAME : SRC -> DST", lineno)
                name, arrow = rest.split(":", 1)
                src, dst = arrow.split("->", 1)
                current = (kind, name.strip(),
                           {"_lines": [], "src": src.strip(), "dst": dst.strip()},
                           lineno)
            else:
                raise DocParseError(f"unknown entity kind {kind!r}", lineno)
        else:
            if current is None:
                raise DocParseError("attribute line outside any entity", lineno)
            current[2]["_lines"].append((lineno, stripped))
    flush()

    buckets = {"group": doc.groups, "complex": doc.complexes, "map": doc.maps,
               "fraction": doc.fractions, "extension": doc.extensions,
               "class": doc.classes}
    for kind, name, data, lineno in pending:
        bucket = buckets[kind]
        if name in bucket:
            raise DocSemanticError(f"duplicate {kind} name {name!r}", lineno)
        builder = _BUILDERS[kind]
        bucket[name] = builder(doc, name, data, lineno)
        doc.order.append((kind, name))
    return doc


def _build_group(doc, name, data, lineno):
    gens, rels = None, []
    for ln, s in data["_lines"]:
        if s.startswith("gens"):
            try:
                gens = int(s.split()[1])
            except (IndexError, ValueError):
                raise DocParseError("usage: gens N", ln)
        elif s.startswith("rels"):
            rels = _parse_matrix(s[len("rels"):].strip(), ln)
        else:
            raise DocParseError(f"unknown group attribute {s!r}", ln)
    if gens is None:
        raise DocSemanticError(f"group {name!r}: missing gens", lineno)
    try:
        return FpGroup(gens, IntMatrix.from_rows(rels, cols=gens))
    except ZModuleError as exc:
        raise DocSemanticError(f"group {name!r}: {exc}", lineno)


def _build_complex(doc, name, data, lineno):
    terms, diffs = {}, {}
    for ln, s in data["_lines"]:
        if s.startswith("deg"):
            head, _, val = s.partition(":")
            try:
                n = int(head.split()[1])
            except (IndexError, ValueError):
                raise DocParseError("usage: deg N: GROUPNAME", ln)
            gname = val.strip()
            if gname not in doc.groups:
                raise DocSemanticError(f"unknown group {gname!r}", ln)
            terms[n] = doc.groups[gname]
        elif s.startswith("d "):
            head, _, val = s.partition(":")
            try:
                n = int(head.split()[1])
            except (IndexError, ValueError):
                raise DocParseError("usage: d N: [[..]]", ln)
            diffs[n] = (_parse_matrix(val.strip(), ln), ln)
        else:
            raise DocParseError(f"unknown complex attribute {s!r}", ln)
    built_diffs = {}
    for n, (rows, ln) in diffs.items():
        src = terms.get(n)
        dst = terms.get(n + 1)
        if src is None or dst is None:
            raise DocSemanticError(
                f"complex {name!r}: differential at degree {n} without terms", ln)
        try:
            built_diffs[n] = GroupMorphism(src, dst,
                                           IntMatrix.from_rows(rows, cols=src.n_gens))
        except ZModuleError as exc:
            raise DocSemanticError(f"complex {name!r}: {exc}", ln)
    try:
        return Complex(terms, built_diffs)
    except ZModuleError as exc:
        raise DocSemanticError(f"complex {name!r}: {exc}", lineno)


def _comps_from_lines(doc, lines, src, dst, what, prefix=""):
    comps = {}
    for ln, s in lines:
        body = s[len(prefix):].strip() if prefix else s
        if not body.startswith("deg"):
            raise DocParseError(f"unknown {what} attribute {s!r}", ln)
        head, _, val = body.partition(":")
        try:
            n = int(head.split()[1])
        except (IndexError, ValueError):
            raise DocParseError("usage: deg N: [[..]]", ln)
        rows = _parse_matrix(val.strip(), ln)
        try:
            comps[n] = GroupMorphism(src.term(n), dst.term(n),
                                     IntMatrix.from_rows(rows,
                                                         cols=src.term(n).n_gens))
        except ZModuleError as exc:
            raise DocSemanticError(f"{what}: {exc}", ln)
    return comps


def _build_map(doc, name, data, lineno):
    src = doc.complexes.get(data["src"])
    dst = doc.complexes.get(data["dst"])
    if src is None or dst is None:
        raise DocSemanticError(
            f"map {name!r}: unknown complex "
            f"{data['src'] if src is None else data['dst']!r}", lineno)
    comps = _comps_from_lines(doc, data["_lines"], src, dst, f"map {name!r}")
    try:
        return ChainMap(src, dst, comps)
    except ZModuleError as exc:
        raise DocSemanticError(f"map {name!r}: {exc}", lineno)


def _build_fraction(doc, name, data, lineno):
    src = doc.complexes.get(data["src"])
    dst = doc.complexes.get(data["dst"])
    if src is None or dst is None:
        raise DocSemanticError(f"fraction {name!r}: unknown endpoint", lineno)
    apex = None
    qlines, plines = [], []
    for ln, s in data["_lines"]:
        if s.startswith("apex"):
            aname = s.split()[1]
            if aname not in doc.complexes:
                raise DocSemanticError(f"unknown complex {aname!r}", ln)
            apex = doc.complexes[aname]
        elif s.startswith("q "):
            qlines.append((ln, s[2:].strip()))
        elif s.startswith("p "):
            plines.append((ln, s[2:].strip()))
        else:
            raise DocParseError(f"unknown fraction attribute {s!r}", ln)
    if apex is None:
        raise DocSemanticError(f"fraction {name!r}: missing apex", lineno)
    qc = _comps_from_lines(doc, qlines, apex, src, f"fraction {name!r} q")
    pc = _comps_from_lines(doc, plines, apex, dst, f"fraction {name!r} p")
    try:
        q = ChainMap(apex, src, qc)
        p = ChainMap(apex, dst, pc)
        return Fraction(q, p)
    except ZModuleError as exc:
        raise DocSemanticError(f"fraction {name!r}: {exc}", lineno)


def _build_extension(doc, name, data, lineno):
    refs = {}
    rlines = []
    for ln, s in data["_lines"]:
        key = s.split()[0]
        if key in ("A", "B", "E", "i", "j"):
            refs[key] = (s.split()[1], ln)
        elif key == "R":
            rlines.append((ln, s[1:].strip()))
        else:
            raise DocParseError(f"unknown extension attribute {s!r}", ln)
    for key in ("A", "B", "E", "i", "j"):
        if key not in refs:
            raise DocSemanticError(f"extension {name!r}: missing {key}", lineno)
    def need(kind, key):
        nm, ln = refs[key]
        pool = getattr(doc, kind)
        if nm not in pool:
            raise DocSemanticError(f"extension {name!r}: unknown {key} {nm!r}", ln)
        return pool[nm]
    A = need("complexes", "A")
    B = need("complexes", "B")
    E = need("complexes", "E")
    i = need("fractions", "i")
    j = need("maps", "j")
    comp = j.compose(i.p)
    comps = {}
    for ln, s in rlines:
        if not s.startswith("deg"):
            raise DocParseError(f"unknown R attribute {s!r}", ln)
        head, _, val = s.partition(":")
        try:
            n = int(head.split()[1])
        except (IndexError, ValueError):
            raise DocParseError("usage: R deg N: [[..]]", ln)
        rows = _parse_matrix(val.strip(), ln)
        try:
            # homotopy component apex^n -> A^{n-1}
            comps[n] = GroupMorphism(i.apex.term(n), A.term(n - 1),
                                     IntMatrix.from_rows(rows,
                                                         cols=i.apex.term(n).n_gens))
        except ZModuleError as exc:
            raise DocSemanticError(f"extension {name!r}: {exc}", ln)
    try:
        rh = ChainHomotopy(comp, ChainMap.zero(i.apex, A), comps)
    except ZModuleError as exc:
        raise DocSemanticError(
            f"extension {name!r}: R is not a null-homotopy of j o i ({exc})",
            lineno)
    return Extension(A, B, E, i, j, rh)


def _build_class(doc, name, data, lineno):
    src = doc.complexes.get(data["src"])
    dst = doc.complexes.get(data["dst"])
    if src is None or dst is None:
        raise DocSemanticError(f"class {name!r}: unknown endpoint", lineno)
    degree, divisors, coords = None, None, None
    for ln, s in data["_lines"]:
        if s.startswith("degree"):
            degree = int(s.split()[1])
        elif s.startswith("divisors"):
            divisors = _parse_vector(s[len("divisors"):].strip(), ln)
        elif s.startswith("coords"):
            coords = _parse_vector(s[len("coords"):].strip(), ln)
        else:
            raise DocParseError(f"unknown class attribute {s!r}", ln)
    if degree is None or coords is None:
        raise DocSemanticError(f"class {name!r}: needs degree and coords", lineno)
    ext = ExtGroup(src, dst, degree)
    if divisors is not None and list(ext.divisors) != list(divisors):
        raise DocSemanticError(
            f"class {name!r}: declared divisors {divisors} but "
            f"Ext^{degree} has {list(ext.divisors)}", lineno)
    if len(coords) != len(ext.divisors):
        raise DocSemanticError(f"class {name!r}: coordinate length mismatch",
                               lineno)
    return ext.make_class(coords)


_BUILDERS = {
    "group": _build_group,
    "complex": _build_complex,
    "map": _build_map,
    "fraction": _build_fraction,
    "extension": _build_extension,
    "class": _build_class,
}


# ---------------------------------------------------------------------------
# emission


def _fmt_matrix(m: IntMatrix):
    if m.rows == 0 or m.cols == 0:
        return "[]"
    return "[" + ", ".join("[" + ", ".join(str(x) for x in r) + "]"
                           for r in m.entries) + "]"


def emit_group(name, g: FpGroup):
    out = [f"group {name}", f"  gens {g.n_gens}", f"  rels {_fmt_matrix(g.relations)}"]
    return "\n".join(out)


def emit_complex(name, K: Complex, group_names):
    out = [f"complex {name}"]
    for n in K.degrees():
        if K.term(n).n_gens:
            out.append(f"  deg {n}: {group_names[n]}")
    for n in sorted(K.diffs):
        out.append(f"  d {n}: {_fmt_matrix(K.diffs[n].matrix)}")
    return "\n".join(out)


def emit_map(name, f: ChainMap, src, dst):
    out = [f"map {name} : {src} -> {dst}"]
    for n in sorted(f.comps):
        out.append(f"  deg {n}: {_fmt_matrix(f.comps[n].matrix)}")
    return "\n".join(out)


def emit_fraction(name, fr: Fraction, src, dst, apex):
    out = [f"fraction {name} : {src} -> {dst}", f"  apex {apex}"]
    for n in sorted(fr.q.comps):
        out.append(f"  q deg {n}: {_fmt_matrix(fr.q.comps[n].matrix)}")
    for n in sorted(fr.p.comps):
        out.append(f"  p deg {n}: {_fmt_matrix(fr.p.comps[n].matrix)}")
    return "\n".join(out)


def emit_class(name, c: DerivedClass, src, dst):
    out = [f"class {name} : {src} -> {dst}",
           f"  degree {c.degree}",
           "  divisors [" + ", ".join(str(d) for d in c.ext.divisors) + "]",
           "  coords [" + ", ".join(str(x) for x in c.coords) + "]"]
    return "\n".join(out)


class Emitter:
    """Emit a whole object graph with generated names, re-parseable."""

    def __init__(self):
        self.lines = []
        self._group_names = {}
        self._complex_names = {}
        self._map_names = {}
        self._fraction_names = {}
        self.counter = 0

    def fresh(self, stem):
        self.counter += 1
        return f"{stem}{self.counter}"

    def group(self, g: FpGroup):
        key = (g.n_gens, g.relations.entries)
        if key not in self._group_names:
            name = self.fresh("G")
            self._group_names[key] = name
            self.lines.append(emit_group(name, g))
        return self._group_names[key]

    def complex(self, K: Complex, stem="C"):
        key = id(K)
        if key not in self._complex_names:
            names = {n: self.group(K.term(n)) for n in K.degrees()
                     if K.term(n).n_gens}
            name = self.fresh(stem)
            self._complex_names[key] = name
            self.lines.append(emit_complex(name, K, names))
        return self._complex_names[key]

    def chain_map(self, f: ChainMap, stem="f"):
        if id(f) not in self._map_names:
            name = self.fresh(stem)
            self._map_names[id(f)] = name
            self.lines.append(emit_map(name, f, self.complex(f.src),
                                       self.complex(f.dst)))
        return self._map_names[id(f)]

    def fraction(self, fr: Fraction, stem="fr"):
        if id(fr) not in self._fraction_names:
            name = self.fresh(stem)
            self._fraction_names[id(fr)] = name
            self.lines.append(emit_fraction(name, fr, self.complex(fr.src),
                                            self.complex(fr.dst),
                                            self.complex(fr.apex)))
        return self._fraction_names[id(fr)]

    def extension(self, e: Extension, stem="X"):
        a = self.complex(e.A, "A")
        b = self.complex(e.B, "B")
        ec = self.complex(e.E, "E")
        i = self.fraction(e.i, "i")
        j = self.chain_map(e.pi, "j")
        name = self.fresh(stem)
        out = [f"extension {name}", f"  A {a}", f"  B {b}", f"  E {ec}",
               f"  i {i}", f"  j {j}"]
        for n in sorted(e.rh.comps):
            out.append(f"  R deg {n}: {_fmt_matrix(e.rh.comps[n].matrix)}")
        self.lines.append("\n".join(out))
        return name

    def derived_class(self, c: DerivedClass, stem="x"):
        name = self.fresh(stem)
        self.lines.append(emit_class(name, c, self.complex(c.src),
                                     self.complex(c.dst)))
        return name

    def text(self):
        return "\n\n".join(self.lines) + "\n"


def emit(doc: Document) -> str:
    """Emit a parsed document back to text (canonical order and spelling)."""
    em = Emitter()
    names = {}
    for kind, name in doc.order:
        if kind == "group":
            g = doc.groups[name]
            key = (g.n_gens, g.relations.entries)
            em._group_names[key] = name
            em.lines.append(emit_group(name, g))
        elif kind == "complex":
            K = doc.complexes[name]
            em._complex_names[id(K)] = name
            gnames = {n: em.group(K.term(n)) for n in K.degrees()
                      if K.term(n).n_gens}
            em.lines.append(emit_complex(name, K, gnames))
        elif kind == "map":
            f = doc.maps[name]
            em._map_names[id(f)] = name
            em.lines.append(emit_map(name, f, em.complex(f.src), em.complex(f.dst)))
        elif kind == "fraction":
            fr = doc.fractions[name]
            em._fraction_names[id(fr)] = name
            em.lines.append(emit_fraction(name, fr, em.complex(fr.src),
                                          em.complex(fr.dst), em.complex(fr.apex)))
        elif kind == "extension":
            e = doc.extensions[name]
            out = [f"extension {name}", f"  A {em.complex(e.A)}",
                   f"  B {em.complex(e.B)}", f"  E {em.complex(e.E)}",
                   f"  i {em.fraction(e.i)}", f"  j {em.chain_map(e.pi)}"]
            for n in sorted(e.rh.comps):
                out.append(f"  R deg {n}: {_fmt_matrix(e.rh.comps[n].matrix)}")
            em.lines.append("\n".join(out))
        elif kind == "class":
            c = doc.classes[name]
            em.lines.append(emit_class(name, c, em.complex(c.src),
                                       em.complex(c.dst)))
    return em.text()
