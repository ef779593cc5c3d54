"""Text format for models, maps, filtrations and sphere problems.

A model file is a sequence of line-oriented statements::

    # comment
    algebra Y free-dgl valid-through 8
      w1 : 1
      w2, w3 : 2
      w12 : 4
      d w12 = [w1,w2]
    end

    algebra H finite-lie
      u : 3
      t : 6
      [u,u] = t
    end

    map f : X -> Y
      f v = w3
    end

    filtration F on X
      stage 1 : a, b
      stage 2 : c
    end

    sphere P
      n = 4
      x1, x2 : 2
      x3 : 4
      c x3 = [x1,x2]
      carrier x3 = 1
    end

    cap 5
    expect wl f free = 2 open

Expressions are sums of rational multiples of generators and fully
bracketed binary brackets ``[x,y]``; scalars are ``p`` or ``p/q``.
Parsing keeps every token, so :func:`serialize` only changes whitespace.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .dgl import DglMap, FreeDgl, GeneratorFiltration, quadratic_coefficients, validate, validate_map
from .errors import ParseError, ValidationError
from .function_space import SphereProblem
from .graded_lie import FiniteLie, FreeLieAlgebra

_TOKEN = re.compile(r"\s*(?:(?P<arrow>->)|(?P<range>\.\.)|(?P<label>\d+\.\d+)|(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_']*)"
                    r"|(?P<sym>[\[\](),+\-*/=:]))")


@dataclass
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str, line: int) -> list:
    out, pos = [], 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            col = pos + len(text[pos:]) - len(text[pos:].lstrip()) + 1
            raise ParseError(f"unexpected character {text[col - 1]!r}", line=line, column=col)
        kind = m.lastgroup
        start = m.start(kind)
        out.append(Token(kind, m.group(kind), line, start + 1))
        pos = m.end()
    return out


# ----------------------------------------------------------------------------
# expressions


@dataclass
class Num:
    value: Fraction
    text: str


@dataclass
class Name:
    name: str
    line: int
    column: int


@dataclass
class Bracket:
    left: object
    right: object


@dataclass
class Scaled:
    scalar: Num
    atom: object
    star: bool = False


@dataclass
class Paren:
    inner: object


@dataclass
class Sum:
    terms: list  # (op, node); op is "" or "-" for the first term


def format_expr(e) -> str:
    if isinstance(e, Num):
        return e.text
    if isinstance(e, Name):
        return e.name
    if isinstance(e, Bracket):
        return f"[{format_expr(e.left)},{format_expr(e.right)}]"
    if isinstance(e, Scaled):
        return f"{e.scalar.text}{' * ' if e.star else ' '}{format_expr(e.atom)}"
    if isinstance(e, Paren):
        return f"({format_expr(e.inner)})"
    parts = []
    for k, (op, t) in enumerate(e.terms):
        body = format_expr(t)
        if k == 0:
            parts.append(op + body)
        else:
            parts.append(f"{op} {body}")
    return " ".join(parts)


class _Cursor:
    def __init__(self, tokens: list, line: int, end_col: int):
        self.tokens, self.i, self.line, self.end_col = tokens, 0, line, end_col

    def peek(self, k: int = 0):
        j = self.i + k
        return self.tokens[j] if j < len(self.tokens) else None

    def next(self):
        t = self.peek()
        if t is None:
            raise ParseError("unexpected end of line", line=self.line, column=self.end_col)
        self.i += 1
        return t

    def error(self, expected: str, tok=None):
        tok = tok or self.peek()
        if tok is None:
            return ParseError(f"expected {expected} at end of line", line=self.line, column=self.end_col,
                              expected=expected)
        return ParseError(f"expected {expected}, found {tok.text!r}", line=tok.line, column=tok.column,
                          expected=expected)

    def expect(self, text: str):
        t = self.peek()
        if t is None or t.text != text:
            raise self.error(repr(text))
        return self.next()

    def expect_kind(self, kind: str, what: str):
        t = self.peek()
        if t is None or t.kind != kind:
            raise self.error(what)
        return self.next()

    def at_end(self) -> bool:
        return self.i >= len(self.tokens)

    def finish(self):
        if not self.at_end():
            raise self.error("end of line")


def _number(cur: _Cursor) -> Num:
    a = cur.expect_kind("int", "a number")
    if cur.peek() is not None and cur.peek().text == "/":
        cur.next()
        b = cur.expect_kind("int", "a denominator")
        if int(b.text) == 0:
            raise ParseError("zero denominator", line=b.line, column=b.column)
        return Num(Fraction(int(a.text), int(b.text)), f"{a.text}/{b.text}")
    return Num(Fraction(int(a.text)), a.text)


def _atom(cur: _Cursor):
    t = cur.peek()
    if t is None:
        raise cur.error("a generator, a bracket or '('")
    if t.text == "[":
        cur.next()
        left = _sum(cur)
        cur.expect(",")
        right = _sum(cur)
        cur.expect("]")
        return Bracket(left, right)
    if t.text == "(":
        cur.next()
        inner = _sum(cur)
        cur.expect(")")
        return Paren(inner)
    if t.kind == "name":
        cur.next()
        return Name(t.text, t.line, t.column)
    raise cur.error("a generator, a bracket or '('")


def _term(cur: _Cursor):
    t = cur.peek()
    if t is not None and t.kind == "int":
        num = _number(cur)
        nxt = cur.peek()
        if nxt is not None and nxt.text == "*":
            cur.next()
            return Scaled(num, _atom(cur), star=True)
        if nxt is not None and (nxt.text in "[(" or nxt.kind == "name"):
            return Scaled(num, _atom(cur))
        return num
    return _atom(cur)


def _sum(cur: _Cursor):
    op = ""
    if cur.peek() is not None and cur.peek().text in ("+", "-"):
        op = cur.next().text
    terms = [(op, _term(cur))]
    while cur.peek() is not None and cur.peek().text in ("+", "-"):
        op = cur.next().text
        terms.append((op, _term(cur)))
    if len(terms) == 1 and terms[0][0] == "":
        return terms[0][1]
    return Sum(terms)


def parse_expression(text: str, line: int = 1):
    cur = _Cursor(tokenize(text, line), line, len(text) + 1)
    e = _sum(cur)
    cur.finish()
    return e


def evaluate(e, algebra, allow_brackets: bool = True, line: int | None = None):
    """Value of an expression in ``algebra``; unknown names raise ParseError."""
    if isinstance(e, Num):
        if e.value:
            raise ParseError(f"a bare scalar {e.text} is not an element", line=line,
                             expected="a generator or a bracket")
        return algebra.zero()
    if isinstance(e, Name):
        if e.name not in algebra.generators:
            raise ParseError(f"undeclared name {e.name}", line=e.line, column=e.column,
                             expected="a declared generator")
        return algebra.gen(e.name)
    if isinstance(e, Bracket):
        if not allow_brackets:
            raise ParseError("brackets are not allowed here", line=line, expected="a basis element")
        return algebra.bracket(evaluate(e.left, algebra, True, line), evaluate(e.right, algebra, True, line))
    if isinstance(e, Scaled):
        return evaluate(e.atom, algebra, allow_brackets, line) * e.scalar.value
    if isinstance(e, Paren):
        return evaluate(e.inner, algebra, allow_brackets, line)
    out = algebra.zero()
    for op, t in e.terms:
        v = evaluate(t, algebra, allow_brackets, line)
        out = out - v if op == "-" else out + v
    return out


def _names_in(e) -> list:
    if isinstance(e, Name):
        return [e]
    if isinstance(e, Bracket):
        return _names_in(e.left) + _names_in(e.right)
    if isinstance(e, Scaled):
        return _names_in(e.atom)
    if isinstance(e, Paren):
        return _names_in(e.inner)
    if isinstance(e, Sum):
        return [n for _, t in e.terms for n in _names_in(t)]
    return []


# ----------------------------------------------------------------------------
# statements


@dataclass
class Statement:
    """One source line: ``kind`` plus its parsed pieces and any trailing comment."""

    kind: str
    line: int
    data: dict = field(default_factory=dict)
    comment: str | None = None
    indent: bool = False


def _format_statement(s: Statement) -> str:
    d = s.data
    k = s.kind
    if k == "blank":
        body = ""
    elif k == "comment":
        body = ""
    elif k == "algebra":
        body = f"algebra {d['name']} {d['kind']}" + (f" valid-through {d['valid_through']}"
                                                     if d.get("valid_through") is not None else "")
    elif k == "end":
        body = "end"
    elif k == "gen":
        body = f"{', '.join(d['names'])} : {d['degree']}"
    elif k == "d":
        body = f"d {d['name']} = {format_expr(d['expr'])}"
    elif k == "bracket":
        body = f"[{d['left']},{d['right']}] = {format_expr(d['expr'])}"
    elif k == "map":
        body = f"map {d['name']} : {d['source']} -> {d['target']}"
    elif k == "value":
        body = f"{d['map']} {d['name']} = {format_expr(d['expr'])}"
    elif k == "filtration":
        body = f"filtration {d['name']} on {d['algebra']}"
    elif k == "stage":
        body = f"stage {d['stage']} : {', '.join(d['names'])}"
    elif k == "sphere":
        body = f"sphere {d['name']}"
    elif k == "n":
        body = f"n = {d['n']}"
    elif k == "coeff":
        body = f"c {d['name']} = {format_expr(d['expr'])}"
    elif k == "carrier":
        body = f"carrier {d['name']} = {d['scalar'].text}"
    elif k == "cap":
        body = f"cap {d['cap']}"
    elif k == "expect":
        body = "expect " + " ".join(d["words"])
    else:  # pragma: no cover
        raise ValueError(k)
    if s.indent and body:
        body = "  " + body
    if s.comment is not None:
        note = f"# {s.comment}" if s.comment else "#"
        if body:
            return f"{body}  {note}"
        return ("  " if s.indent else "") + note
    return body


# ----------------------------------------------------------------------------
# expectations


@dataclass
class Expectation:
    line: int
    words: list


EXPECTATION_KINDS = ("valid", "invalid", "homology", "wl", "lie-wl", "product", "sphere")


# ----------------------------------------------------------------------------
# the model file


@dataclass
class ModelFile:
    statements: list = field(default_factory=list)
    algebras: dict = field(default_factory=dict)
    maps: dict = field(default_factory=dict)
    filtrations: dict = field(default_factory=dict)
    spheres: dict = field(default_factory=dict)
    cap: int | None = None
    expectations: list = field(default_factory=list)
    problems: list = field(default_factory=list)
    lines: dict = field(default_factory=dict)

    def algebra(self, name: str | None = None):
        if name is None:
            if len(self.maps) == 1:
                return next(iter(self.maps.values())).target
            if not self.algebras:
                raise ValidationError("the file declares no algebra")
            return list(self.algebras.values())[-1]
        if name not in self.algebras:
            raise ValidationError(f"no algebra named {name}")
        return self.algebras[name]

    def map(self, name: str | None = None) -> DglMap:
        if name is None:
            if len(self.maps) != 1:
                raise ValidationError("name the map to use: the file has "
                                      f"{len(self.maps)} maps")
            return next(iter(self.maps.values()))
        if name not in self.maps:
            raise ValidationError(f"no map named {name}")
        return self.maps[name]

    def sphere(self, name: str | None = None) -> SphereProblem:
        if name is None:
            if len(self.spheres) == 1:
                return next(iter(self.spheres.values()))
            raise ValidationError(f"name the sphere problem: the file has {len(self.spheres)}")
        if name in self.spheres:
            return self.spheres[name]
        if name in self.maps:
            f = self.maps[name]
            return SphereProblem.from_model(f.source, f, f.target.generators.degrees[0] + 1)
        raise ValidationError(f"no sphere problem or map named {name}")

    def check(self) -> None:
        """Raise ValidationError listing every structural problem."""
        if self.problems:
            raise ValidationError("the model file fails validation", violations=list(self.problems))


def _header(cur: _Cursor) -> Token:
    return cur.expect_kind("name", "a name")


def _parse_line(toks: list, line: int, end_col: int, block: str | None, block_data: dict) -> Statement:
    cur = _Cursor(toks, line, end_col)
    first = cur.peek()
    word = first.text
    if block is None:
        if word == "algebra":
            cur.next()
            name = _header(cur).text
            kind_tok = cur.next() if not cur.at_end() else None
            kind = kind_tok.text if kind_tok else None
            if kind == "free" or kind == "finite":
                cur.expect("-")
                kind = kind + "-" + cur.expect_kind("name", "'dgl' or 'lie'").text
            if kind not in ("free-dgl", "finite-lie"):
                raise ParseError("expected 'free-dgl' or 'finite-lie'", line=line,
                                 column=kind_tok.column if kind_tok else end_col, expected="free-dgl")
            vt = None
            if not cur.at_end():
                w = cur.expect_kind("name", "'valid-through'")
                if w.text != "valid":
                    raise cur.error("'valid-through'", w)
                cur.expect("-")
                t = cur.expect_kind("name", "'valid-through'")
                if t.text != "through":
                    raise cur.error("'valid-through'", t)
                vt = int(cur.expect_kind("int", "a degree").text)
            cur.finish()
            return Statement("algebra", line, {"name": name, "kind": kind, "valid_through": vt})
        if word == "map":
            cur.next()
            name = _header(cur).text
            cur.expect(":")
            src = _header(cur).text
            cur.expect("->")
            tgt = _header(cur).text
            cur.finish()
            return Statement("map", line, {"name": name, "source": src, "target": tgt})
        if word == "filtration":
            cur.next()
            name = _header(cur).text
            on = cur.expect_kind("name", "'on'")
            if on.text != "on":
                raise cur.error("'on'", on)
            alg = _header(cur).text
            cur.finish()
            return Statement("filtration", line, {"name": name, "algebra": alg})
        if word == "sphere":
            cur.next()
            name = _header(cur).text
            cur.finish()
            return Statement("sphere", line, {"name": name})
        if word == "cap":
            cur.next()
            n = int(cur.expect_kind("int", "a degree").text)
            cur.finish()
            return Statement("cap", line, {"cap": n})
        if word == "expect":
            cur.next()
            words = _words(toks[1:])
            if not words or words[0] not in EXPECTATION_KINDS:
                raise ParseError(f"unknown expectation {' '.join(words)!r}", line=line,
                                 column=toks[1].column if len(toks) > 1 else end_col,
                                 expected="valid, invalid, homology, wl, lie-wl, product or sphere")
            return Statement("expect", line, {"words": words})
        raise ParseError(f"unexpected {word!r} outside a block", line=line, column=first.column,
                         expected="algebra, map, filtration, sphere, cap or expect")
    if word == "end" and len(toks) == 1:
        return Statement("end", line)
    if block == "free-dgl" or block == "finite-lie":
        if word == "d" and cur.peek(1) is not None and cur.peek(1).kind == "name":
            cur.next()
            name = cur.next().text
            cur.expect("=")
            e = _sum(cur)
            cur.finish()
            return Statement("d", line, {"name": name, "expr": e}, indent=True)
        if word == "[" and block == "finite-lie":
            cur.next()
            a = _header(cur).text
            cur.expect(",")
            b = _header(cur).text
            cur.expect("]")
            cur.expect("=")
            e = _sum(cur)
            cur.finish()
            return Statement("bracket", line, {"left": a, "right": b, "expr": e}, indent=True)
        return _gen_line(cur, line)
    if block == "map":
        m = cur.expect_kind("name", "the map name")
        if m.text != block_data["name"]:
            raise ParseError(f"expected {block_data['name']!r}, found {m.text!r}", line=line, column=m.column,
                             expected=block_data["name"])
        name = cur.expect_kind("name", "a generator").text
        cur.expect("=")
        e = _sum(cur)
        cur.finish()
        return Statement("value", line, {"map": m.text, "name": name, "expr": e}, indent=True)
    if block == "filtration":
        w = cur.expect_kind("name", "'stage'")
        if w.text != "stage":
            raise cur.error("'stage'", w)
        s = int(cur.expect_kind("int", "a stage number").text)
        cur.expect(":")
        names = [cur.expect_kind("name", "a generator").text]
        while not cur.at_end():
            cur.expect(",")
            names.append(cur.expect_kind("name", "a generator").text)
        return Statement("stage", line, {"stage": s, "names": names}, indent=True)
    if block == "sphere":
        if word == "n" and cur.peek(1) is not None and cur.peek(1).text == "=":
            cur.next()
            cur.next()
            n = int(cur.expect_kind("int", "an integer").text)
            cur.finish()
            return Statement("n", line, {"n": n}, indent=True)
        if word == "c" and cur.peek(1) is not None and cur.peek(1).kind == "name":
            cur.next()
            name = cur.next().text
            cur.expect("=")
            e = _sum(cur)
            cur.finish()
            return Statement("coeff", line, {"name": name, "expr": e}, indent=True)
        if word == "carrier":
            cur.next()
            name = cur.expect_kind("name", "a class").text
            cur.expect("=")
            neg = False
            if cur.peek() is not None and cur.peek().text == "-":
                cur.next()
                neg = True
            num = _number(cur)
            if neg:
                num = Num(-num.value, "-" + num.text)
            cur.finish()
            return Statement("carrier", line, {"name": name, "scalar": num}, indent=True)
        return _gen_line(cur, line)
    raise AssertionError(block)  # pragma: no cover


def _words(toks: list) -> list:
    """Merge tokens written without spaces between them (``lie-wl``, ``2..4``)."""
    words, prev = [], None
    for t in toks:
        if prev is not None and prev.column + len(prev.text) == t.column:
            words[-1] += t.text
        else:
            words.append(t.text)
        prev = t
    return words


def _gen_line(cur: _Cursor, line: int) -> Statement:
    names = [cur.expect_kind("name", "a generator name").text]
    while cur.peek() is not None and cur.peek().text == ",":
        cur.next()
        names.append(cur.expect_kind("name", "a generator name").text)
    cur.expect(":")
    deg = int(cur.expect_kind("int", "a degree").text)
    cur.finish()
    return Statement("gen", line, {"names": names, "degree": deg}, indent=True)


def _split_comment(raw: str):
    if "#" in raw:
        k = raw.index("#")
        return raw[:k], raw[k + 1:].strip()
    return raw, None


def parse_statements(text: str) -> list:
    statements = []
    block, block_data, opened = None, {}, 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body, comment = _split_comment(raw)
        if not body.strip():
            if comment is not None:
                statements.append(Statement("comment", lineno, comment=comment, indent=block is not None))
            elif not statements or statements[-1].kind != "blank":
                statements.append(Statement("blank", lineno))
            continue
        toks = tokenize(body, lineno)
        s = _parse_line(toks, lineno, len(body.rstrip()) + 1, block, block_data)
        s.comment = comment
        if s.kind in ("algebra", "map", "filtration", "sphere"):
            block = s.data["kind"] if s.kind == "algebra" else s.kind
            block_data, opened = s.data, lineno
        elif s.kind == "end":
            block, block_data = None, {}
        statements.append(s)
    if block is not None:
        raise ParseError(f"block opened on line {opened} is not closed", line=opened, expected="end")
    while statements and statements[-1].kind == "blank":
        statements.pop()
    while statements and statements[0].kind == "blank":
        statements.pop(0)
    return statements


def serialize(model) -> str:
    """Canonical text of a parsed file (accepts a ModelFile or a statement list)."""
    statements = model.statements if isinstance(model, ModelFile) else model
    return "\n".join(_format_statement(s) for s in statements) + "\n"


# ----------------------------------------------------------------------------
# building values


def _gather_blocks(statements: list) -> list:
    blocks, current = [], None
    for s in statements:
        if s.kind in ("algebra", "map", "filtration", "sphere"):
            current = (s, [])
        elif s.kind == "end":
            blocks.append(current)
            current = None
        elif current is not None:
            if s.kind not in ("comment", "blank"):
                current[1].append(s)
        elif s.kind in ("cap", "expect"):
            blocks.append((s, []))
    return blocks


def _declared(body: list) -> tuple:
    gens, seen = [], {}
    for s in body:
        if s.kind == "gen":
            for n in s.data["names"]:
                if n in seen:
                    raise ParseError(f"generator {n} declared twice (first on line {seen[n]})", line=s.line)
                seen[n] = s.line
                gens.append((n, s.data["degree"]))
    return gens, seen


def _check_names(e, names, line):
    for n in _names_in(e):
        if n.name not in names:
            raise ParseError(f"undeclared name {n.name}", line=line, column=n.column,
                             expected="a declared generator")


def _build_free(head: Statement, body: list):
    gens, declared = _declared(body)
    for n, d in gens:
        if d < 1:
            raise ValidationError(f"generator {n} must have degree >= 1", line=declared[n])
    names = {n for n, _ in gens}
    diffs, dlines = {}, {}
    for s in body:
        if s.kind == "d":
            n = s.data["name"]
            if n not in names:
                raise ParseError(f"undeclared name {n}", line=s.line, expected="a declared generator")
            if n in diffs:
                raise ParseError(f"differential of {n} given twice", line=s.line)
            _check_names(s.data["expr"], names, s.line)
            diffs[n] = s.data["expr"]
            dlines[n] = s.line
    L = FreeDgl(gens, name=head.data["name"], valid_through=head.data["valid_through"])
    for n, e in diffs.items():
        L._dgen[L.generators.index(n)] = evaluate(e, L, line=dlines[n])
    return L


def _linear(e, A, line) -> dict:
    x = evaluate(e, A, allow_brackets=False, line=line)
    return {A.generators.names[t]: c for t, c in x.terms.items()}


def _build_finite(head: Statement, body: list):
    gens, _ = _declared(body)
    names = {n for n, _ in gens}
    probe = FiniteLie(gens, check=False)
    brackets, diffs = {}, {}
    for s in body:
        if s.kind == "bracket":
            for n in (s.data["left"], s.data["right"]):
                if n not in names:
                    raise ParseError(f"undeclared name {n}", line=s.line, expected="a declared generator")
            _check_names(s.data["expr"], names, s.line)
            brackets[(s.data["left"], s.data["right"])] = _linear(s.data["expr"], probe, s.line)
        elif s.kind == "d":
            if s.data["name"] not in names:
                raise ParseError(f"undeclared name {s.data['name']}", line=s.line, expected="a declared generator")
            _check_names(s.data["expr"], names, s.line)
            diffs[s.data["name"]] = _linear(s.data["expr"], probe, s.line)
    try:
        return FiniteLie(gens, brackets, diffs, name=head.data["name"])
    except ValidationError as exc:
        exc.line = head.line
        raise


def _build_sphere(head: Statement, body: list) -> SphereProblem:
    gens, _ = _declared(body)
    names = {n for n, _ in gens}
    n = None
    for s in body:
        if s.kind == "n":
            n = s.data["n"]
    if n is None:
        raise ParseError("sphere block needs 'n = <dimension>'", line=head.line, expected="n =")
    A = FreeLieAlgebra([(a, d - 1) for a, d in gens])
    coeffs, k, ck = {}, None, Fraction(0)
    for s in body:
        if s.kind == "coeff":
            v = s.data["name"]
            if v not in names:
                raise ParseError(f"undeclared name {v}", line=s.line, expected="a declared class")
            _check_names(s.data["expr"], names, s.line)
            x = evaluate(s.data["expr"], A, line=s.line)
            D = FreeDgl(A.generators, name="probe")
            D._dgen[A.generators.index(v)] = type(x)(D, x.terms)
            words = D.tensor_dict(D.d_generator(A.generators.index(v)))
            if any(len(w) != 2 for w in words):
                raise ValidationError(f"c {v}: only brackets of two classes are allowed", line=s.line)
            coeffs[v] = quadratic_coefficients(D, v)
        elif s.kind == "carrier":
            if s.data["name"] not in names:
                raise ParseError(f"undeclared name {s.data['name']}", line=s.line, expected="a declared class")
            k, ck = s.data["name"], s.data["scalar"].value
    if k is None:
        deg_n = [a for a, d in gens if d == n]
        k = deg_n[0] if deg_n else None
    return SphereProblem(gens, coeffs, n, ck, k)


def parse_model(text: str) -> ModelFile:
    """Parse and build every object in a model file.

    Syntax errors and references to undeclared names raise ParseError.
    Semantic problems that a ``validate`` run should report (d∘d ≠ 0, maps
    not commuting with d, bad filtrations) are collected in ``problems``.
    """
    statements = parse_statements(text)
    model = ModelFile(statements=statements)
    for head, body in _gather_blocks(statements):
        k = head.kind
        if k == "cap":
            model.cap = head.data["cap"]
            continue
        if k == "expect":
            model.expectations.append(Expectation(head.line, head.data["words"]))
            continue
        name = head.data["name"]
        if name in model.algebras or name in model.maps or name in model.filtrations or name in model.spheres:
            raise ParseError(f"name {name} is used twice", line=head.line)
        model.lines[name] = head.line
        if k == "algebra":
            if head.data["kind"] == "free-dgl":
                L = _build_free(head, body)
                for msg in validate(L):
                    model.problems.append(f"algebra {name}: {msg}")
                model.algebras[name] = L
            else:
                model.algebras[name] = _build_finite(head, body)
        elif k == "map":
            src, tgt = head.data["source"], head.data["target"]
            for a in (src, tgt):
                if a not in model.algebras:
                    raise ParseError(f"undeclared algebra {a}", line=head.line, expected="a declared algebra")
            S, T = model.algebras[src], model.algebras[tgt]
            if not isinstance(S, FreeDgl):
                raise ValidationError(f"map {name}: the source must be a free DGL", line=head.line)
            values = {}
            for s in body:
                v = s.data["name"]
                if v not in S.generators:
                    raise ParseError(f"undeclared name {v}", line=s.line, expected=f"a generator of {src}")
                _check_names(s.data["expr"], set(T.generators.names), s.line)
                values[v] = evaluate(s.data["expr"], T, line=s.line)
            f = DglMap(S, T, values, name=name)
            for msg in validate_map(f):
                model.problems.append(f"map {name}: {msg}")
            model.maps[name] = f
        elif k == "filtration":
            alg = head.data["algebra"]
            if alg not in model.algebras:
                raise ParseError(f"undeclared algebra {alg}", line=head.line, expected="a declared algebra")
            L = model.algebras[alg]
            stages = {}
            for s in body:
                for g in s.data["names"]:
                    if g not in L.generators:
                        raise ParseError(f"undeclared name {g}", line=s.line, expected=f"a generator of {alg}")
                    stages[g] = s.data["stage"]
            try:
                model.filtrations[name] = GeneratorFiltration(L, stages)
            except ValidationError as exc:
                model.problems += [f"filtration {name}: {m}" for m in (exc.violations or [str(exc)])]
        elif k == "sphere":
            try:
                model.spheres[name] = _build_sphere(head, body)
            except ValidationError as exc:
                if exc.line is None:
                    exc.line = head.line
                raise
    return model


def load_model(path) -> ModelFile:
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read())


__all__ = [
    "Token", "tokenize", "parse_expression", "format_expr", "evaluate", "Statement", "Expectation",
    "ModelFile", "parse_statements", "parse_model", "load_model", "serialize", "EXPECTATION_KINDS",
]
