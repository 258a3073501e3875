"""Parser and compiler for logical rule models (``.mvr`` files).

Grammar::

    model <ident>
    gene <ident> arity <int> [input]
    gene <ident> arity <int> { <level> <- <expr> ... }

    expr    := term (('|' | '&') term)*      # '&' binds tighter than '|'
    term    := '!'? atom
    atom    := '(' expr ')' | literal
    literal := ident | ident ':' int | ident '>=' int | ident '<' int

Literal semantics: ``G`` is ``x_G >= 1``, ``G:v`` is ``x_G = v``, ``G>=v``
and ``G<v`` are threshold tests.  ``!`` negates, so ``!G`` is ``x_G = 0``.
Comments start with ``#``.  Level 0 is implicit ("otherwise").
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

import numpy as np

from .domain import MixedRadixDomain, MultivaluedFunction


class RuleSyntaxError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0, source: str = "<model>"):
        self.line, self.column, self.source = line, column, source
        where = f"{source}:{line}:{column}: " if line else f"{source}: "
        super().__init__(where + message)


class OverlapError(ValueError):
    """Two clauses of the same gene match the same input state."""


# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Literal:
    gene: str
    op: str  # "ge" | "eq" | "lt"
    value: int
    pos: tuple[int, int] = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Not:
    item: "Expr"


@dataclass(frozen=True)
class And:
    items: tuple["Expr", ...]


@dataclass(frozen=True)
class Or:
    items: tuple["Expr", ...]


Expr = Union[Literal, Not, And, Or]


def literals(e: Expr) -> Iterator[Literal]:
    if isinstance(e, Literal):
        yield e
    elif isinstance(e, Not):
        yield from literals(e.item)
    else:
        for it in e.items:
            yield from literals(it)


def format_expr(e: Expr, parent: str = "") -> str:
    if isinstance(e, Literal):
        if e.op == "eq":
            return f"{e.gene}:{e.value}"
        if e.op == "lt":
            return f"{e.gene}<{e.value}"
        return e.gene if e.value == 1 else f"{e.gene}>={e.value}"
    if isinstance(e, Not):
        inner = format_expr(e.item, "not")
        return "!" + inner
    sep = " & " if isinstance(e, And) else " | "
    body = sep.join(format_expr(it, type(e).__name__) for it in e.items)
    # And directly under Or is the only compound nesting that needs no parentheses
    if parent and not (parent == "Or" and isinstance(e, And)):
        return f"({body})"
    return body


@dataclass(frozen=True)
class Gene:
    name: str
    arity: int
    clauses: tuple[tuple[int, Expr], ...] = ()
    pos: tuple[int, int] = field(default=(0, 0), compare=False, repr=False)

    @property
    def is_input(self) -> bool:
        return not self.clauses

    def clause(self, level: int) -> Optional[Expr]:
        for lv, e in self.clauses:
            if lv == level:
                return e
        return None


@dataclass(frozen=True)
class RuleModel:
    name: str
    genes: tuple[Gene, ...]
    source: str = field(default="<model>", compare=False, repr=False)

    def __getitem__(self, name: str) -> Gene:
        for g in self.genes:
            if g.name == name:
                return g
        raise KeyError(name)

    @property
    def arities(self) -> dict[str, int]:
        return {g.name: g.arity for g in self.genes}

    def ruled_genes(self) -> list[Gene]:
        return [g for g in self.genes if g.clauses]

    def format(self) -> str:
        lines = [f"model {self.name}"]
        for g in self.genes:
            if g.is_input:
                lines.append(f"gene {g.name} arity {g.arity} input")
            else:
                lines.append(f"gene {g.name} arity {g.arity} {{")
                for lv, e in g.clauses:
                    lines.append(f"  {lv} <- {format_expr(e)}")
                lines.append("}")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# lexer / parser

_TOKEN = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<comment>#[^\n]*)"
    r"|(?P<arrow><-)|(?P<ge>>=)|(?P<op>[{}():<&|!])"
    r"|(?P<int>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _lex(text: str, source: str) -> list[_Tok]:
    toks = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise RuleSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1, source)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind not in ("ws", "comment"):
            value = m.group()
            toks.append(_Tok("op" if kind in ("arrow", "ge") else kind, value, line, pos - line_start + 1))
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text: str, source: str):
        self.source = source
        self.toks = _lex(text, source)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg: str, tok: Optional[_Tok] = None):
        tok = tok or self.tok
        return RuleSyntaxError(msg, tok.line, tok.col, self.source)

    def next(self) -> _Tok:
        t = self.tok
        self.i += 1
        return t

    def expect(self, kind: str, text: Optional[str] = None) -> _Tok:
        t = self.tok
        if t.kind != kind or (text is not None and t.text != text):
            want = text or kind
            got = t.text or "end of input"
            raise self.error(f"expected {want!r}, got {got!r}")
        return self.next()

    def at(self, text: str) -> bool:
        return self.tok.kind == "op" and self.tok.text == text

    def model(self) -> tuple[str, list[Gene]]:
        kw = self.expect("ident")
        if kw.text != "model":
            raise self.error("model file must start with 'model <name>'", kw)
        name = self.expect("ident").text
        genes = []
        while self.tok.kind != "eof":
            genes.append(self.gene())
        return name, genes

    def gene(self) -> Gene:
        kw = self.expect("ident")
        if kw.text != "gene":
            raise self.error(f"expected 'gene', got {kw.text!r}", kw)
        name_tok = self.expect("ident")
        arity_kw = self.expect("ident")
        if arity_kw.text != "arity":
            raise self.error(f"expected 'arity', got {arity_kw.text!r}", arity_kw)
        arity = int(self.expect("int").text)
        if arity < 2:
            raise self.error(f"gene {name_tok.text} needs arity >= 2", name_tok)
        clauses = []
        if self.tok.kind == "ident" and self.tok.text == "input":
            self.next()
        elif self.at("{"):
            self.next()
            while not self.at("}"):
                lv_tok = self.expect("int")
                level = int(lv_tok.text)
                if not 1 <= level < arity:
                    raise self.error(f"level {level} of gene {name_tok.text} is outside 1..{arity - 1}", lv_tok)
                if any(lv == level for lv, _ in clauses):
                    raise self.error(f"level {level} of gene {name_tok.text} is defined twice", lv_tok)
                self.expect("op", "<-")
                clauses.append((level, self.expr()))
            self.next()
        return Gene(name_tok.text, arity, tuple(clauses), (name_tok.line, name_tok.col))

    def expr(self) -> Expr:
        items = [self.conj()]
        while self.at("|"):
            self.next()
            items.append(self.conj())
        return items[0] if len(items) == 1 else Or(tuple(items))

    def conj(self) -> Expr:
        items = [self.term()]
        while self.at("&"):
            self.next()
            items.append(self.term())
        return items[0] if len(items) == 1 else And(tuple(items))

    def term(self) -> Expr:
        if self.at("!"):
            self.next()
            return Not(self.atom())
        return self.atom()

    def atom(self) -> Expr:
        if self.at("("):
            self.next()
            e = self.expr()
            self.expect("op", ")")
            return e
        t = self.expect("ident")
        pos = (t.line, t.col)
        for sym, op in ((":", "eq"), (">=", "ge"), ("<", "lt")):
            if self.at(sym):
                self.next()
                return Literal(t.text, op, int(self.expect("int").text), pos)
        return Literal(t.text, "ge", 1, pos)


def parse(text: str, source: str = "<model>") -> RuleModel:
    name, genes = _Parser(text, source).model()
    arities = {}
    for g in genes:
        if g.name in arities:
            raise RuleSyntaxError(f"gene {g.name} declared twice", *g.pos, source)
        arities[g.name] = g.arity
    for g in genes:
        for _, e in g.clauses:
            for lit in literals(e):
                if lit.gene not in arities:
                    raise RuleSyntaxError(f"undeclared gene {lit.gene!r} in rule of {g.name}", *lit.pos, source)
                k = arities[lit.gene]
                if not 0 <= lit.value < k:
                    raise RuleSyntaxError(
                        f"value {lit.value} out of range for {lit.gene} (arity {k})", *lit.pos, source
                    )
    return RuleModel(name, tuple(genes), source)


def parse_file(path) -> RuleModel:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read(), str(path))


# ---------------------------------------------------------------------------
# compilation


def regulators(model: RuleModel, gene: str) -> list[str]:
    seen: dict[str, None] = {}
    for _, e in model[gene].clauses:
        for lit in literals(e):
            seen.setdefault(lit.gene, None)
    return list(seen)


def _evaluate(e: Expr, grid: dict[str, np.ndarray]) -> np.ndarray:
    if isinstance(e, Literal):
        x = grid[e.gene]
        if e.op == "eq":
            return x == e.value
        if e.op == "ge":
            return x >= e.value
        return x < e.value
    if isinstance(e, Not):
        return ~_evaluate(e.item, grid)
    parts = [_evaluate(it, grid) for it in e.items]
    out = parts[0].copy()
    for p in parts[1:]:
        if isinstance(e, And):
            out &= p
        else:
            out |= p
    return out


def compile_gene(model: RuleModel, gene: str, priority: str = "error") -> tuple[MultivaluedFunction, list[str]]:
    """Truth table of ``gene`` over its regulators (first-appearance order).

    ``priority`` decides what happens when two clauses match one state:
    ``"error"`` raises :class:`OverlapError`, ``"highest"`` keeps the higher level.
    """
    if priority not in ("error", "highest"):
        raise ValueError(f"unknown priority policy {priority!r}")
    g = model[gene]
    if g.is_input:
        raise ValueError(f"gene {gene} is an input and has no rule")
    regs = regulators(model, gene)
    arities = tuple(model[r].arity for r in regs)
    dom = MixedRadixDomain(arities)
    axes = np.indices(arities)
    grid = {r: axes[i] for i, r in enumerate(regs)}
    table = np.zeros(arities, dtype=np.int64)
    for level, e in sorted(g.clauses):
        hit = _evaluate(e, grid)
        clash = hit & (table > 0)
        if clash.any() and priority == "error":
            point = tuple(int(c[0]) for c in np.nonzero(clash))
            state = ", ".join(f"{r}={v}" for r, v in zip(regs, point))
            lower = int(table[point])
            raise OverlapError(f"{gene}: levels {lower} and {level} both match at ({state})")
        table[hit] = level
    return MultivaluedFunction(dom, g.arity, table.ravel()), regs


# ---------------------------------------------------------------------------
# structure (S)


@dataclass(frozen=True)
class StructureS:
    switch: int
    level1: frozenset
    level2: frozenset
    context: tuple[tuple[int, ...], ...]  # points of the other coordinates where the context holds


def detect_structure_s(f: MultivaluedFunction) -> Optional[StructureS]:
    """Find a switch coordinate ``B`` with ``f = 1 <=> x_B in S1 and phi``, ``f = 2 <=> x_B in S2 and phi``.

    Wherever the context holds, the profile of ``f`` along ``B`` is the same;
    elsewhere ``f`` is 0.  Both levels must occur.
    """
    if f.codomain != 3:
        raise ValueError("structure (S) is defined for ternary targets")
    table = f.table
    for b in range(f.domain.n):
        moved = np.moveaxis(table, b, -1)
        rest_shape = moved.shape[:-1]
        profiles = moved.reshape(-1, moved.shape[-1])
        active = [r for r in range(profiles.shape[0]) if profiles[r].any()]
        if not active:
            continue
        ref = profiles[active[0]]
        if any(not np.array_equal(profiles[r], ref) for r in active):
            continue
        s1 = frozenset(int(v) for v in np.nonzero(ref == 1)[0])
        s2 = frozenset(int(v) for v in np.nonzero(ref == 2)[0])
        if not s1 or not s2:
            continue
        context = tuple(tuple(int(c) for c in np.unravel_index(r, rest_shape)) for r in active)
        return StructureS(b, s1, s2, context)
    return None
