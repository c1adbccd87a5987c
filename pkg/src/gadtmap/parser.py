"""Lexer and recursive-descent parsers for the surface syntax.

The grammar is documented in GRAMMAR.md. Data type declarations use Agda-like
headers (`data List : Set -> Set where ...`); `Set^k -> Set` headers are pure
arity markers. Arrows have no type AST node, so an arrow inside a type is a
syntax error by construction.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .funexpr import FunExpr, FunVar, Id, Lift, ProdF, SumF
from .syntax import (
    Ann,
    App,
    Base,
    BASE_TYPES,
    ConstructorSig,
    Ctor,
    GadtDecl,
    Inl,
    Inr,
    Lit,
    Pair,
    Prod,
    Program,
    Spec,
    Sum,
    Term,
    TypeExpr,
    Var,
    free_type_vars,
    make_spec,
)


class ParseError(Exception):
    """A lexical or syntax error, with a 1-based source position."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Token:
    kind: str  # "name", "number", or the symbol itself
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>--[^\n]*)
  | (?P<nl>\n)
  | (?P<funvar>[fgh]'?[0-9]+\^[0-9]+(?:\.[0-9]+)*)
  | (?P<name>[A-Za-z][A-Za-z0-9_']*)
  | (?P<number>-?[0-9]+)
  | (?P<arrow>->)
  | (?P<sym>[()*+,;:.@])
    """,
    re.VERBOSE,
)

KEYWORDS = ("data", "where", "forall", "Set", "inl", "inr")
LITERAL_WORDS = ("tt", "true", "false", "unit")


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, line_start = 1, 0
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        pos = m.end()
        if m.lastgroup == "nl":
            line += 1
            line_start = pos
            continue
        if m.lastgroup in ("ws", "comment"):
            continue
        kind = m.lastgroup
        textval = m.group()
        col = m.start() - line_start + 1
        if kind in ("name", "number", "funvar"):
            tokens.append(Token(kind, textval, line, col))
        elif kind == "arrow":
            tokens.append(Token("->", "->", line, col))
        else:
            tokens.append(Token(textval, textval, line, col))
    return tokens


class _Cursor:
    def __init__(self, tokens: list[Token], end_line: int):
        self.tokens = tokens
        self.pos = 0
        self.end_line = end_line

    def peek(self) -> Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self) -> Token:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", self.end_line, 1)
        self.pos += 1
        return tok

    def expect(self, kind: str) -> Token:
        tok = self.next()
        if tok.kind != kind:
            raise ParseError(f"expected {kind!r}, got {tok.text!r}", tok.line, tok.col)
        return tok

    def at(self, kind: str, text: str | None = None) -> bool:
        tok = self.peek()
        if tok is None or tok.kind != kind:
            return False
        return text is None or tok.text == text

    def error(self, message: str) -> ParseError:
        tok = self.peek()
        if tok is None:
            return ParseError(message, self.end_line, 1)
        return ParseError(message, tok.line, tok.col)


def _cursor(text: str) -> _Cursor:
    return _Cursor(tokenize(text), text.count("\n") + 1)


# ---------------------------------------------------------------------------
# Types


def _parse_type(c: _Cursor) -> TypeExpr:
    left = _parse_prod(c)
    if c.at("+"):
        c.next()
        return Sum(left, _parse_type(c))
    return left


def _parse_prod(c: _Cursor) -> TypeExpr:
    left = _parse_type_app(c)
    if c.at("*"):
        c.next()
        return Prod(left, _parse_prod(c))
    return left


def _is_type_atom_start(c: _Cursor) -> bool:
    tok = c.peek()
    if tok is None:
        return False
    if tok.kind == "(":
        return True
    return tok.kind == "name" and tok.text not in KEYWORDS


def _parse_type_app(c: _Cursor) -> TypeExpr:
    tok = c.peek()
    if tok is not None and tok.kind == "name" and tok.text[0].isupper():
        if tok.text == "Set":
            raise c.error("'Set' is only allowed in declaration headers")
        c.next()
        if tok.text in BASE_TYPES:
            return Base(tok.text)
        args: list[TypeExpr] = []
        while _is_type_atom_start(c):
            args.append(_parse_type_atom(c))
        return App(tok.text, tuple(args))
    return _parse_type_atom(c)


def _parse_type_atom(c: _Cursor) -> TypeExpr:
    tok = c.next()
    if tok.kind == "(":
        inner = _parse_type(c)
        if c.at("->"):
            raise c.error("arrow types are not allowed here")
        c.expect(")")
        return inner
    if tok.kind == "name":
        if tok.text in KEYWORDS:
            raise ParseError(f"unexpected keyword {tok.text!r} in type", tok.line, tok.col)
        if tok.text in BASE_TYPES:
            return Base(tok.text)
        if tok.text[0].isupper():
            return App(tok.text, ())
        return Var(tok.text)
    raise ParseError(f"expected a type, got {tok.text!r}", tok.line, tok.col)


# ---------------------------------------------------------------------------
# Programs


def parse_program(text: str) -> Program:
    """Parse a sequence of data type declarations.

    Constructor-type references to other declarations are left unresolved;
    class membership and arity checking happen in `wellformed.validate`.
    """
    c = _cursor(text)
    decls: list[GadtDecl] = []
    seen_decls: set[str] = set()
    seen_ctors: set[str] = set()
    while c.peek() is not None:
        tok = c.expect("name")
        if tok.text != "data":
            raise ParseError(f"expected 'data', got {tok.text!r}", tok.line, tok.col)
        name_tok = c.expect("name")
        name = name_tok.text
        if not name[0].isupper() or name == "Set" or name in BASE_TYPES:
            raise ParseError(
                f"invalid data type name {name!r} (must be capitalized and not reserved)",
                name_tok.line,
                name_tok.col,
            )
        if name in seen_decls:
            raise ParseError(f"duplicate declaration name {name!r}", name_tok.line, name_tok.col)
        seen_decls.add(name)
        c.expect(":")
        arity = _parse_header_kind(c)
        kw = c.expect("name")
        if kw.text != "where":
            raise ParseError(f"expected 'where', got {kw.text!r}", kw.line, kw.col)
        ctors: list[ConstructorSig] = []
        while c.at("name") and not c.at("name", "data"):
            at_tok = c.peek()
            sig = _parse_ctor(c, name, arity)
            if sig.name in seen_ctors:
                raise ParseError(
                    f"duplicate constructor name {sig.name!r}", at_tok.line, at_tok.col
                )
            seen_ctors.add(sig.name)
            ctors.append(sig)
            if c.at(";"):
                c.next()
        decls.append(GadtDecl(name, arity, tuple(ctors)))
    return Program(tuple(decls))


def _parse_header_kind(c: _Cursor) -> int:
    kw = c.expect("name")
    if kw.text != "Set":
        raise ParseError(f"expected 'Set', got {kw.text!r}", kw.line, kw.col)
    arity = 0
    while c.at("->"):
        c.next()
        kw = c.expect("name")
        if kw.text != "Set":
            raise ParseError(f"expected 'Set', got {kw.text!r}", kw.line, kw.col)
        arity += 1
    return arity


def _parse_ctor(c: _Cursor, owner: str, owner_arity: int) -> ConstructorSig:
    name_tok = c.expect("name")
    cname = name_tok.text
    if cname in KEYWORDS or cname in LITERAL_WORDS:
        raise ParseError(f"reserved word {cname!r} cannot name a constructor", name_tok.line, name_tok.col)
    if not cname[0].islower():
        raise ParseError(
            f"invalid constructor name {cname!r} (must start lowercase)",
            name_tok.line,
            name_tok.col,
        )
    c.expect(":")
    binders: list[str] = []
    if c.at("name", "forall"):
        c.next()
        while c.at("name") and not c.at("name", "data"):
            b = c.next()
            if not b.text[0].islower() or b.text in KEYWORDS:
                raise ParseError(f"invalid type variable {b.text!r}", b.line, b.col)
            if b.text in binders:
                raise ParseError(f"duplicate type variable {b.text!r}", b.line, b.col)
            binders.append(b.text)
            if c.at("."):
                break
        c.expect(".")
    parts: list[TypeExpr] = [_parse_type(c)]
    while c.at("->"):
        c.next()
        parts.append(_parse_type(c))
    ret = parts[-1]
    args = tuple(parts[:-1])
    if not (isinstance(ret, App) and ret.ctor == owner):
        raise c.error(f"return type of {cname!r} must be an application of {owner!r}")
    if len(ret.args) != owner_arity:
        raise c.error(
            f"return type of {cname!r} applies {owner!r} to {len(ret.args)} "
            f"arguments, expected {owner_arity}"
        )
    bound = set(binders)
    for part in parts:
        for v in free_type_vars(part):
            if v not in bound:
                raise c.error(f"unbound type variable {v!r} in the type of {cname!r}")
    return ConstructorSig(cname, tuple(binders), args, ret.args)


# ---------------------------------------------------------------------------
# Terms


def _ctor_table(program) -> dict[str, ConstructorSig]:
    # Accepts a Program or anything carrying one as `.program`.
    prog = getattr(program, "program", program)
    table: dict[str, ConstructorSig] = {}
    for d in prog.decls:
        for sig in d.ctors:
            table[sig.name] = sig
    return table


def parse_term(text: str, program) -> Term:
    """Parse a term, resolving constructor names and arities against `program`."""
    c = _cursor(text)
    table = _ctor_table(program)
    term = _parse_term(c, table, program)
    if c.peek() is not None:
        raise c.error(f"unexpected trailing input {c.peek().text!r}")
    return term


def _is_term_atom_start(c: _Cursor) -> bool:
    tok = c.peek()
    if tok is None:
        return False
    if tok.kind in ("(", "number"):
        return True
    return tok.kind == "name" and tok.text not in ("inl", "inr") and tok.text not in KEYWORDS


def _parse_term(c: _Cursor, table: dict[str, ConstructorSig], program) -> Term:
    tok = c.peek()
    if tok is None:
        raise c.error("expected a term")
    if tok.kind == "name" and tok.text in ("inl", "inr"):
        c.next()
        inner = _parse_term_atom(c, table, program)
        return Inl(inner) if tok.text == "inl" else Inr(inner)
    if tok.kind == "name" and tok.text not in LITERAL_WORDS and tok.text not in KEYWORDS:
        name_tok = c.next()
        sig = table.get(name_tok.text)
        if sig is None:
            raise ParseError(
                f"unknown constructor {name_tok.text!r}", name_tok.line, name_tok.col
            )
        args: list[Term] = []
        while _is_term_atom_start(c):
            args.append(_parse_term_atom(c, table, program))
        if len(args) != len(sig.arg_types):
            raise ParseError(
                f"constructor {sig.name!r} expects {len(sig.arg_types)} "
                f"argument(s), got {len(args)}",
                name_tok.line,
                name_tok.col,
            )
        return Ctor(sig.name, tuple(args))
    return _parse_term_atom(c, table, program)


def _parse_term_atom(c: _Cursor, table: dict[str, ConstructorSig], program) -> Term:
    tok = c.next()
    if tok.kind == "(":
        first = _parse_term(c, table, program)
        if c.at(","):
            c.next()
            second = _parse_term(c, table, program)
            c.expect(")")
            return Pair(first, second)
        if c.at(":"):
            c.next()
            ty = _parse_type(c)
            _check_spec_refs(ty, program, c, allow_vars=False)
            c.expect(")")
            return Ann(first, ty)
        c.expect(")")
        return first
    if tok.kind == "number":
        hint = "Int" if tok.text.startswith("-") else None
        return Lit(tok.text, hint)
    if tok.kind == "name":
        if tok.text in ("tt", "true", "false"):
            return Lit(tok.text, "Bool")
        if tok.text == "unit":
            return Lit(tok.text, "Unit")
        sig = table.get(tok.text)
        if sig is None:
            raise ParseError(f"unknown constructor {tok.text!r}", tok.line, tok.col)
        if sig.arg_types:
            raise ParseError(
                f"constructor {sig.name!r} expects {len(sig.arg_types)} "
                "argument(s), got 0 (parenthesize the application?)",
                tok.line,
                tok.col,
            )
        return Ctor(sig.name, ())
    raise ParseError(f"expected a term, got {tok.text!r}", tok.line, tok.col)


# ---------------------------------------------------------------------------
# Specifications


def _check_spec_refs(t: TypeExpr, program, c: _Cursor, allow_vars: bool) -> None:
    prog = getattr(program, "program", program)
    if isinstance(t, App):
        decl = prog.decl(t.ctor)
        if decl is None:
            raise c.error(f"unknown type constructor {t.ctor!r}")
        if len(t.args) != decl.arity:
            raise c.error(
                f"{t.ctor!r} applied to {len(t.args)} argument(s), expected {decl.arity}"
            )
    if isinstance(t, Var) and not allow_vars:
        raise c.error(f"type annotations must be closed (found variable {t.name!r})")
    from .syntax import type_children

    for child in type_children(t):
        _check_spec_refs(child, program, c, allow_vars)


def parse_spec(text: str, program) -> Spec:
    """Parse a specification. Free lowercase names become the specification
    variables, listed in first-occurrence order."""
    c = _cursor(text)
    shape = _parse_type(c)
    if c.at("->"):
        raise c.error("arrow types are not allowed here")
    if c.peek() is not None:
        raise c.error(f"unexpected trailing input {c.peek().text!r}")
    _check_spec_refs(shape, program, c, allow_vars=True)
    return make_spec(shape)


def parse_type(text: str, program=None) -> TypeExpr:
    """Parse a bare type expression (no resolution unless `program` given)."""
    c = _cursor(text)
    ty = _parse_type(c)
    if c.peek() is not None:
        raise c.error(f"unexpected trailing input {c.peek().text!r}")
    if program is not None:
        _check_spec_refs(ty, program, c, allow_vars=True)
    return ty


# ---------------------------------------------------------------------------
# Function expressions (round-trip support for analysis output)

_FUNVAR_RE = re.compile(r"([fgh])(')?([0-9]+)(?:\^([0-9]+(?:\.[0-9]+)*))?$")


def parse_funexpr(text: str) -> FunExpr:
    """Parse a rendered function expression back into its AST.

    Variable bookkeeping (creation rank, domains) is not recoverable from
    text; parsed variables compare equal to originals by name alone.
    """
    c = _cursor(text)
    e = _parse_fun(c)
    if c.peek() is not None:
        raise c.error(f"unexpected trailing input {c.peek().text!r}")
    return e


def _parse_fun(c: _Cursor) -> FunExpr:
    left = _parse_fun_prod(c)
    if c.at("+"):
        c.next()
        return SumF(left, _parse_fun(c))
    return left


def _parse_fun_prod(c: _Cursor) -> FunExpr:
    left = _parse_fun_app(c)
    if c.at("*"):
        c.next()
        return ProdF(left, _parse_fun_prod(c))
    return left


def _parse_fun_app(c: _Cursor) -> FunExpr:
    tok = c.peek()
    if tok is not None and tok.kind == "name" and tok.text[0].isupper():
        c.next()
        args: list[FunExpr] = []
        while True:
            nxt = c.peek()
            if nxt is None or nxt.kind not in ("(", "name", "funvar"):
                break
            if nxt.kind == "name" and (nxt.text[0].isupper() or nxt.text in KEYWORDS):
                break
            args.append(_parse_fun_atom(c))
        return Lift(tok.text, tuple(args))
    return _parse_fun_atom(c)


def _parse_fun_atom(c: _Cursor) -> FunExpr:
    tok = c.next()
    if tok.kind == "(":
        inner = _parse_fun(c)
        c.expect(")")
        return inner
    if tok.kind in ("name", "funvar"):
        if tok.text == "id":
            c.expect("@")
            return Id(_parse_type_atom(c))
        m = _FUNVAR_RE.match(tok.text)
        if m:
            kind, prime, index, label = m.groups()
            return FunVar(kind, label or "", int(index), prime=bool(prime))
    raise ParseError(f"expected a function expression, got {tok.text!r}", tok.line, tok.col)
