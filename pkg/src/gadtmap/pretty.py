"""Rendering of types, terms, function expressions, and constraints.

The output re-parses to an equal value for everything expressible in the
surface grammar (see GRAMMAR.md). Internal-only nodes (metavariables, rigid
atoms, opaque functions) render readably but are not part of the grammar.
"""
from __future__ import annotations

from .funexpr import Constraint, FunExpr, FunVar, Id, Lift, Opaque, ProdF, SumF
from .syntax import (
    Ann,
    App,
    Atom,
    Base,
    Const,
    Ctor,
    Inl,
    Inr,
    Lit,
    Meta,
    Pair,
    Prod,
    Spec,
    Sum,
    Term,
    TypeExpr,
    Var,
)


def _type_atom(t: TypeExpr) -> str:
    s = pretty_type(t)
    if isinstance(t, (Var, Base, Atom, Meta)) or (isinstance(t, App) and not t.args):
        return s
    return f"({s})"


def pretty_type(t: TypeExpr) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Base):
        return t.name
    if isinstance(t, Atom):
        return t.name
    if isinstance(t, Meta):
        return f"?m{t.ident}"
    if isinstance(t, Prod):
        return f"{_infix_child(t.left)} * {_infix_child(t.right)}"
    if isinstance(t, Sum):
        return f"{_infix_child(t.left)} + {_infix_child(t.right)}"
    if isinstance(t, App):
        if not t.args:
            return t.ctor
        return t.ctor + " " + " ".join(_type_atom(a) for a in t.args)
    raise TypeError(f"not a type expression: {t!r}")


def _infix_child(t: TypeExpr) -> str:
    # Products and sums are parenthesized as children of * / + so that nesting
    # is always explicit in the output.
    s = pretty_type(t)
    return f"({s})" if isinstance(t, (Prod, Sum)) else s


def _term_atom(t: Term) -> str:
    s = pretty_term(t)
    if isinstance(t, (Lit, Pair, Ann, Const)) or (isinstance(t, Ctor) and not t.args):
        return s
    return f"({s})"


def pretty_term(t: Term) -> str:
    if isinstance(t, Ctor):
        if not t.args:
            return t.name
        return t.name + " " + " ".join(_term_atom(a) for a in t.args)
    if isinstance(t, Pair):
        return f"({pretty_term(t.left)}, {pretty_term(t.right)})"
    if isinstance(t, Inl):
        return f"inl {_term_atom(t.inner)}"
    if isinstance(t, Inr):
        return f"inr {_term_atom(t.inner)}"
    if isinstance(t, Lit):
        return t.value
    if isinstance(t, Ann):
        return f"({pretty_term(t.inner)} : {pretty_type(t.type)})"
    if isinstance(t, Const):
        return f"<{t.tag}:{pretty_type(t.type)}>"
    raise TypeError(f"not a term: {t!r}")


def _fun_atom(e: FunExpr) -> str:
    # Inside a lifted constructor application, only variables appear bare.
    s = pretty_fun(e)
    return s if isinstance(e, FunVar) else f"({s})"


def pretty_fun(e: FunExpr) -> str:
    if isinstance(e, FunVar):
        return e.display
    if isinstance(e, Id):
        return f"id@{_type_atom(e.at)}"
    if isinstance(e, ProdF):
        return f"{_fun_infix_child(e.left)} * {_fun_infix_child(e.right)}"
    if isinstance(e, SumF):
        return f"{_fun_infix_child(e.left)} + {_fun_infix_child(e.right)}"
    if isinstance(e, Lift):
        if not e.args:
            return e.ctor
        return e.ctor + " " + " ".join(_fun_atom(a) for a in e.args)
    if isinstance(e, Opaque):
        return f"?({pretty_type(e.domain)} -> {pretty_type(e.codomain)})"
    raise TypeError(f"not a function expression: {e!r}")


def _fun_infix_child(e: FunExpr) -> str:
    s = pretty_fun(e)
    return f"({s})" if isinstance(e, (ProdF, SumF)) else s


def pretty_constraint(c: Constraint) -> str:
    return f"<{pretty_fun(c.lhs)}, {pretty_fun(c.rhs)}>"


def pretty(x: TypeExpr | Term | FunExpr | Constraint | Spec) -> str:
    if isinstance(x, Spec):
        return pretty_type(x.shape)
    if isinstance(x, TypeExpr):
        return pretty_type(x)
    if isinstance(x, Term):
        return pretty_term(x)
    if isinstance(x, FunExpr):
        return pretty_fun(x)
    if isinstance(x, Constraint):
        return pretty_constraint(x)
    raise TypeError(f"cannot pretty-print {x!r}")


def pretty_annotated(t: Term, essential: frozenset[tuple[int, ...]] | set[tuple[int, ...]]) -> str:
    """Render a term with its incidental structure bracketed.

    Heads of essential positions print normally; each maximal incidental
    subtree is wrapped in [...]. Essential positions are upward closed, so
    bracketed regions never nest.
    """

    def atom(t: Term, path: tuple[int, ...]) -> str:
        if path not in essential:
            return f"[{pretty_term(t)}]"
        s = go(t, path)
        if isinstance(t, (Lit, Pair, Const)) or (isinstance(t, Ctor) and not t.args):
            return s
        return f"({s})"

    def go(t: Term, path: tuple[int, ...]) -> str:
        if path not in essential:
            return f"[{pretty_term(t)}]"
        if isinstance(t, Ctor):
            if not t.args:
                return t.name
            return t.name + " " + " ".join(
                atom(a, path + (i,)) for i, a in enumerate(t.args)
            )
        if isinstance(t, Pair):
            return f"({go(t.left, path + (0,))}, {go(t.right, path + (1,))})"
        if isinstance(t, Inl):
            return f"inl {atom(t.inner, path + (0,))}"
        if isinstance(t, Inr):
            return f"inr {atom(t.inner, path + (0,))}"
        return pretty_term(t)

    return go(t, ())
