"""Solving the emitted constraints by decomposition and first-order unification.

Both sides of every emitted constraint describe the same function, so they are
top-unifiable: identical symbols wherever both sides are non-variables, with
identities at composite types expanded on demand (an identity at a product
type is the product of identities, and likewise through constructors).
Decomposition peels the common structure down to atomic constraints whose
right-hand side is a variable.

Unification then orients bindings so that earlier-created variables are
replaced by later-created ones whenever two variables meet. The earliest
variables are the root input functions, so each root ends up with exactly one
binding over the latest-generation variables; those bindings are the most
general shapes of the mappable functions.
"""
from __future__ import annotations

from dataclasses import dataclass

from .funexpr import (
    Constraint,
    FunExpr,
    FunVar,
    Id,
    Lift,
    ProdF,
    SumF,
    canonical_rename,
    expand_id,
    fun_children,
)


class SpecUnsatisfiable(Exception):
    """The constraint set has no solution (head clash or occurs failure).

    Generated constraint sets are always solvable when the entry precondition
    holds; this surfaces only for hand-built constraint sets.
    """


@dataclass(frozen=True)
class AtomicConstraint:
    lhs: FunExpr
    rhs: FunVar


def decompose(c: Constraint) -> list[AtomicConstraint]:
    """Peel identical head symbols from both sides until one is a variable."""
    out: list[AtomicConstraint] = []

    def peel(a: FunExpr, b: FunExpr) -> None:
        if isinstance(b, FunVar):
            out.append(AtomicConstraint(a, b))
            return
        if isinstance(a, FunVar):
            out.append(AtomicConstraint(b, a))
            return
        if isinstance(a, Id) and isinstance(b, Id):
            if a.at == b.at:
                return
            ea, eb = expand_id(a), expand_id(b)
            if ea is None or eb is None:
                raise SpecUnsatisfiable(f"cannot decompose <{a}, {b}>")
            peel(ea, eb)
            return
        if isinstance(a, Id):
            ea = expand_id(a)
            if ea is None:
                raise SpecUnsatisfiable(f"cannot decompose <{a}, {b}>")
            peel(ea, b)
            return
        if isinstance(b, Id):
            eb = expand_id(b)
            if eb is None:
                raise SpecUnsatisfiable(f"cannot decompose <{a}, {b}>")
            peel(a, eb)
            return
        if isinstance(a, ProdF) and isinstance(b, ProdF):
            peel(a.left, b.left)
            peel(a.right, b.right)
            return
        if isinstance(a, SumF) and isinstance(b, SumF):
            peel(a.left, b.left)
            peel(a.right, b.right)
            return
        if isinstance(a, Lift) and isinstance(b, Lift) and a.ctor == b.ctor:
            for x, y in zip(a.args, b.args):
                peel(x, y)
            return
        raise SpecUnsatisfiable(f"head clash decomposing <{a}, {b}>")

    peel(c.lhs, c.rhs)
    return out


@dataclass
class SolvedSystem:
    """An idempotent triangular substitution. Keys are ordered by creation;
    every binding is fully substituted, so applying the system to any of its
    own values is a fixpoint."""

    bindings: dict[FunVar, FunExpr]
    free_vars: tuple[FunVar, ...]


def unify_all(atomics: list[AtomicConstraint]) -> SolvedSystem:
    """First-order unification over function expressions.

    Orientation: when two variables meet, the earlier-created one is bound to
    the later; a variable meeting a composite is bound to it (after the occurs
    check). Identities expand on demand exactly as in decomposition.
    """
    raw: dict[FunVar, FunExpr] = {}

    def walk(e: FunExpr) -> FunExpr:
        while isinstance(e, FunVar) and e in raw:
            e = raw[e]
        return e

    def occurs(v: FunVar, e: FunExpr) -> bool:
        e = walk(e)
        if isinstance(e, FunVar):
            return e == v
        return any(occurs(v, c) for c in fun_children(e))

    def bind(v: FunVar, e: FunExpr) -> None:
        if occurs(v, e):
            raise SpecUnsatisfiable(f"occurs check failed binding {v} to {e}")
        raw[v] = e

    def unite(a: FunExpr, b: FunExpr) -> None:
        a, b = walk(a), walk(b)
        if isinstance(a, FunVar) and isinstance(b, FunVar):
            if a == b:
                return
            lo, hi = (a, b) if a.intro < b.intro else (b, a)
            raw[lo] = hi
            return
        if isinstance(a, FunVar):
            bind(a, b)
            return
        if isinstance(b, FunVar):
            bind(b, a)
            return
        if isinstance(a, Id) and isinstance(b, Id):
            if a.at == b.at:
                return
            ea, eb = expand_id(a), expand_id(b)
            if ea is None or eb is None:
                raise SpecUnsatisfiable(f"cannot unify {a} with {b}")
            unite(ea, eb)
            return
        if isinstance(a, Id):
            ea = expand_id(a)
            if ea is None:
                raise SpecUnsatisfiable(f"cannot unify {a} with {b}")
            unite(ea, b)
            return
        if isinstance(b, Id):
            eb = expand_id(b)
            if eb is None:
                raise SpecUnsatisfiable(f"cannot unify {a} with {b}")
            unite(a, eb)
            return
        if isinstance(a, ProdF) and isinstance(b, ProdF):
            unite(a.left, b.left)
            unite(a.right, b.right)
            return
        if isinstance(a, SumF) and isinstance(b, SumF):
            unite(a.left, b.left)
            unite(a.right, b.right)
            return
        if isinstance(a, Lift) and isinstance(b, Lift) and a.ctor == b.ctor:
            for x, y in zip(a.args, b.args):
                unite(x, y)
            return
        raise SpecUnsatisfiable(f"head clash unifying {a} with {b}")

    for ac in atomics:
        unite(ac.lhs, ac.rhs)

    def resolve(e: FunExpr) -> FunExpr:
        e = walk(e)
        if isinstance(e, ProdF):
            return ProdF(resolve(e.left), resolve(e.right))
        if isinstance(e, SumF):
            return SumF(resolve(e.left), resolve(e.right))
        if isinstance(e, Lift):
            return Lift(e.ctor, tuple(resolve(a) for a in e.args))
        return e

    ordered = sorted(raw, key=lambda v: v.intro)
    bindings = {v: resolve(raw[v]) for v in ordered}
    free: dict[FunVar, None] = {}

    def collect_free(e: FunExpr) -> None:
        if isinstance(e, FunVar):
            if e not in bindings:
                free.setdefault(e, None)
            return
        for c in fun_children(e):
            collect_free(c)

    for value in bindings.values():
        collect_free(value)
    return SolvedSystem(bindings, tuple(free))


def most_general_form(solved: SolvedSystem, roots: tuple[FunVar, ...]) -> tuple[FunExpr, ...]:
    """The solved binding for each root, with free variables renamed to
    f'1, f'2, ... in order of first occurrence across the tuple."""
    forms = []
    for root in roots:
        if root not in solved.bindings:
            raise SpecUnsatisfiable(f"no binding for root function {root}")
        forms.append(solved.bindings[root])
    return canonical_rename(tuple(forms))


def solve(constraints: list[Constraint], roots: tuple[FunVar, ...]) -> tuple[SolvedSystem, tuple[FunExpr, ...]]:
    """Decompose and unify a constraint list; return the solved system and
    the canonical most general form of each root."""
    atomics: list[AtomicConstraint] = []
    for c in constraints:
        atomics.extend(decompose(c))
    solved = unify_all(atomics)
    return solved, most_general_form(solved, roots)
