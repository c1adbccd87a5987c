"""Constraint generation: walk a typed term against a specification.

Each call of the walk handles one subterm together with the part of the
specification that describes it. A call receives the subterm, one input
function expression per argument of the specification's head, and the
specification itself, a type expression over this call's specification
variables. It emits constraints relating the input functions to fresh
function variables:

  * one `g` variable per specification variable, tied to the inputs by the
    constraints <Sigma_l g.., f_l>;
  * for a constructor subterm, fresh index variables (one per constructor
    binder) are matched against the specification components, producing
    assignments that either define a specification variable in terms of the
    index variables (emitting <psi h.., g_i>) or pin an index variable to a
    specification expression (emitting consistency constraints when the same
    index is pinned twice);
  * recursive calls on constructor arguments whose instantiated types still
    involve specification structure; arguments whose types collapse to a
    closed type or a single variable are skipped entirely, which is what
    makes them incidental rather than essential.

The head former of every call is recorded as essential structure.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .funexpr import Constraint, FunExpr, FunVar, fun_domain, lift_type
from .syntax import (
    App,
    Ctor,
    Inl,
    Inr,
    Pair,
    Path,
    Prod,
    Spec,
    Sum,
    Term,
    TypeExpr,
    Var,
    free_type_vars,
    is_closed,
    subst_type,
    subterm_at,
    type_children,
)
from .typecheck import TypedTerm
from .wellformed import ValidatedProgram


class InternalInvariantViolation(Exception):
    """A call precondition failed mid-run; indicates a bug, not bad input."""


class NotTopUnifiable(InternalInvariantViolation):
    """A matching problem had clashing head symbols."""


@dataclass(frozen=True)
class BetaAssign:
    """An assignment `var == psi`, defining a specification variable in terms
    of the current call's index variables (psi may also be closed)."""

    var: str
    psi: TypeExpr


@dataclass(frozen=True)
class SigmaAssign:
    """An assignment `sigma == gamma`, pinning an index variable to an
    expression over the current call's specification variables."""

    sigma: TypeExpr
    gamma: str


Assignment = BetaAssign | SigmaAssign


@dataclass
class CallTrace:
    """Everything one call of the walk did, for reporting and golden tests."""

    label: str
    path: Path
    term: Term
    funs: tuple[FunExpr, ...]
    spec: TypeExpr
    matching: list[tuple[TypeExpr, TypeExpr]] = field(default_factory=list)
    assignments: list[Assignment] = field(default_factory=list)
    taus: tuple[TypeExpr, ...] = ()
    rjs: list[TypeExpr] = field(default_factory=list)
    zetas: list[tuple[TypeExpr, ...] | None] = field(default_factory=list)
    emitted: list[Constraint] = field(default_factory=list)


@dataclass(frozen=True)
class AnnotatedTerm:
    """A term with the set of essential positions (paths of call heads)."""

    term: Term
    essential: frozenset[Path]


@dataclass
class RunResult:
    constraints: list[Constraint]
    traces: list[CallTrace]
    annotation: AnnotatedTerm
    root_funs: tuple[FunVar, ...]


def spec_components(shape: TypeExpr) -> tuple[TypeExpr, ...] | None:
    """Split a specification head into its argument expressions, or None when
    the expression is not headed by a constructor, product, or sum."""
    if isinstance(shape, App):
        return shape.args
    if isinstance(shape, (Prod, Sum)):
        return (shape.left, shape.right)
    return None


def recursion_target(arg_type: TypeExpr) -> tuple[TypeExpr, ...] | None:
    """Decide whether an instantiated argument type needs a recursive call.

    Closed types and bare variables are incidental: nothing to analyze, so
    the subterm is skipped. Anything else is headed by a constructor, product,
    or sum and returns its component expressions for the child call.
    """
    if is_closed(arg_type) or isinstance(arg_type, Var):
        return None
    return spec_components(arg_type)


def match_shape(pattern: TypeExpr, concrete: TypeExpr, bindable: tuple[str, ...]) -> dict[str, TypeExpr]:
    """One-sided matching of a variable pattern against a ground type."""
    out: dict[str, TypeExpr] = {}

    def go(p: TypeExpr, c: TypeExpr) -> bool:
        if isinstance(p, Var) and p.name in bindable:
            if p.name in out:
                return out[p.name] == c
            out[p.name] = c
            return True
        if type(p) is not type(c):
            return False
        if isinstance(p, App):
            return p.ctor == c.ctor and all(go(a, b) for a, b in zip(p.args, c.args))
        kids_p, kids_c = type_children(p), type_children(c)
        if kids_p:
            return all(go(a, b) for a, b in zip(kids_p, kids_c))
        return p == c

    if not go(pattern, concrete):
        raise InternalInvariantViolation(
            f"type {concrete} is not an instance of {pattern}"
        )
    return out


def match_spec(sigma: TypeExpr, index_expr: TypeExpr) -> list[Assignment]:
    """Solve one matching problem `sigma == index_expr` by simultaneous
    structural descent.

    The left side is an expression over the call's specification variables,
    the right an index expression over fresh index variables. At a position
    where both sides are variables the pinning form is chosen, since it can
    only cut recursion short, never change the solved result.
    """
    out: list[Assignment] = []

    def go(left: TypeExpr, right: TypeExpr) -> None:
        if isinstance(left, Var) and isinstance(right, Var):
            out.append(SigmaAssign(left, right.name))
            return
        if isinstance(left, Var):
            out.append(BetaAssign(left.name, right))
            return
        if isinstance(right, Var):
            out.append(SigmaAssign(left, right.name))
            return
        if type(left) is not type(right):
            raise NotTopUnifiable(f"cannot match {left} against {right}")
        if isinstance(left, App):
            if left.ctor != right.ctor:
                raise NotTopUnifiable(f"cannot match {left} against {right}")
            for a, b in zip(left.args, right.args):
                go(a, b)
            return
        kids_l, kids_r = type_children(left), type_children(right)
        if kids_l:
            for a, b in zip(kids_l, kids_r):
                go(a, b)
            return
        if left != right:
            raise NotTopUnifiable(f"cannot match {left} against {right}")

    go(sigma, index_expr)
    return out


def compute_taus(assignments: list[Assignment], gammas: tuple[str, ...]) -> tuple[TypeExpr, ...]:
    """For each index variable, its first pinned expression if any, else itself."""
    first: dict[str, TypeExpr] = {}
    for a in assignments:
        if isinstance(a, SigmaAssign):
            first.setdefault(a.gamma, a.sigma)
    return tuple(first.get(g, Var(g)) for g in gammas)


def emit_step_five(
    assignments: list[Assignment],
    betas: tuple[str, ...],
    g_env: dict[str, FunExpr],
    h_env: dict[str, FunExpr],
    origin: str,
) -> list[Constraint]:
    """One constraint <psi h.., g_i> per defining assignment, in variable order."""
    out = []
    for b in betas:
        for a in assignments:
            if isinstance(a, BetaAssign) and a.var == b:
                out.append(Constraint(lift_type(a.psi, h_env), g_env[b], origin))
    return out


def emit_step_six(
    assignments: list[Assignment],
    gammas: tuple[str, ...],
    g_env: dict[str, FunExpr],
    origin: str,
) -> list[Constraint]:
    """Consistency constraints when several expressions pin the same index."""
    out = []
    for g in gammas:
        sigmas = [a.sigma for a in assignments if isinstance(a, SigmaAssign) and a.gamma == g]
        for q in range(1, len(sigmas)):
            out.append(
                Constraint(lift_type(sigmas[q], g_env), lift_type(sigmas[0], g_env), origin)
            )
    return out


def compute_rj(arg_type: TypeExpr, type_vars: tuple[str, ...], taus: tuple[TypeExpr, ...]) -> TypeExpr:
    """Instantiate a constructor argument type at the computed tau expressions."""
    return subst_type(arg_type, dict(zip(type_vars, taus)))


class _Run:
    def __init__(self, typed: TypedTerm, vp: ValidatedProgram):
        self.typed = typed
        self.vp = vp
        self._intro = itertools.count()
        self.constraints: list[Constraint] = []
        self.traces: list[CallTrace] = []
        self.essential: set[Path] = set()

    def fresh_fun(self, kind: str, label: str, index: int, domain: TypeExpr) -> FunVar:
        return FunVar(kind, label, index, intro=next(self._intro), domain=domain)

    def call(
        self,
        path: Path,
        funs: tuple[FunExpr, ...],
        spec_te: TypeExpr,
        cenv: dict[str, TypeExpr],
        label: str,
    ) -> None:
        term = subterm_at(self.typed.term, path)
        components = spec_components(spec_te)
        if components is None or len(components) != len(funs):
            raise InternalInvariantViolation(f"bad call on {spec_te} with {len(funs)} functions")
        if subst_type(spec_te, cenv) != self.typed.type_at(path):
            raise InternalInvariantViolation(
                f"call {label}: instantiated specification {subst_type(spec_te, cenv)} "
                f"differs from subterm type {self.typed.type_at(path)}"
            )

        betas = free_type_vars(spec_te)
        g_env: dict[str, FunExpr] = {
            b: self.fresh_fun("g", label, i + 1, cenv[b]) for i, b in enumerate(betas)
        }
        trace = CallTrace(label, path, term, funs, spec_te)
        self.traces.append(trace)
        self.essential.add(path)

        def emit(c: Constraint) -> None:
            trace.emitted.append(c)
            self.constraints.append(c)

        for ell, comp in enumerate(components):
            emit(Constraint(lift_type(comp, g_env), funs[ell], f"{label}:i"))

        if isinstance(spec_te, (Prod, Sum)):
            if isinstance(spec_te, Prod):
                if not isinstance(term, Pair):
                    raise InternalInvariantViolation(f"call {label}: expected a pair")
                branches = [(0, 0, components[0]), (1, 1, components[1])]
            elif isinstance(term, Inl):
                branches = [(0, 0, components[0])]
            elif isinstance(term, Inr):
                branches = [(1, 0, components[1])]
            else:
                raise InternalInvariantViolation(f"call {label}: expected an injection")
            for j, child_idx, comp in branches:
                zetas = recursion_target(comp)
                if zetas is None:
                    continue
                child_funs = tuple(lift_type(z, g_env) for z in zetas)
                child_cenv = {v: cenv[v] for v in free_type_vars(comp)}
                self.call(path + (child_idx,), child_funs, comp, child_cenv, f"{label}.{j + 1}")
            return

        # Constructor case.
        if not isinstance(term, Ctor):
            raise InternalInvariantViolation(f"call {label}: expected a constructor application")
        decl, sig = self.vp.ctor(term.name)
        if not isinstance(spec_te, App) or spec_te.ctor != decl.name:
            raise InternalInvariantViolation(
                f"call {label}: constructor {term.name!r} does not build {spec_te}"
            )
        w = self.typed.instance_at(path)
        for ell, k_expr in enumerate(sig.ret_indices):
            expected = subst_type(k_expr, dict(zip(sig.type_vars, w)))
            got = fun_domain(funs[ell])
            if got is not None and got != expected:
                raise InternalInvariantViolation(
                    f"call {label}: input function {ell + 1} has domain {got}, "
                    f"expected {expected}"
                )

        gammas = tuple(f"y{i + 1}^{label}" for i in range(len(sig.type_vars)))
        gamma_types = dict(zip(gammas, w))
        rename = {a: Var(g) for a, g in zip(sig.type_vars, gammas)}
        for ell, comp in enumerate(components):
            index_expr = subst_type(sig.ret_indices[ell], rename)
            trace.matching.append((comp, index_expr))
            trace.assignments.extend(match_spec(comp, index_expr))

        taus = compute_taus(trace.assignments, gammas)
        trace.taus = taus
        h_env: dict[str, FunExpr] = {
            g: self.fresh_fun("h", label, i + 1, w[i]) for i, g in enumerate(gammas)
        }
        for c in emit_step_five(trace.assignments, betas, g_env, h_env, f"{label}:v"):
            emit(c)
        for c in emit_step_six(trace.assignments, gammas, g_env, f"{label}:vi"):
            emit(c)

        gh_env = {**g_env, **h_env}
        child_cenv_all = {**cenv, **gamma_types}
        for j, arg_type in enumerate(sig.arg_types):
            rj = compute_rj(arg_type, sig.type_vars, taus)
            trace.rjs.append(rj)
            zetas = recursion_target(rj)
            if zetas is None:
                trace.zetas.append(None)
                continue
            trace.zetas.append(zetas)
            child_funs = tuple(lift_type(z, gh_env) for z in zetas)
            child_cenv = {v: child_cenv_all[v] for v in free_type_vars(rj)}
            self.call(path + (j,), child_funs, rj, child_cenv, f"{label}.{j + 1}")


def run(typed: TypedTerm, spec: Spec, vp: ValidatedProgram) -> RunResult:
    """Run the analysis on a typed, frozen term.

    The caller must have established the entry precondition with
    `check_call_invariants`; the walk re-checks it at every call.
    """
    if not typed.frozen:
        raise InternalInvariantViolation("run requires a frozen typing; check invariants first")
    shape = spec.shape
    components = spec_components(shape)
    if components is None:
        raise InternalInvariantViolation(f"specification {shape} has no analyzable head")
    cenv = match_shape(shape, typed.type_at(()), spec.vars)
    r = _Run(typed, vp)
    root_funs = tuple(
        r.fresh_fun("f", "", ell + 1, subst_type(comp, cenv))
        for ell, comp in enumerate(components)
    )
    r.call((), root_funs, shape, cenv, "1")
    return RunResult(
        r.constraints,
        r.traces,
        AnnotatedTerm(typed.term, frozenset(r.essential)),
        root_funs,
    )
