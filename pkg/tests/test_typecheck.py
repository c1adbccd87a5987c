"""Type inference, literal defaulting, and the analysis entry precondition."""
from __future__ import annotations

import pytest

import gadtmap as g
from gadtmap.syntax import App, Atom, Base, Meta, Prod


class TestInfer:
    def test_seq_example_with_int_literals(self, seq_vp):
        t = g.parse_term("pair (pair (const tt) (const 2)) (const 5)", seq_vp)
        typed = g.infer(t, seq_vp, int_literals=True)
        assert typed.type_at(()) == App(
            "Seq", (Prod(Prod(Base("Bool"), Base("Int")), Base("Int")),)
        )

    def test_literals_default_to_nat(self, nested_vp):
        t = g.parse_term("cons (cons 1 (cons 2 nil)) (cons (cons 3 nil) nil)", nested_vp)
        typed = g.infer(t, nested_vp)
        assert typed.type_at(()) == App("List", (App("List", (Base("Nat"),)),))

    def test_bare_nil_keeps_unsolved_meta(self, nested_vp):
        typed = g.infer(g.parse_term("nil", nested_vp), nested_vp)
        ty = typed.type_at(())
        assert isinstance(ty, App) and ty.ctor == "List"
        assert isinstance(ty.args[0], Meta)

    def test_subterm_types_are_recorded(self, seq_vp):
        t = g.parse_term("pair (const tt) (const 2)", seq_vp)
        typed = g.infer(t, seq_vp)
        assert typed.type_at((0,)) == App("Seq", (Base("Bool"),))
        assert typed.type_at((0, 0)) == Base("Bool")

    def test_constructor_instances_are_recorded(self, seq_vp):
        t = g.parse_term("pair (const tt) (const 2)", seq_vp)
        typed = g.infer(t, seq_vp)
        assert typed.instance_at(()) == (Base("Bool"), Base("Nat"))

    def test_annotation_forces_int(self, nested_vp):
        typed = g.infer(g.parse_term("cons (2 : Int) nil", nested_vp), nested_vp)
        assert typed.type_at(()) == App("List", (Base("Int"),))
        # annotations are erased from the typed term
        assert typed.term == g.Ctor("cons", (g.Lit("2"), g.Ctor("nil", ())))

    def test_mismatched_elements_fail(self, nested_vp):
        with pytest.raises(g.TypeCheckError):
            g.infer(g.parse_term("cons 1 (cons tt nil)", nested_vp), nested_vp)

    def test_annotation_conflict_fails(self, nested_vp):
        with pytest.raises(g.TypeCheckError):
            g.infer(g.parse_term("cons (tt : Int) nil", nested_vp), nested_vp)

    def test_inference_is_deterministic(self, g_vp):
        t = g.parse_term("projpair (inj (inj (cons 2 nil), pairing (inj 2) const))", g_vp)
        a, b = g.infer(t, g_vp), g.infer(t, g_vp)
        assert a.type_at(()) == b.type_at(()) == App(
            "G", (Prod(App("List", (Base("Nat"),)), Base("Nat")),)
        )


class TestCheckCallInvariants:
    def test_witness_for_seq(self, seq_vp):
        t = g.parse_term("pair (pair (const tt) (const 2)) (const 5)", seq_vp)
        typed = g.infer(t, seq_vp, int_literals=True)
        w = g.check_call_invariants(typed, g.parse_spec("Seq b1", seq_vp), 1)
        assert w.subst == {"b1": Prod(Prod(Base("Bool"), Base("Int")), Base("Int"))}
        assert w.w == (Prod(Base("Bool"), Base("Int")), Base("Int"))

    def test_witness_for_deep_list_spec(self, nested_vp):
        t = g.parse_term("cons (cons 1 (cons 2 nil)) (cons (cons 3 nil) nil)", nested_vp)
        typed = g.infer(t, nested_vp)
        w = g.check_call_invariants(typed, g.parse_spec("List (List b1)", nested_vp), 1)
        assert w.subst == {"b1": Base("Nat")}

    def test_head_clash_is_spec_mismatch(self, seq_vp, nested_vp):
        src = open("programs/seq.gadt").read() + "\n" + open("programs/nested.gadt").read()
        vp = g.validate(g.parse_program(src))
        typed = g.infer(g.parse_term("const tt", vp), vp)
        with pytest.raises(g.SpecMismatch):
            g.check_call_invariants(typed, g.parse_spec("List b1", vp), 1)

    def test_fun_arity_mismatch(self, seq_vp):
        typed = g.infer(g.parse_term("const tt", seq_vp), seq_vp)
        with pytest.raises(g.FunArityMismatch):
            g.check_call_invariants(typed, g.parse_spec("Seq b1", seq_vp), 2)

    def test_bare_variable_spec_is_rejected(self, seq_vp):
        typed = g.infer(g.parse_term("const tt", seq_vp), seq_vp)
        with pytest.raises(g.SpecMismatch):
            g.spec_head_arity(g.parse_spec("b1", seq_vp), seq_vp)

    def test_spec_instantiates_leftover_metas(self, nested_vp):
        typed = g.infer(g.parse_term("nil", nested_vp), nested_vp)
        w = g.check_call_invariants(typed, g.parse_spec("List (List b1)", nested_vp), 1)
        ty = typed.type_at(())
        assert isinstance(ty.args[0], App) and ty.args[0].ctor == "List"
        assert isinstance(w.subst["b1"], Atom)

    def test_freezing_grounds_all_types(self, nested_vp):
        typed = g.infer(g.parse_term("nil", nested_vp), nested_vp)
        g.check_call_invariants(typed, g.parse_spec("List b1", nested_vp), 1)
        assert typed.frozen
        for path in typed.paths():
            assert not g.syntax.metas_in(typed.type_at(path))

    def test_spec_with_closed_component(self, nested_vp):
        typed = g.infer(g.parse_term("nil", nested_vp), nested_vp)
        w = g.check_call_invariants(typed, g.parse_spec("List Bool", nested_vp), 1)
        assert w.subst == {}
        assert typed.type_at(()) == App("List", (Base("Bool"),))

    def test_closed_spec_conflict(self, nested_vp):
        typed = g.infer(g.parse_term("cons 1 nil", nested_vp), nested_vp)
        with pytest.raises(g.SpecMismatch):
            g.check_call_invariants(typed, g.parse_spec("List Bool", nested_vp), 1)

    def test_sum_spec_other_side_frozen(self, nested_vp):
        typed = g.infer(g.parse_term("inl (cons 1 nil)", nested_vp), nested_vp)
        w = g.check_call_invariants(typed, g.parse_spec("List b1 + b2", nested_vp), 2)
        assert w.subst["b1"] == Base("Nat")
        assert isinstance(w.subst["b2"], Atom)
        assert w.w is None
