"""Kernel unit tests: reduction, definitional equality, type inference,
declaration checking."""

import pytest

from microproof.env import (AXIOM, DEFAULT, Declaration, DEFINITION, EMPTY_CTX,
                            Environment, REDUCIBLE, THEOREM)
from microproof.errors import MicroProofError
from microproof.kernel import (check_decl, def_eq, infer_type, is_prop,
                               uses_sorry, whnf)
from microproof.terms import (App, Const, Lam, Pi, SORT_PROP, SORT_TYPE, Sort,
                              Var, alpha_eq, mk_app)


def base_env():
    env = Environment()
    env = env.add(Declaration("A", AXIOM, SORT_TYPE, None, DEFAULT,
                              frozenset(), False, "Init"))
    env = env.add(Declaration("a", AXIOM, Const("A"), None, DEFAULT,
                              frozenset(), False, "Init"))
    env = env.add(Declaration("b", AXIOM, Const("A"), None, DEFAULT,
                              frozenset(), False, "Init"))
    return env


ID_A = Lam("x", Const("A"), Var(0))


class TestWhnf:
    def test_beta(self):
        env = base_env()
        assert whnf(env, App(ID_A, Const("a"))) == Const("a")

    def test_nested_beta(self):
        env = base_env()
        t = App(App(Lam("f", Pi("x", Const("A"), Const("A")), Var(0)), ID_A),
                Const("b"))
        assert whnf(env, t) == Const("b")

    def test_delta_unfolds_definitions(self):
        env = base_env().add(Declaration(
            "id_a", DEFINITION, Pi("x", Const("A"), Const("A")), ID_A,
            DEFAULT, frozenset(), False, "Init"))
        assert whnf(env, App(Const("id_a"), Const("a"))) == Const("a")

    def test_axioms_are_opaque(self):
        env = base_env()
        assert whnf(env, Const("a")) == Const("a")

    def test_whnf_stops_at_head(self):
        env = base_env()
        # the argument of a stuck application is not reduced
        stuck = App(Const("a"), App(ID_A, Const("b")))
        assert whnf(env, stuck) == stuck


class TestDefEq:
    def test_alpha(self):
        env = base_env()
        assert def_eq(env, Lam("x", Const("A"), Var(0)),
                      Lam("y", Const("A"), Var(0)))

    def test_beta(self):
        env = base_env()
        assert def_eq(env, App(ID_A, Const("a")), Const("a"))

    def test_delta(self):
        env = base_env().add(Declaration(
            "a'", DEFINITION, Const("A"), Const("a"), DEFAULT, frozenset(),
            False, "Init"))
        assert def_eq(env, Const("a'"), Const("a"))

    def test_distinct_axioms_differ(self):
        env = base_env()
        assert not def_eq(env, Const("a"), Const("b"))

    def test_no_eta(self):
        env = base_env().add(Declaration(
            "f", AXIOM, Pi("x", Const("A"), Const("A")), None, DEFAULT,
            frozenset(), False, "Init"))
        eta = Lam("x", Const("A"), App(Const("f"), Var(0)))
        assert not def_eq(env, eta, Const("f"))

    def test_under_binder(self):
        env = base_env()
        t1 = Lam("x", Const("A"), App(ID_A, Var(0)))
        t2 = Lam("x", Const("A"), Var(0))
        assert def_eq(env, t1, t2)


class TestInferType:
    def test_sorts(self):
        env = base_env()
        assert infer_type(env, EMPTY_CTX, SORT_PROP) == SORT_TYPE
        # deliberately impredicative at desk scale: Type : Type
        assert infer_type(env, EMPTY_CTX, SORT_TYPE) == SORT_TYPE

    def test_const(self):
        env = base_env()
        assert infer_type(env, EMPTY_CTX, Const("a")) == Const("A")

    def test_lambda_and_app(self):
        env = base_env()
        assert infer_type(env, EMPTY_CTX, ID_A) == Pi("x", Const("A"),
                                                      Const("A"))
        assert infer_type(env, EMPTY_CTX, App(ID_A, Const("a"))) == Const("A")

    def test_pi(self):
        env = base_env()
        assert infer_type(env, EMPTY_CTX,
                          Pi("x", Const("A"), Const("A"))) == SORT_TYPE

    def test_unknown_constant(self):
        env = base_env()
        with pytest.raises(MicroProofError):
            infer_type(env, EMPTY_CTX, Const("nonexistent"))

    def test_app_type_mismatch(self):
        env = base_env()
        with pytest.raises(MicroProofError):
            infer_type(env, EMPTY_CTX, App(Const("a"), Const("b")))

    def test_unbound_var(self):
        env = base_env()
        with pytest.raises(MicroProofError):
            infer_type(env, EMPTY_CTX, Var(0))


class TestIsProp:
    def test_prop_statement(self, env):
        eq = mk_app(Const("Eq"), SORT_TYPE, SORT_PROP, SORT_PROP)
        assert is_prop(env, EMPTY_CTX, eq)

    def test_type_is_not_prop(self, env):
        assert not is_prop(env, EMPTY_CTX, SORT_TYPE)


class TestCheckDecl:
    def test_accepts_well_typed_definition(self):
        env = base_env()
        d = Declaration("id_a", DEFINITION, Pi("x", Const("A"), Const("A")),
                        ID_A, DEFAULT, frozenset(), False, "Main")
        env2, warns = check_decl(env, d)
        assert env2.contains("id_a") and warns == []

    def test_rejects_ill_typed_definition(self):
        env = base_env()
        d = Declaration("bad", DEFINITION, Pi("x", Const("A"), Const("A")),
                        Const("a"), DEFAULT, frozenset(), False, "Main")
        with pytest.raises(MicroProofError):
            check_decl(env, d)

    def test_rejects_non_sort_axiom_statement(self):
        env = base_env()
        d = Declaration("bad_ax", AXIOM, Const("a"), None, DEFAULT,
                        frozenset(), False, "Main")
        with pytest.raises(MicroProofError):
            check_decl(env, d)

    def test_sorry_warns_and_flags(self, env):
        stmt = mk_app(Const("Eq"), SORT_TYPE, SORT_PROP, SORT_PROP)
        d = Declaration("half_done", THEOREM, stmt,
                        App(Const("sorryAx"), stmt), DEFAULT, frozenset(),
                        False, "Main")
        env2, warns = check_decl(env, d)
        assert warns == ["declaration 'half_done' uses sorry"]
        assert env2.find("half_done").uses_sorry

    def test_duplicate_name_rejected(self):
        env = base_env()
        d = Declaration("a", AXIOM, Const("A"), None, DEFAULT, frozenset(),
                        False, "Main")
        with pytest.raises(MicroProofError):
            check_decl(env, d)


class TestUsesSorry:
    def test_detects(self):
        assert uses_sorry(App(Const("sorryAx"), Const("A")))
        assert not uses_sorry(App(Const("a"), Const("A")))


class TestAlphaEq:
    def test_binder_names_ignored(self):
        assert alpha_eq(Lam("x", Const("A"), Var(0)),
                        Lam("q", Const("A"), Var(0)))
        assert not alpha_eq(Lam("x", Const("A"), Var(0)),
                            Lam("x", Const("B"), Var(0)))
