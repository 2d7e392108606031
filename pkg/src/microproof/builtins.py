"""The hardcoded logical core installed in every environment.

Eq (with refl and a motive-based eliminator), And, Or, Iff, True, False, Not,
Ne, the congruence lemmas used by certified rewriting, and sorryAx.  These are
plain typed constants; nothing here bypasses the kernel.
"""

from __future__ import annotations

from .env import AXIOM, DEFINITION, Declaration, Environment, REDUCIBLE
from .kernel import check_decl
from .terms import (App, Const, EXPLICIT, FVar, IMPLICIT, Lam, Pi, SORT_PROP,
                    SORT_TYPE, Term, abstract_fvar, fresh_fvar, mk_app)


class TeleBuilder:
    """Builds Pi telescopes with readable code using transient fvars."""

    def __init__(self):
        self.binders: list[tuple[FVar, str, Term, str]] = []

    def add(self, name: str, ty: Term, mode: str = EXPLICIT) -> FVar:
        fv = fresh_fvar()
        self.binders.append((fv, name, ty, mode))
        return fv

    def imp(self, name: str, ty: Term) -> FVar:
        return self.add(name, ty, IMPLICIT)

    def pi(self, body: Term) -> Term:
        for fv, name, ty, mode in reversed(self.binders):
            body = Pi(name, ty, abstract_fvar(body, fv.id), mode)
        return body

    def lam(self, body: Term) -> Term:
        for i in range(len(self.binders) - 1, -1, -1):
            fv, name, ty, mode = self.binders[i]
            body = Lam(name, ty, abstract_fvar(body, fv.id), mode)
        return body


def _shift_arrow(a: Term, b: Term) -> Term:
    from .terms import shift
    return Pi("_", a, shift(b, 1))


def EQ(A: Term, a: Term, b: Term) -> Term:
    return mk_app(Const("Eq"), A, a, b)


def eq_prop(p: Term, q: Term) -> Term:
    return EQ(SORT_PROP, p, q)


def _axiom(name: str, ty: Term, reducibility: str = "default") -> Declaration:
    return Declaration(name, AXIOM, ty, None, reducibility, frozenset(), False, "Init")


def _defn(name: str, ty: Term, value: Term, red: str = REDUCIBLE) -> Declaration:
    return Declaration(name, DEFINITION, ty, value, red, frozenset(), False, "Init")


def core_declarations() -> list[Declaration]:
    ds: list[Declaration] = []

    # Eq
    t = TeleBuilder()
    A = t.imp("A", SORT_TYPE)
    t.add("a", A)
    t.add("b", A)
    ds.append(_axiom("Eq", t.pi(SORT_PROP)))

    t = TeleBuilder()
    A = t.imp("A", SORT_TYPE)
    a = t.add("a", A)
    ds.append(_axiom("Eq.refl", t.pi(EQ(A, a, a))))

    t = TeleBuilder()
    A = t.imp("A", SORT_TYPE)
    motive = t.imp("motive", _shift_arrow(A, SORT_PROP))
    a = t.imp("a", A)
    b = t.imp("b", A)
    t.add("h", EQ(A, a, b))
    t.add("m", App(motive, a))
    ds.append(_axiom("Eq.rec", t.pi(App(motive, b))))

    t = TeleBuilder()
    A = t.imp("A", SORT_TYPE)
    a = t.imp("a", A)
    b = t.imp("b", A)
    t.add("h", EQ(A, a, b))
    ds.append(_axiom("Eq.symm", t.pi(EQ(A, b, a))))

    t = TeleBuilder()
    A = t.imp("A", SORT_TYPE)
    a = t.imp("a", A)
    b = t.imp("b", A)
    c = t.imp("c", A)
    t.add("h1", EQ(A, a, b))
    t.add("h2", EQ(A, b, c))
    ds.append(_axiom("Eq.trans", t.pi(EQ(A, a, c))))

    for name, flip in (("Eq.mp", False), ("Eq.mpr", True)):
        t = TeleBuilder()
        p = t.imp("p", SORT_PROP)
        q = t.imp("q", SORT_PROP)
        t.add("h", eq_prop(p, q))
        t.add("hp", q if flip else p)
        ds.append(_axiom(name, t.pi(p if flip else q)))

    t = TeleBuilder()
    A = t.imp("A", SORT_TYPE)
    B = t.imp("B", SORT_TYPE)
    a = t.imp("a", A)
    b = t.imp("b", A)
    f = t.add("f", _shift_arrow(A, B))
    t.add("h", EQ(A, a, b))
    ds.append(_axiom("congrArg", t.pi(EQ(B, App(f, a), App(f, b)))))

    t = TeleBuilder()
    A = t.imp("A", SORT_TYPE)
    B = t.imp("B", SORT_TYPE)
    f = t.imp("f", _shift_arrow(A, B))
    g = t.imp("g", _shift_arrow(A, B))
    t.add("h", EQ(_shift_arrow(A, B), f, g))
    a = t.add("a", A)
    ds.append(_axiom("congrFun", t.pi(EQ(B, App(f, a), App(g, a)))))

    t = TeleBuilder()
    A = t.imp("A", SORT_TYPE)
    B = t.imp("B", SORT_TYPE)
    f = t.imp("f", _shift_arrow(A, B))
    g = t.imp("g", _shift_arrow(A, B))
    a = t.imp("a", A)
    b = t.imp("b", A)
    t.add("h1", EQ(_shift_arrow(A, B), f, g))
    t.add("h2", EQ(A, a, b))
    ds.append(_axiom("congr", t.pi(EQ(B, App(f, a), App(g, b)))))

    # True / False
    ds.append(_axiom("True", SORT_PROP))
    ds.append(_axiom("True.intro", Const("True")))
    ds.append(_axiom("False", SORT_PROP))
    t = TeleBuilder()
    p = t.imp("p", SORT_PROP)
    t.add("h", Const("False"))
    ds.append(_axiom("False.elim", t.pi(p)))

    # Not / Ne
    t = TeleBuilder()
    p = t.add("p", SORT_PROP)
    not_val = t.lam(_shift_arrow(p, Const("False")))
    ds.append(_defn("Not", Pi("p", SORT_PROP, SORT_PROP), not_val))

    t = TeleBuilder()
    A = t.imp("A", SORT_TYPE)
    a = t.add("a", A)
    b = t.add("b", A)
    ne_val = t.lam(App(Const("Not"), EQ(A, a, b)))
    t2 = TeleBuilder()
    A2 = t2.imp("A", SORT_TYPE)
    t2.add("a", A2)
    t2.add("b", A2)
    ds.append(_defn("Ne", t2.pi(SORT_PROP), ne_val))

    # And / Or / Iff
    binprop = Pi("p", SORT_PROP, Pi("q", SORT_PROP, SORT_PROP))
    for cname in ("And", "Or", "Iff"):
        ds.append(_axiom(cname, binprop))

    t = TeleBuilder()
    p = t.imp("p", SORT_PROP)
    q = t.imp("q", SORT_PROP)
    t.add("hp", p)
    t.add("hq", q)
    ds.append(_axiom("And.intro", t.pi(mk_app(Const("And"), p, q))))
    for name, which in (("And.left", 0), ("And.right", 1)):
        t = TeleBuilder()
        p = t.imp("p", SORT_PROP)
        q = t.imp("q", SORT_PROP)
        t.add("h", mk_app(Const("And"), p, q))
        ds.append(_axiom(name, t.pi(p if which == 0 else q)))

    for name, which in (("Or.inl", 0), ("Or.inr", 1)):
        t = TeleBuilder()
        p = t.imp("p", SORT_PROP)
        q = t.imp("q", SORT_PROP)
        t.add("h", p if which == 0 else q)
        ds.append(_axiom(name, t.pi(mk_app(Const("Or"), p, q))))
    t = TeleBuilder()
    p = t.imp("p", SORT_PROP)
    q = t.imp("q", SORT_PROP)
    r = t.imp("r", SORT_PROP)
    t.add("h", mk_app(Const("Or"), p, q))
    t.add("hp", _shift_arrow(p, r))
    t.add("hq", _shift_arrow(q, r))
    ds.append(_axiom("Or.elim", t.pi(r)))

    t = TeleBuilder()
    p = t.imp("p", SORT_PROP)
    q = t.imp("q", SORT_PROP)
    t.add("h1", _shift_arrow(p, q))
    t.add("h2", _shift_arrow(q, p))
    ds.append(_axiom("Iff.intro", t.pi(mk_app(Const("Iff"), p, q))))
    for name, flip in (("Iff.mp", False), ("Iff.mpr", True)):
        t = TeleBuilder()
        p = t.imp("p", SORT_PROP)
        q = t.imp("q", SORT_PROP)
        t.add("h", mk_app(Const("Iff"), p, q))
        t.add("hp", q if flip else p)
        ds.append(_axiom(name, t.pi(p if flip else q)))

    # propositional extensionality and simp support
    t = TeleBuilder()
    p = t.imp("p", SORT_PROP)
    q = t.imp("q", SORT_PROP)
    t.add("h", mk_app(Const("Iff"), p, q))
    ds.append(_axiom("propext", t.pi(eq_prop(p, q))))

    t = TeleBuilder()
    p = t.imp("p", SORT_PROP)
    t.add("h", p)
    ds.append(_axiom("eq_true", t.pi(eq_prop(p, Const("True")))))

    t = TeleBuilder()
    p = t.imp("p", SORT_PROP)
    t.add("h", App(Const("Not"), p))
    ds.append(_axiom("eq_false", t.pi(eq_prop(p, Const("False")))))

    t = TeleBuilder()
    p = t.imp("p", SORT_PROP)
    t.add("h", eq_prop(p, Const("True")))
    ds.append(_axiom("of_eq_true", t.pi(p)))

    t = TeleBuilder()
    a = t.imp("a", SORT_PROP)
    b = t.imp("b", SORT_PROP)
    c = t.imp("c", SORT_PROP)
    d = t.imp("d", SORT_PROP)
    t.add("h1", eq_prop(a, b))
    t.add("h2", eq_prop(c, d))
    ds.append(_axiom("imp_congr_eq",
                     t.pi(eq_prop(_shift_arrow(a, c), _shift_arrow(b, d)))))

    # sorry
    t = TeleBuilder()
    p = t.add("p", SORT_PROP)
    ds.append(_axiom("sorryAx", t.pi(p)))

    return ds


def base_environment() -> Environment:
    env = Environment()
    for d in core_declarations():
        env, _ = check_decl(env, d)
    return env
