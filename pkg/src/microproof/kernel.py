"""The trusted kernel: type inference, definitional equality, declaration checking.

Definitional equality is alpha + beta + delta (unfolding of reducible/default
definitions).  No eta, no proof irrelevance.  Two sorts only (Prop, Type).
"""

from __future__ import annotations

import sys
from dataclasses import replace

from .env import (AXIOM, CtxEntry, Declaration, Environment, EXAMPLE,
                  LocalContext, OPAQUE, REDUCIBLE)
from .errors import (AppTypeMismatch, KernelAssertion, NotASort, TypeMismatch,
                     UnboundVariable, UnknownConstant)
from .terms import (App, Const, FVar, Lam, MVar, PROP, Pi, SORT_PROP, SORT_TYPE,
                    Sort, Term, TYPE, Var, alpha_eq, app_spine, fresh_fvar,
                    has_mvar, instantiate, mk_app, replace_fvar)

sys.setrecursionlimit(100_000)

SORRY_AX = "sorryAx"


def _unfold_const(env: Environment, t: Term, reducible_only: bool = False) -> Term | None:
    head, args = app_spine(t)
    if not isinstance(head, Const):
        return None
    d = env.find(head.name)
    if d is None or d.value is None or d.reducibility == OPAQUE:
        return None
    if reducible_only and d.reducibility != REDUCIBLE:
        return None
    return mk_app(d.value, *args)


def whnf(env: Environment, t: Term, reducible_only: bool = False) -> Term:
    """Weak head normal form under beta + delta. Idempotent."""
    while True:
        if isinstance(t, App):
            fn = whnf(env, t.fn, reducible_only)
            if isinstance(fn, Lam):
                t = instantiate(fn.body, t.arg)
                continue
            t2 = App(fn, t.arg)
            unfolded = _unfold_const(env, t2, reducible_only)
            if unfolded is not None:
                t = unfolded
                continue
            return t2
        if isinstance(t, Const):
            unfolded = _unfold_const(env, t, reducible_only)
            if unfolded is not None:
                t = unfolded
                continue
            return t
        return t


def def_eq(env: Environment, t1: Term, t2: Term) -> bool:
    """Definitional equality: alpha, beta, delta. Total and pure."""
    if alpha_eq(t1, t2):
        return True
    w1 = whnf(env, t1)
    w2 = whnf(env, t2)
    if alpha_eq(w1, w2):
        return True
    if isinstance(w1, (Lam, Pi)) and type(w1) is type(w2):
        if w1.mode != w2.mode and isinstance(w1, Pi):
            return False
        if not def_eq(env, w1.ty, w2.ty):
            return False
        fv = fresh_fvar()
        return def_eq(env, instantiate(w1.body, fv), instantiate(w2.body, fv))
    if isinstance(w1, App) and isinstance(w2, App):
        h1, a1 = app_spine(w1)
        h2, a2 = app_spine(w2)
        if alpha_eq(h1, h2) and len(a1) == len(a2):
            if all(def_eq(env, x, y) for x, y in zip(a1, a2)):
                return True
        return False
    return False


def ensure_sort(env: Environment, t: Term, what: str = "type") -> Sort:
    w = whnf(env, t)
    if isinstance(w, Sort):
        return w
    raise NotASort(f"expected a sort for {what}, got a non-sort term")


def infer_type(env: Environment, ctx: LocalContext, t: Term) -> Term:
    """Infer the type of a kernel term. Terms must be MVar-free."""
    return _infer(env, ctx, t)


def _infer(env: Environment, ctx: LocalContext, t: Term) -> Term:
    if isinstance(t, Sort):
        return SORT_TYPE  # Prop : Type, and Type : Type at desk scale
    if isinstance(t, Var):
        raise UnboundVariable(f"loose de Bruijn index {t.idx}")
    if isinstance(t, FVar):
        e = ctx.lookup_id(t.id)
        if e is None:
            raise UnboundVariable(f"unknown free variable #{t.id}")
        return e.type
    if isinstance(t, Const):
        d = env.find(t.name)
        if d is None:
            raise UnknownConstant(f"unknown constant '{t.name}'")
        return d.type
    if isinstance(t, MVar):
        raise KernelAssertion("metavariable reached the kernel")
    if isinstance(t, App):
        fn_ty = whnf(env, _infer(env, ctx, t.fn))
        if not isinstance(fn_ty, Pi):
            raise AppTypeMismatch("application head is not a function")
        arg_ty = _infer(env, ctx, t.arg)
        if not def_eq(env, arg_ty, fn_ty.ty):
            raise AppTypeMismatch("function/argument types disagree")
        return instantiate(fn_ty.body, t.arg)
    if isinstance(t, Lam):
        ensure_sort(env, _infer(env, ctx, t.ty), "binder type")
        fv = fresh_fvar()
        ctx2 = ctx.extend(CtxEntry(fv.id, t.name, t.ty, mode=t.mode))
        body_ty = _infer(env, ctx2, instantiate(t.body, fv))
        return Pi(t.name, t.ty, abstract_body(body_ty, fv), t.mode)
    if isinstance(t, Pi):
        ensure_sort(env, _infer(env, ctx, t.ty), "Pi binder type")
        fv = fresh_fvar()
        ctx2 = ctx.extend(CtxEntry(fv.id, t.name, t.ty, mode=t.mode))
        body_sort = ensure_sort(env, _infer(env, ctx2, instantiate(t.body, fv)), "Pi body")
        # impredicative Prop, otherwise Type
        return SORT_PROP if body_sort.level == PROP else SORT_TYPE
    raise KernelAssertion(f"unhandled term {t!r}")


def abstract_body(t: Term, fv: FVar) -> Term:
    from .terms import abstract_fvar
    return abstract_fvar(t, fv.id)


def is_prop(env: Environment, ctx: LocalContext, t: Term) -> bool:
    try:
        return whnf(env, infer_type(env, ctx, t)) == SORT_PROP
    except Exception:
        return False


def uses_sorry(t: Term) -> bool:
    from .terms import subterms
    return any(isinstance(s, Const) and s.name == SORRY_AX for s in subterms(t))


def check_decl(env: Environment, d: Declaration) -> tuple[Environment, list[str]]:
    """Check a declaration and extend the environment.

    Returns (new_env, warnings).  Examples are checked but not stored.
    """
    warnings: list[str] = []
    if has_mvar(d.type) or (d.value is not None and has_mvar(d.value)):
        raise KernelAssertion(f"declaration '{d.name}' contains metavariables")
    from .env import EMPTY_CTX
    ensure_sort(env, infer_type(env, EMPTY_CTX, d.type), f"type of '{d.name}'")
    if d.kind == AXIOM:
        if d.value is not None:
            raise KernelAssertion(f"axiom '{d.name}' must not have a value")
    else:
        if d.value is None:
            raise KernelAssertion(f"'{d.name}' needs a value")
        val_ty = infer_type(env, EMPTY_CTX, d.value)
        if not def_eq(env, val_ty, d.type):
            raise TypeMismatch(f"value of '{d.name}' does not have its declared type")
    sorry_flag = d.value is not None and uses_sorry(d.value)
    if sorry_flag:
        warnings.append(f"declaration '{d.name}' uses sorry")
        d = replace(d, uses_sorry=True)
    if d.kind == EXAMPLE:
        return env, warnings
    return env.add(d), warnings
