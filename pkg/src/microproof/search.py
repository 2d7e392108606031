"""Library search: the `exact?` tactic and name search.

`exact?` indexes the environment by the head constant of each declaration's
conclusion (synthesizing `.mp`/`.mpr` projections for iff-valued lemmas),
unifies candidate conclusions with the goal, and discharges remaining
explicit premises from local hypotheses — either directly or applied to one
context variable (`h i`).  Successful closures are reported as `exact …`
suggestions and the best one is applied when invoked as a tactic.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from .elab import MetaContext, resolve_instance, unify
from .env import Environment, LocalContext
from .errors import SearchNoResult, SearchTimeout, Span
from .kernel import def_eq, infer_type
from .terms import (App, Const, EXPLICIT, FVar, INSTANCE, MVar, Pi, Term,
                    alpha_eq, app_spine, has_mvar, instantiate, mk_app)

DEFAULT_TIME_BUDGET = 5.0


# --- the head index ---------------------------------------------------------

def _conclusion(ty: Term) -> Term:
    while isinstance(ty, Pi):
        ty = instantiate(ty.body, FVar(-1))
    return ty


def _head_name(t: Term) -> str | None:
    head, _ = app_spine(t)
    return head.name if isinstance(head, Const) else None


@dataclass
class HeadIndex:
    """head constant name -> candidate declaration names, environment order;
    iff-valued lemmas contribute synthesized `.mp`/`.mpr` candidates."""
    by_head: dict[str, list[str]]

    @staticmethod
    def build(env: Environment) -> "HeadIndex":
        by_head: dict[str, list[str]] = {}

        def add(head: str | None, name: str) -> None:
            if head is not None:
                by_head.setdefault(head, []).append(name)

        for d in env.decls:
            if not env.visible(d):
                continue
            concl = _conclusion(d.type)
            head, args = app_spine(concl)
            if isinstance(head, Const) and head.name == "Iff" \
                    and len(args) == 2:
                add("Iff", d.name)
                add(_head_name(args[1]), d.name + ".mp")
                add(_head_name(args[0]), d.name + ".mpr")
            else:
                add(_head_name(concl), d.name)
        return HeadIndex(by_head)


# --- hypothesis argument forms ----------------------------------------------

@dataclass
class _HypForm:
    text: str        # surface rendering, e.g. "h" or "h i"
    term: Term
    type: Term


def _hyp_forms(env: Environment, ctx: LocalContext) -> list[_HypForm]:
    """Local hypotheses as-is, plus each ∀-hypothesis applied to a single
    context variable (depth-1 discharge)."""
    forms: list[_HypForm] = []
    for e in ctx.entries:
        if e.mode == INSTANCE:
            continue
        forms.append(_HypForm(e.name, FVar(e.fvar_id), e.type))
    for e in ctx.entries:
        if e.mode == INSTANCE or not isinstance(e.type, Pi):
            continue
        for v in ctx.entries:
            if v.mode == INSTANCE:
                continue
            if not def_eq(env, v.type, e.type.ty):
                continue
            forms.append(_HypForm(
                f"{e.name} {v.name}",
                App(FVar(e.fvar_id), FVar(v.fvar_id)),
                instantiate(e.type.body, FVar(v.fvar_id))))
    return forms


# --- candidate closure ------------------------------------------------------

def _try_candidate(env: Environment, ctx: LocalContext, target: Term,
                   name: str, base: str, base_ty: Term, proj: str | None,
                   forms: list[_HypForm]) -> tuple[str, Term, int] | None:
    """Attempt to close `target` with the named candidate (`proj` selects a
    synthesized Iff projection).  Returns (suggestion text, proof term,
    premise count) on success."""
    mctx = MetaContext()
    fn: Term = Const(base)
    ty = base_ty
    slots: list[tuple[MVar, str]] = []   # explicit premise slots
    inst_slots: list[MVar] = []
    while isinstance(ty, Pi):
        mv = mctx.mk_mvar(mctx.instantiate_mvars(ty.ty), ctx,
                          name=ty.name or "a",
                          kind="instance" if ty.mode == INSTANCE else "data")
        if ty.mode == EXPLICIT:
            slots.append((mv, ty.name))
        elif ty.mode == INSTANCE:
            inst_slots.append(mv)
        fn = App(fn, mv)
        ty = instantiate(ty.body, mv)
    if proj is not None:
        head, args = app_spine(mctx.instantiate_mvars(ty))
        if not (isinstance(head, Const) and head.name == "Iff"
                and len(args) == 2):
            return None
        p, q = args
        src, dst = (q, p) if proj == "mpr" else (p, q)
        fn = mk_app(Const("Iff.mpr" if proj == "mpr" else "Iff.mp"),
                    p, q, fn)
        mv = mctx.mk_mvar(src, ctx, name="h", kind="prop")
        slots.append((mv, "h"))
        fn = App(fn, mv)
        ty = dst
    if not unify(env, mctx, mctx.instantiate_mvars(ty), target):
        return None
    args: list[str] = []
    for mv, _ in slots:
        if not isinstance(mctx.instantiate_mvars(MVar(mv.id)), MVar):
            continue  # solved by conclusion unification; implicit in text
        want = mctx.instantiate_mvars(mctx.decl(mv.id).type)
        filled = False
        for form in forms:
            trial = mctx.copy()
            if unify(env, trial, want, form.type):
                mctx.decls = trial.decls
                mctx.assign(mv.id, form.term)
                args.append(form.text)
                filled = True
                break
        if not filled:
            return None
    for mv in inst_slots:
        if not isinstance(mctx.instantiate_mvars(MVar(mv.id)), MVar):
            continue
        goal = mctx.instantiate_mvars(mctx.decl(mv.id).type)
        if has_mvar(goal):
            return None
        sol = resolve_instance(env, mctx, ctx, goal)
        if sol is None:
            return None
        mctx.assign(mv.id, sol)
    proof = mctx.instantiate_mvars(fn)
    if has_mvar(proof):
        return None
    try:
        inferred = infer_type(env, ctx, proof)
    except Exception:
        return None
    if not def_eq(env, inferred, mctx.instantiate_mvars(target)):
        return None
    text = name
    for a in args:
        text += " " + (f"({a})" if " " in a else a)
    return f"exact {text}", proof, len(args)


def exact_search(env: Environment, ctx: LocalContext, target: Term,
                 time_budget: float = DEFAULT_TIME_BUDGET,
                 span: Span | None = None) -> list[tuple[str, Term]]:
    """Ranked `exact` suggestions closing `target`; (text, proof) pairs."""
    deadline = time.monotonic() + time_budget
    forms = _hyp_forms(env, ctx)
    results: list[tuple[int, int, str, Term]] = []

    # local hypotheses first (rank as zero-premise, before the environment)
    for order, form in enumerate(forms):
        if time.monotonic() > deadline:
            raise SearchTimeout("exact?: time budget exceeded", span)
        mctx = MetaContext()
        if unify(env, mctx, form.type, target):
            proof = form.term
            if def_eq(env, infer_type(env, ctx, proof), target):
                results.append((0, order - len(forms), f"exact {form.text}",
                                proof))

    index = HeadIndex.build(env)
    head = _head_name(target)
    decl_order = {d.name: i for i, d in enumerate(env.decls)}
    for name in index.by_head.get(head, []) if head else []:
        if time.monotonic() > deadline:
            raise SearchTimeout("exact?: time budget exceeded", span)
        proj = None
        base = name
        if name.endswith(".mpr"):
            base, proj = name[: -len(".mpr")], "mpr"
        elif name.endswith(".mp"):
            base, proj = name[: -len(".mp")], "mp"
        d = env.find(base)
        if d is None:
            continue
        got = _try_candidate(env, ctx, target, name, base, d.type, proj,
                             forms)
        if got is not None:
            text, proof, premises = got
            results.append((premises, decl_order.get(base, 0), text, proof))
    results.sort(key=lambda r: (r[0], r[1]))
    seen: set[str] = set()
    out: list[tuple[str, Term]] = []
    for _, _, text, proof in results:
        if text not in seen:
            seen.add(text)
            out.append((text, proof))
    return out


def name_search(env: Environment,
                query: str) -> list[tuple[str, str]]:
    """Case-insensitive all-words name search; each query word must be a
    prefix of one of the declaration name's camelCase/punctuation-split
    words.  Results come back in environment order with rendered types."""
    from .printer import pp_term

    words = [w.lower() for w in query.split() if w]
    out: list[tuple[str, str]] = []
    for d in env.decls:
        if not env.visible(d) or d.name.startswith("_"):
            continue
        parts = _split_name(d.name)
        if all(any(p.startswith(w) for p in parts) for w in words):
            out.append((d.name, pp_term(env, d.type)))
    return out


def _split_name(name: str) -> list[str]:
    parts: list[str] = []
    cur = ""
    for ch in name:
        if ch in "._'":
            if cur:
                parts.append(cur.lower())
            cur = ""
        elif ch.isupper() and cur and not cur[-1].isupper():
            parts.append(cur.lower())
            cur = ch
        else:
            cur += ch
    if cur:
        parts.append(cur.lower())
    return parts


# --- the tactic -------------------------------------------------------------

def tac_exact_search(engine, goals, tac):
    g = engine.first_goal(goals, tac)
    ctx = engine.display_ctx(g.ctx)
    target = engine.mctx.instantiate_mvars(g.target)
    suggestions = exact_search(engine.env, ctx, target, span=tac.span)
    if not suggestions:
        raise SearchNoResult("exact?: no applicable lemma found", tac.span)
    text, proof = suggestions[0]
    engine.close_goal(g, proof)
    return goals[1:]
