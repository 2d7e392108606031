"""Certified equality/iff rewriting: `rw`, the simp engine, and `simp_all`.

Every rewrite produces a proof term built from the congruence constants
(congrArg, imp_congr_eq, Eq.trans, ...) and is ultimately re-checked by the
kernel; nothing here is trusted.

Rewrite rules are equations `lhs = rhs` over pattern variables.  Iff lemmas
are converted with propext, a hypothesis `h : p` contributes `p = True`
(eq_true), and `h : ¬p` contributes `p = False` (eq_false).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import sast as S
from .elab import Elaborator, MetaContext, resolve_instance
from .env import CtxEntry, Environment, LocalContext
from .errors import (MicroProofError, RwMotiveIllTyped, RwNoMatch,
                     SimpNoProgress, SimpStepBudgetExceeded, Span)
from .kernel import infer_type, is_prop, whnf
from .printer import ctx_name_map, pp_term
from .terms import (App, Const, EXPLICIT, FVar, INSTANCE, Lam, MVar, PROP, Pi,
                    SORT_PROP, Sort, Term, Var, alpha_eq, app_spine,
                    fresh_mvar_id, has_loose_var, instantiate, mk_app,
                    subterms, term_size)

MAX_STEPS = 10000
MAX_DEPTH = 64
PREMISE_DEPTH = 8

_TRUE = Const("True")
_FALSE = Const("False")


# --- rewrite rules ----------------------------------------------------------

@dataclass
class SimpLemma:
    name: str
    proof: Term                      # head proof term, awaiting telescope args
    tele: list[tuple[int, Term, str]]  # (placeholder mvar id, type, mode)
    kind: str                        # eq | iff | propTruth | propFalsity
    lhs: Term
    rhs: Term
    eq_ty: Term                      # type both sides live in (Prop for props)
    permutative: bool = False
    reversed: bool = False           # lhs/rhs swapped; proof needs Eq.symm

    def reverse(self) -> "SimpLemma":
        if self.kind not in ("eq", "iff"):
            raise ValueError(f"cannot reverse a {self.kind} rule")
        return SimpLemma(self.name, self.proof, self.tele, self.kind,
                         self.rhs, self.lhs, self.eq_ty, self.permutative,
                         not self.reversed)


def _subst_apply(t: Term, subst: dict[int, Term]) -> Term:
    if isinstance(t, MVar):
        return subst.get(t.id, t)
    if isinstance(t, App):
        return App(_subst_apply(t.fn, subst), _subst_apply(t.arg, subst))
    if isinstance(t, Lam):
        return Lam(t.name, _subst_apply(t.ty, subst),
                   _subst_apply(t.body, subst), t.mode)
    if isinstance(t, Pi):
        return Pi(t.name, _subst_apply(t.ty, subst),
                  _subst_apply(t.body, subst), t.mode)
    return t


def _canonical(t: Term, pvars: list[int]) -> Term:
    """Rename pattern variables by first-occurrence order (for the
    permutative-lemma check)."""
    order: dict[int, int] = {}

    def go(t: Term) -> Term:
        if isinstance(t, MVar) and t.id in pvars:
            if t.id not in order:
                order[t.id] = len(order)
            return MVar(order[t.id])
        if isinstance(t, App):
            return App(go(t.fn), go(t.arg))
        if isinstance(t, Lam):
            return Lam(t.name, go(t.ty), go(t.body), t.mode)
        if isinstance(t, Pi):
            return Pi(t.name, go(t.ty), go(t.body), t.mode)
        return t

    return go(t)


def _order_key(t: Term) -> tuple:
    return (term_size(t), repr(t))


def compile_rule(env: Environment, name: str, proof: Term,
                 ty: Term) -> tuple[SimpLemma | None, str | None]:
    """Build a rewrite rule from a proof and its type; returns
    (rule, warning)."""
    tele: list[tuple[int, Term, str]] = []
    cur = ty
    while isinstance(cur, Pi):
        mid = fresh_mvar_id()
        tele.append((mid, _subst_apply(cur.ty, {}), cur.mode))
        cur = instantiate(cur.body, MVar(mid))
    subst = {mid: MVar(mid) for mid, _, _ in tele}
    head, args = app_spine(cur)
    kind = None
    if isinstance(head, Const) and head.name == "Eq" and len(args) == 3:
        kind, eq_ty, lhs, rhs = "eq", args[0], args[1], args[2]
    elif isinstance(head, Const) and head.name == "Iff" and len(args) == 2:
        kind, eq_ty, lhs, rhs = "iff", SORT_PROP, args[0], args[1]
    else:
        w = whnf(env, cur)
        if (isinstance(w, Pi) and not has_loose_var(w.body)
                and alpha_eq(whnf(env, instantiate(w.body, FVar(-1))), _FALSE)):
            kind, eq_ty, lhs, rhs = "propFalsity", SORT_PROP, w.ty, _FALSE
        else:
            kind, eq_ty, lhs, rhs = "propTruth", SORT_PROP, cur, _TRUE
    if isinstance(lhs, MVar):
        return None, f"simp lemma '{name}' rejected: left-hand side is a bare variable"
    pvar_ids = [mid for mid, _, _ in tele]
    lhs_vars = {s.id for s in subterms(lhs) if isinstance(s, MVar)}
    rhs_vars = {s.id for s in subterms(rhs) if isinstance(s, MVar)}
    dischargeable = set()
    for mid, pty, mode in tele:
        if mid in lhs_vars:
            continue
        if mode == INSTANCE:
            dischargeable.add(mid)
        else:
            s = pty
            # Prop premises can be discharged at match time; their own
            # variables must come from the lhs
            dischargeable.add(mid)
    if not rhs_vars <= (lhs_vars | dischargeable):
        return None, (f"simp lemma '{name}' rejected: right-hand side "
                      "variable not bound by the left-hand side")
    permutative = (kind in ("eq", "iff")
                   and alpha_eq(_canonical(lhs, pvar_ids),
                                _canonical(rhs, pvar_ids)))
    return SimpLemma(name, proof, tele, kind, lhs, rhs, eq_ty,
                     permutative), None


def build_simp_set(env: Environment) -> tuple[list[SimpLemma], list[str]]:
    rules: list[SimpLemma] = []
    warnings: list[str] = []
    seen: set[str] = set()
    for name in env.simp_set:
        d = env.find(name)
        if d is None or not env.visible(d):
            continue
        if name in seen:
            warnings.append(f"duplicate simp lemma '{name}' ignored")
            continue
        seen.add(name)
        rule, warning = compile_rule(env, name, Const(name), d.type)
        if warning:
            warnings.append(warning)
        if rule is not None:
            if rule.kind not in ("eq", "iff"):
                warnings.append(
                    f"simp attribute on '{name}' ignored: not an equality "
                    "or iff")
                continue
            rules.append(rule)
    return rules, warnings


# --- first-order matching ---------------------------------------------------

def fo_match(env: Environment, pat: Term, t: Term, subst: dict[int, Term],
             pvars: set[int], depth: int = 0) -> bool:
    if isinstance(pat, MVar) and pat.id in pvars:
        if has_loose_var(t, below=depth):
            return False  # would escape a binder crossed during matching
        if pat.id in subst:
            return alpha_eq(subst[pat.id], t)
        subst[pat.id] = t
        return True
    if alpha_eq(_subst_apply(pat, subst), t):
        return True
    for _ in range(4):
        if isinstance(pat, App) and isinstance(t, App):
            return (fo_match(env, pat.fn, t.fn, subst, pvars, depth)
                    and fo_match(env, pat.arg, t.arg, subst, pvars, depth))
        if isinstance(pat, (Pi, Lam)) and type(pat) is type(t):
            if isinstance(pat, Pi) and pat.mode != t.mode:
                return False
            return (fo_match(env, pat.ty, t.ty, subst, pvars, depth)
                    and fo_match(env, pat.body, t.body, subst, pvars,
                                 depth + 1))
        if isinstance(pat, Const) and isinstance(t, Const):
            return pat.name == t.name
        # head mismatch: peel reducible definitions and retry once per side
        t2 = whnf(env, t, reducible_only=True)
        p2 = whnf(env, pat, reducible_only=True)
        if alpha_eq(t2, t) and alpha_eq(p2, pat):
            return False
        pat, t = p2, t2
        if isinstance(pat, MVar) and pat.id in pvars:
            return fo_match(env, pat, t, subst, pvars, depth)
    return False


# --- proof combinators ------------------------------------------------------

def eq_refl(ty: Term, a: Term) -> Term:
    return mk_app(Const("Eq.refl"), ty, a)


def eq_trans(ty: Term, a: Term, b: Term, c: Term, p1: Term, p2: Term) -> Term:
    return mk_app(Const("Eq.trans"), ty, a, b, c, p1, p2)


def eq_symm(ty: Term, a: Term, b: Term, p: Term) -> Term:
    return mk_app(Const("Eq.symm"), ty, a, b, p)


def eq_mpr(p: Term, q: Term, h: Term, hq: Term) -> Term:
    return mk_app(Const("Eq.mpr"), p, q, h, hq)


def iff_refl_term(p: Term) -> Term:
    ident = Lam("h", p, Var(0))
    return mk_app(Const("Iff.intro"), p, p, ident, ident)


# --- the simp engine --------------------------------------------------------

class SimpEngine:
    def __init__(self, env: Environment, ctx: LocalContext,
                 rules: list[SimpLemma], trace=None,
                 max_steps: int = MAX_STEPS, max_depth: int = MAX_DEPTH):
        self.env = env
        self.ctx = ctx
        self.rules = rules
        self.trace = trace
        self.steps_left = max_steps
        self.max_depth = max_depth
        self._names = ctx_name_map(ctx)

    def _render(self, t: Term) -> str:
        return pp_term(self.env, t, dict(self._names))

    def _spend(self, span: Span | None = None) -> None:
        self.steps_left -= 1
        if self.steps_left < 0:
            raise SimpStepBudgetExceeded(
                f"simp exceeded its step budget of {MAX_STEPS}", span)

    def infer(self, t: Term) -> Term:
        return infer_type(self.env, self.ctx, t)

    # proof : t = t' (or None when t' is t)
    def simplify(self, t: Term, depth: int = 0,
                 premise_depth: int = 0) -> tuple[Term, Term | None]:
        if depth > self.max_depth:
            return t, None
        ty = None
        cur, total = t, None

        def compose(new: Term, pf: Term) -> None:
            nonlocal cur, total, ty
            if ty is None:
                ty = self.infer(t)
            total = pf if total is None else eq_trans(ty, t, cur, new,
                                                      total, pf)
            cur = new

        progress = True
        while progress:
            progress = False
            res = self._simp_children(cur, depth, premise_depth)
            if res is not None:
                compose(*res)
            res = self._apply_rules(cur, depth, premise_depth)
            if res is not None:
                compose(*res)
                progress = True  # revisit children of the rewritten term
        return cur, total

    def _simp_children(self, t: Term, depth: int,
                       premise_depth: int) -> tuple[Term, Term] | None:
        """One innermost pass over the children of t; no rules at the root."""
        if isinstance(t, App):
            return self._simp_app_children(t, depth, premise_depth)
        if (isinstance(t, Pi) and t.mode == EXPLICIT
                and not has_loose_var(t.body)):
            return self._simp_imp_children(t, depth, premise_depth)
        return None

    def _simp_app_children(self, t: App, depth: int,
                           premise_depth: int) -> tuple[Term, Term] | None:
        head, args = app_spine(t)
        cur_args = list(args)
        cur = t
        ty = None
        total = None
        for j in range(len(args)):
            new_arg, pf = self.simplify(cur_args[j], depth + 1, premise_depth)
            if pf is None:
                continue
            candidate_args = cur_args[:j] + [new_arg] + cur_args[j + 1:]
            step = self._congr_child(head, cur_args, j, new_arg, pf)
            if step is None:
                continue  # position is type-rigid; keep the old child
            new_node = mk_app(head, *candidate_args)
            if ty is None:
                ty = self.infer(t)
            total = (step if total is None
                     else eq_trans(ty, t, cur, new_node, total, step))
            cur = new_node
            cur_args = candidate_args
        if total is None:
            return None
        return cur, total

    def _congr_child(self, head: Term, args: list[Term], j: int,
                     new_arg: Term, pf: Term) -> Term | None:
        """congrArg proof for rewriting argument j of an application spine."""
        hole_body = mk_app(head, *args[:j], Var(0), *args[j + 1:])
        try:
            arg_ty = self.infer(args[j])
            lam = Lam("x", arg_ty, hole_body)
            lam_ty = self.infer(lam)
        except MicroProofError:
            return None
        if not isinstance(lam_ty, Pi) or has_loose_var(lam_ty.body):
            return None
        node_ty = instantiate(lam_ty.body, args[j])
        return mk_app(Const("congrArg"), arg_ty, node_ty, args[j], new_arg,
                      lam, pf)

    def _simp_imp_children(self, t: Pi, depth: int,
                           premise_depth: int) -> tuple[Term, Term] | None:
        lhs = t.ty
        rhs = instantiate(t.body, FVar(-1))  # non-dependent: hole unused
        if not (is_prop(self.env, self.ctx, lhs)
                and is_prop(self.env, self.ctx, rhs)):
            return None
        lhs2, p1 = self.simplify(lhs, depth + 1, premise_depth)
        rhs2, p2 = self.simplify(rhs, depth + 1, premise_depth)
        if p1 is None and p2 is None:
            return None
        p1 = p1 if p1 is not None else eq_refl(SORT_PROP, lhs)
        p2 = p2 if p2 is not None else eq_refl(SORT_PROP, rhs)
        from .terms import shift
        new_node = Pi(t.name, lhs2, shift(rhs2, 1), t.mode)
        proof = mk_app(Const("imp_congr_eq"), lhs, lhs2, rhs, rhs2, p1, p2)
        return new_node, proof

    def _apply_rules(self, t: Term, depth: int,
                     premise_depth: int) -> tuple[Term, Term] | None:
        for rule in self.rules:
            res = self.try_rule(rule, t, premise_depth)
            if res is not None:
                return res
        return None

    def try_rule(self, rule: SimpLemma, t: Term,
                 premise_depth: int = 0) -> tuple[Term, Term] | None:
        pvars = {mid for mid, _, _ in rule.tele}
        subst: dict[int, Term] = {}
        if not fo_match(self.env, rule.lhs, t, subst, pvars):
            return None
        if not self._discharge_premises(rule, subst, premise_depth):
            return None
        rhs = _subst_apply(rule.rhs, subst)
        if rule.permutative and _order_key(rhs) >= _order_key(t):
            return None
        proof = self._instantiated_proof(rule, subst)
        if proof is None:
            return None
        self._spend()
        if self.trace is not None:
            self.trace(rule.name, self._render(t), self._render(rhs))
        return rhs, proof

    def _discharge_premises(self, rule: SimpLemma, subst: dict[int, Term],
                            premise_depth: int) -> bool:
        for mid, pty, mode in rule.tele:
            if mid in subst:
                continue
            ty = _subst_apply(pty, subst)
            if any(isinstance(s, MVar) for s in subterms(ty)):
                return False
            if mode == INSTANCE:
                sol = resolve_instance(self.env, MetaContext(), self.ctx, ty)
                if sol is None:
                    return False
                subst[mid] = sol
                continue
            if is_prop(self.env, self.ctx, ty):
                pf = self._prove_premise(ty, premise_depth)
                if pf is None:
                    return False
                subst[mid] = pf
                continue
            return False  # unbound data argument
        return True

    def _prove_premise(self, p: Term, premise_depth: int) -> Term | None:
        if premise_depth >= PREMISE_DEPTH:
            return None
        if alpha_eq(p, _TRUE):
            return Const("True.intro")
        simplified, pf = self.simplify(p, 0, premise_depth + 1)
        if pf is not None and alpha_eq(simplified, _TRUE):
            return mk_app(Const("of_eq_true"), p, pf)
        return None

    def _instantiated_proof(self, rule: SimpLemma,
                            subst: dict[int, Term]) -> Term | None:
        args = []
        for mid, _, _ in rule.tele:
            if mid not in subst:
                return None
            args.append(subst[mid])
        raw = mk_app(rule.proof, *args)
        lhs = _subst_apply(rule.lhs, subst)
        rhs = _subst_apply(rule.rhs, subst)
        if rule.kind == "eq":
            pf = raw
        elif rule.kind == "iff":
            src, dst = (rhs, lhs) if rule.reversed else (lhs, rhs)
            pf = mk_app(Const("propext"), src, dst, raw)
        elif rule.kind == "propTruth":
            pf = mk_app(Const("eq_true"), lhs, raw)
        elif rule.kind == "propFalsity":
            pf = mk_app(Const("eq_false"), lhs, raw)
        else:
            return None
        if rule.reversed:
            ety = _subst_apply(rule.eq_ty, subst)
            pf = eq_symm(ety, rhs, lhs, pf)
        return pf


# --- goal plumbing ----------------------------------------------------------

def _closing_proof(env: Environment, ctx: LocalContext, t: Term) -> Term | None:
    """A direct proof of t when it is True, `a = a`, or `p ↔ p`."""
    head, args = app_spine(t)
    if isinstance(head, Const):
        if head.name == "True":
            return Const("True.intro")
        if head.name == "Eq" and len(args) == 3 and alpha_eq(args[1], args[2]):
            return eq_refl(args[0], args[1])
        if head.name == "Iff" and len(args) == 2 and alpha_eq(args[0], args[1]):
            return iff_refl_term(args[0])
    return None


def finish_goal(engine, g, new_target: Term, eq_pf: Term | None,
                span: Span, demand_progress: bool, who: str):
    """Replace goal g's target with new_target given eq_pf : old = new.
    Returns the replacement goal list contribution ([] or [new_goal])."""
    from .tactics import Goal

    env = engine.env
    kctx = engine.display_ctx(g.ctx)
    old_target = engine.mctx.instantiate_mvars(g.target)
    closing = _closing_proof(env, kctx, new_target)
    if closing is not None:
        proof = closing if eq_pf is None else eq_mpr(old_target, new_target,
                                                     eq_pf, closing)
        engine.mctx.assign(g.mvar_id, proof)
        return []
    if eq_pf is None:
        if demand_progress:
            raise SimpNoProgress(f"{who} made no progress", span)
        return [g]
    m = engine.mctx.mk_mvar(new_target, g.ctx, name="goal", kind="prop")
    engine.mctx.assign(g.mvar_id,
                       eq_mpr(old_target, new_target, eq_pf, m))
    return [Goal(m.id, g.ctx, new_target)]


def _elab_extra(engine, ctx: LocalContext, stx) -> tuple[str, Term, Term]:
    """Elaborate a user-supplied lemma reference; returns (name, proof, type)."""
    el = Elaborator(engine.env, engine.mctx)
    proof, ty = el._elab_infer(ctx, stx, None)
    el.solve_pending(strict=True)
    proof = engine.mctx.instantiate_mvars(proof)
    ty = engine.mctx.instantiate_mvars(ty)
    name = stx.name if isinstance(stx, S.SIdent) else "<term>"
    return name, proof, ty


def _compile_extras(engine, ctx: LocalContext, extras,
                    span: Span) -> list[SimpLemma]:
    rules: list[SimpLemma] = []
    for stx in extras:
        name, proof, ty = _elab_extra(engine, ctx, stx)
        rule, warning = compile_rule(engine.env, name, proof, ty)
        if rule is None:
            raise MicroProofError(
                warning or f"cannot use '{name}' as a rewrite rule", span)
        rules.append(rule)
    return rules


def _hyp_rules(engine, ctx: LocalContext,
               skip_fvar: int | None = None) -> list[SimpLemma]:
    """Rewrite rules contributed by the propositional hypotheses."""
    env = engine.env
    rules: list[SimpLemma] = []
    kctx = engine.display_ctx(ctx)
    for e in kctx.entries:
        if e.fvar_id == skip_fvar or e.mode == INSTANCE:
            continue
        if not is_prop(env, kctx, e.type):
            continue
        rule, _ = compile_rule(env, e.name, FVar(e.fvar_id), e.type)
        if rule is not None:
            rules.append(rule)
    return rules


# --- tactics ----------------------------------------------------------------

def _abstract_occurrences(t: Term, pat: Term, depth: int = 0) -> Term:
    if not has_loose_var(t, below=10**9) and alpha_eq(t, pat):
        return Var(depth)
    if isinstance(t, App):
        return App(_abstract_occurrences(t.fn, pat, depth),
                   _abstract_occurrences(t.arg, pat, depth))
    if isinstance(t, Lam):
        return Lam(t.name, _abstract_occurrences(t.ty, pat, depth),
                   _abstract_occurrences(t.body, pat, depth + 1), t.mode)
    if isinstance(t, Pi):
        return Pi(t.name, _abstract_occurrences(t.ty, pat, depth),
                  _abstract_occurrences(t.body, pat, depth + 1), t.mode)
    return t


def _find_first_match(env: Environment, simp: SimpEngine, rule: SimpLemma,
                      t: Term) -> tuple[dict[int, Term], Term] | None:
    """Leftmost-outermost search for a subterm matching the rule, with
    premises dischargeable; returns (subst, matched subterm)."""
    pvars = {mid for mid, _, _ in rule.tele}

    def visit(sub: Term):
        if not has_loose_var(sub, below=10**9):
            subst: dict[int, Term] = {}
            if (fo_match(env, rule.lhs, sub, subst, pvars)
                    and simp._discharge_premises(rule, subst, 0)):
                return subst, sub
        if isinstance(sub, App):
            return visit(sub.fn) or visit(sub.arg)
        if isinstance(sub, (Pi, Lam)):
            return visit(sub.ty) or visit(sub.body)
        return None

    return visit(t)


def tac_rw(engine, goals, tac: S.TRw):
    from .tactics import Goal  # noqa: F401  (finish_goal returns these)

    g = engine.first_goal(goals, tac)
    env = engine.env
    kctx = engine.display_ctx(g.ctx)
    target = engine.mctx.instantiate_mvars(g.target)
    simp = SimpEngine(env, kctx, [])
    chain_pf: Term | None = None
    cur = target
    for stx, reverse in tac.lemmas:
        name, proof, ty = _elab_extra(engine, g.ctx, stx)
        rule, warning = compile_rule(env, name, proof, ty)
        if rule is None or rule.kind not in ("eq", "iff"):
            raise MicroProofError(
                warning or f"'{name}' is not an equation or iff", tac.span)
        if reverse:
            rule = rule.reverse()
        found = _find_first_match(env, simp, rule, cur)
        if found is None:
            raise RwNoMatch(f"rw: no subterm matches '{name}'", tac.span)
        subst, matched = found
        lhs_i = _subst_apply(rule.lhs, subst)
        rhs_i = _subst_apply(rule.rhs, subst)
        eq_ty_i = _subst_apply(rule.eq_ty, subst)
        step_pf = simp._instantiated_proof(rule, subst)
        if step_pf is None:
            raise RwNoMatch(f"rw: could not instantiate '{name}'", tac.span)
        # rewrite every occurrence of this instantiation
        motive_body = _abstract_occurrences(cur, lhs_i)
        motive = Lam("x", eq_ty_i, motive_body)
        try:
            motive_ty = infer_type(env, kctx, motive)
        except MicroProofError as e:
            raise RwMotiveIllTyped(f"rw: motive is ill-typed: {e.message}",
                                   tac.span)
        if not isinstance(motive_ty, Pi) or has_loose_var(motive_ty.body):
            raise RwMotiveIllTyped("rw: motive is ill-typed", tac.span)
        new_target = instantiate(motive_body, rhs_i)
        node_ty = instantiate(motive_ty.body, lhs_i)
        cong = mk_app(Const("congrArg"), eq_ty_i, node_ty, lhs_i, rhs_i,
                      motive, step_pf)
        chain_pf = (cong if chain_pf is None
                    else eq_trans(SORT_PROP, target, cur, new_target,
                                  chain_pf, cong))
        cur = new_target
    return finish_goal(engine, g, cur, chain_pf, tac.span,
                       demand_progress=True, who="rw") + goals[1:]


def tac_simp(engine, goals, tac: S.TSimp):
    g = engine.first_goal(goals, tac)
    env = engine.env
    kctx = engine.display_ctx(g.ctx)
    rules, _ = build_simp_set(env)
    rules = rules + _compile_extras(engine, g.ctx, tac.extras, tac.span)
    simp = SimpEngine(env, kctx, rules, trace=engine.trace_simp)
    target = engine.mctx.instantiate_mvars(g.target)
    new_target, pf = simp.simplify(target)
    return finish_goal(engine, g, new_target, pf, tac.span,
                       demand_progress=True, who="simp") + goals[1:]


def tac_simp_all(engine, goals, tac: S.TSimp):
    from .elab import Closure
    from .tactics import Goal

    g = engine.first_goal(goals, tac)
    env = engine.env
    base_rules, _ = build_simp_set(env)
    base_rules = base_rules + _compile_extras(engine, g.ctx, tac.extras,
                                              tac.span)

    budget = MAX_STEPS
    changed = True
    sweeps = 0
    while changed and sweeps < 100:
        changed = False
        sweeps += 1
        kctx = engine.display_ctx(g.ctx)
        for e in list(kctx.entries):
            if e.mode == INSTANCE or not is_prop(env, kctx, e.type):
                continue
            rules = base_rules + _hyp_rules(engine, g.ctx,
                                            skip_fvar=e.fvar_id)
            simp = SimpEngine(env, kctx, rules, trace=engine.trace_simp,
                              max_steps=budget)
            new_ty, pf = simp.simplify(e.type)
            budget = simp.steps_left
            if pf is None:
                continue
            changed = True
            new_proof = mk_app(Const("Eq.mp"), e.type, new_ty, pf,
                               FVar(e.fvar_id))
            target = engine.mctx.instantiate_mvars(g.target)
            if alpha_eq(new_ty, _TRUE):
                # hypothesis became trivial: drop it
                ctx2 = g.ctx.remove(e.fvar_id)
                m = engine.mctx.mk_mvar(target, ctx2, name="goal",
                                        kind="prop")
                engine.mctx.assign(g.mvar_id, m)
                g = Goal(m.id, ctx2, target)
            else:
                from .terms import fresh_fvar
                fv = fresh_fvar()
                new_entry = CtxEntry(fv.id, e.name, new_ty)
                ctx2 = g.ctx.replace_entry(e.fvar_id, new_entry)
                m = engine.mctx.mk_mvar(target, ctx2, name="goal",
                                        kind="prop")
                engine.mctx.assign(
                    g.mvar_id,
                    Closure("have", fv.id, e.name, new_ty, EXPLICIT,
                            m.id, arg=new_proof))
                g = Goal(m.id, ctx2, target)
            kctx = engine.display_ctx(g.ctx)
        # now the target, using every hypothesis
        rules = base_rules + _hyp_rules(engine, g.ctx)
        kctx = engine.display_ctx(g.ctx)
        simp = SimpEngine(env, kctx, rules, trace=engine.trace_simp,
                          max_steps=budget)
        target = engine.mctx.instantiate_mvars(g.target)
        new_target, pf = simp.simplify(target)
        budget = simp.steps_left
        if pf is not None:
            changed = True
            out = finish_goal(engine, g, new_target, pf, tac.span,
                              demand_progress=False, who="simp_all")
            if not out:
                return goals[1:]
            g = out[0]
        else:
            closing = _closing_proof(env, kctx, target)
            if closing is not None:
                engine.mctx.assign(g.mvar_id, closing)
                return goals[1:]
    return [g] + goals[1:]
