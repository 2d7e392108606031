"""The tactic interpreter: goal management, the core tactics, and proof
assembly.

A goal is an unassigned metavariable together with the local context it may
refer to.  Tactics act on the first goal (except `swap` and bullets), assign
metavariables in the shared MetaContext, and the final proof term is read
back from the root metavariable and re-checked by the kernel.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import sast as S
from .elab import (Closure, Elaborator, MetaContext, infer_meta,
                   infer_meta_sort, resolve_instance, unify, whnf_meta)
from .env import CtxEntry, Environment, LocalContext
from .errors import (ApplyUnifyFailure, BulletLeftGoalsOpen, CalcChainBroken,
                     ConstructorHeadUnknown, IntroOnNonPi, MicroProofError,
                     NoGoals, Span, UnsolvedGoals)
from .kernel import def_eq, infer_type
from .printer import pp_term, render_goal, render_goals
from .terms import (App, Const, EXPLICIT, FVar, INSTANCE, MVar, PROP, Pi,
                    Sort, Term, alpha_eq, app_spine, fresh_fvar, has_mvar,
                    instantiate, mk_app, shift)


@dataclass
class Goal:
    mvar_id: int
    ctx: LocalContext
    target: Term


class TacticEngine:
    """Executes tactic blocks against a shared metavariable context."""

    def __init__(self, env: Environment, mctx: MetaContext,
                 record=None, trace_simp=None, trace_module=None):
        self.env = env
        self.mctx = mctx
        self.record = record  # callback(span, goals) for step snapshots
        self.trace_simp = trace_simp
        self.trace_module = trace_module

    # -- rendering -----------------------------------------------------------

    def display_ctx(self, ctx: LocalContext) -> LocalContext:
        return LocalContext(tuple(
            CtxEntry(e.fvar_id, e.name, self.mctx.instantiate_mvars(e.type),
                     e.value, e.mode) for e in ctx.entries))

    def mvar_heads(self) -> dict[int, str]:
        out: dict[int, str] = {}
        for mid, d in self.mctx.decls.items():
            head, _ = app_spine(self.mctx.instantiate_mvars(d.type))
            if isinstance(head, Const):
                out[mid] = head.name
        return out

    def goal_pairs(self, goals: list[Goal]):
        return [(self.display_ctx(g.ctx),
                 self.mctx.instantiate_mvars(g.target)) for g in goals]

    def render(self, goals: list[Goal]) -> str:
        return render_goals(self.env, self.goal_pairs(goals),
                            mvar_names=self.mctx.mvar_names(),
                            mvar_heads=self.mvar_heads())

    def render_one(self, g: Goal) -> str:
        return render_goal(self.env, self.display_ctx(g.ctx),
                           self.mctx.instantiate_mvars(g.target),
                           mvar_names=self.mctx.mvar_names(),
                           mvar_heads=self.mvar_heads())

    def _snapshot(self, span: Span, goals: list[Goal]) -> None:
        if self.record is not None:
            self.record(span, goals)

    def prune(self, goals: list[Goal]) -> list[Goal]:
        return [g for g in goals if not self.mctx.is_assigned(g.mvar_id)]

    # -- block execution -----------------------------------------------------

    def run_block(self, goals: list[Goal], tactics) -> list[Goal]:
        for tac in tactics:
            goals = self.step(goals, tac)
        return goals

    def step(self, goals: list[Goal], tac: S.TacticAst) -> list[Goal]:
        goals = self.dispatch(goals, tac)
        goals = self.prune(goals)
        if not isinstance(tac, (S.TBullet,)) and not (
                isinstance(tac, S.THave) and tac.calc is not None) and not (
                isinstance(tac, S.TCalc)):
            self._snapshot(tac.span, goals)
        return goals

    def dispatch(self, goals: list[Goal], tac: S.TacticAst) -> list[Goal]:
        if isinstance(tac, S.TIntro):
            return self.tac_intro(goals, tac)
        if isinstance(tac, S.TExact):
            return self.tac_exact(goals, tac)
        if isinstance(tac, S.TApply):
            return self.tac_apply(goals, tac)
        if isinstance(tac, S.TConstructor):
            return self.tac_constructor(goals, tac)
        if isinstance(tac, S.TSwap):
            return self.tac_swap(goals, tac)
        if isinstance(tac, S.TSorry):
            return self.tac_sorry(goals, tac)
        if isinstance(tac, S.THave):
            return self.tac_have(goals, tac)
        if isinstance(tac, S.TCalc):
            return self.tac_calc(goals, tac)
        if isinstance(tac, S.TBullet):
            return self.tac_bullet(goals, tac)
        if isinstance(tac, S.TRw):
            from .rewriter import tac_rw
            return tac_rw(self, goals, tac)
        if isinstance(tac, S.TSimp):
            from .rewriter import tac_simp, tac_simp_all
            if tac.all_hyps:
                return tac_simp_all(self, goals, tac)
            return tac_simp(self, goals, tac)
        if isinstance(tac, S.TModule):
            from .lindec import tac_module
            return tac_module(self, goals, tac)
        if isinstance(tac, S.TExactSearch):
            from .search import tac_exact_search
            return tac_exact_search(self, goals, tac)
        raise MicroProofError(f"unknown tactic {tac.kind}", tac.span)

    # -- helpers -------------------------------------------------------------

    def first_goal(self, goals: list[Goal], tac: S.TacticAst) -> Goal:
        if not goals:
            raise NoGoals(f"no goals to act on with '{tac.kind}'", tac.span)
        return goals[0]

    def _elaborator(self) -> Elaborator:
        return Elaborator(self.env, self.mctx)

    def _is_prop(self, ctx: LocalContext, ty: Term) -> bool:
        s = infer_meta_sort(self.env, ctx, self.mctx, ty)
        return isinstance(s, Sort) and s.level == PROP

    def close_goal(self, g: Goal, proof: Term) -> None:
        self.mctx.assign(g.mvar_id, proof)

    # -- core tactics --------------------------------------------------------

    def tac_intro(self, goals: list[Goal], tac: S.TIntro) -> list[Goal]:
        g = self.first_goal(goals, tac)
        for name in tac.names:
            target = self.mctx.instantiate_mvars(g.target)
            if not isinstance(target, Pi):
                target = whnf_meta(self.env, self.mctx, target)
            if not isinstance(target, Pi):
                raise IntroOnNonPi(
                    f"cannot introduce '{name}': goal is not a ∀ or →",
                    tac.span)
            fv = fresh_fvar()
            entry = CtxEntry(fv.id, name, target.ty, mode=target.mode)
            ctx2 = g.ctx.extend(entry)
            new_target = instantiate(target.body, fv)
            body = self.mctx.mk_mvar(new_target, ctx2, name="goal",
                                     kind="prop")
            self.mctx.assign(
                g.mvar_id,
                Closure("lam", fv.id, name, target.ty, target.mode, body.id))
            g = Goal(body.id, ctx2, new_target)
        return [g] + goals[1:]

    def tac_exact(self, goals: list[Goal], tac: S.TExact) -> list[Goal]:
        g = self.first_goal(goals, tac)
        el = self._elaborator()
        proof = el.elaborate(g.ctx, tac.term,
                             expected=self.mctx.instantiate_mvars(g.target))
        el.solve_pending(strict=True)
        self.close_goal(g, proof)
        return goals

    def tac_apply(self, goals: list[Goal], tac: S.TApply) -> list[Goal]:
        g = self.first_goal(goals, tac)
        el = self._elaborator()
        fn, fn_ty = el._elab_infer(g.ctx, tac.term, None)
        tele: list[tuple[MVar, str]] = []
        ty = fn_ty
        while True:
            ty_i = self.mctx.instantiate_mvars(ty)
            if isinstance(ty_i, Pi):
                mv = self.mctx.mk_mvar(
                    ty_i.ty, g.ctx, name=ty_i.name.lstrip("_") or "a",
                    kind="instance" if ty_i.mode == INSTANCE else "data")
                tele.append((mv, ty_i.mode))
                fn = App(fn, mv)
                ty = instantiate(ty_i.body, mv)
                continue
            # not a Pi on the surface: try closing against the target before
            # unfolding any further (so e.g. `Ne a b` is not peeled into the
            # underlying implication)
            trial = self.mctx.copy()
            if unify(self.env, trial, ty_i,
                     trial.instantiate_mvars(g.target)):
                self.mctx.decls = trial.decls
                break
            w = whnf_meta(self.env, self.mctx, ty_i)
            if not alpha_eq(w, ty_i):
                ty = w
                continue
            mn = self.mctx.mvar_names()
            raise ApplyUnifyFailure(
                "apply failed: cannot unify "
                f"{pp_term(self.env, ty_i, mvar_names=mn)}"
                f" with {pp_term(self.env, self.mctx.instantiate_mvars(g.target), mvar_names=mn)}",
                tac.span)
        self.close_goal(g, fn)
        props: list[Goal] = []
        others: list[Goal] = []
        pendings = [(mv, INSTANCE) for mv in
                    (MVar(p.mvar_id) for p in el.pending)]
        el.pending.clear()
        for mv, mode in tele + pendings:
            if self.mctx.is_assigned(mv.id):
                continue
            mty = self.mctx.instantiate_mvars(self.mctx.decl(mv.id).type)
            if mode == INSTANCE:
                sol = None
                if not has_mvar(mty):
                    sol = resolve_instance(self.env, self.mctx, g.ctx, mty)
                if sol is not None:
                    self.mctx.assign(mv.id, sol)
                    continue
                others.append(Goal(mv.id, g.ctx, mty))
            elif self._is_prop(g.ctx, mty):
                props.append(Goal(mv.id, g.ctx, mty))
            else:
                others.append(Goal(mv.id, g.ctx, mty))
        return props + others + goals[1:]

    def tac_constructor(self, goals: list[Goal], tac: S.TConstructor) -> list[Goal]:
        g = self.first_goal(goals, tac)
        target = whnf_meta(self.env, self.mctx, g.target)
        head, args = app_spine(target)
        if isinstance(head, Const) and head.name == "True":
            self.close_goal(g, Const("True.intro"))
            return goals[1:]
        if isinstance(head, Const) and head.name == "And" and len(args) == 2:
            p, q = args
            left = self.mctx.mk_mvar(p, g.ctx, name="left", kind="prop")
            right = self.mctx.mk_mvar(q, g.ctx, name="right", kind="prop")
            self.close_goal(g, mk_app(Const("And.intro"), p, q, left, right))
            return [Goal(left.id, g.ctx, p), Goal(right.id, g.ctx, q)] + goals[1:]
        if isinstance(head, Const) and head.name == "Iff" and len(args) == 2:
            p, q = args
            fwd_ty = Pi("_", p, shift(q, 1))
            bwd_ty = Pi("_", q, shift(p, 1))
            mp = self.mctx.mk_mvar(fwd_ty, g.ctx, name="mp", kind="prop")
            mpr = self.mctx.mk_mvar(bwd_ty, g.ctx, name="mpr", kind="prop")
            self.close_goal(g, mk_app(Const("Iff.intro"), p, q, mp, mpr))
            return [Goal(mp.id, g.ctx, fwd_ty),
                    Goal(mpr.id, g.ctx, bwd_ty)] + goals[1:]
        raise ConstructorHeadUnknown(
            "constructor does not apply to goal "
            f"{pp_term(self.env, target, mvar_names=self.mctx.mvar_names())}",
            tac.span)

    def tac_swap(self, goals: list[Goal], tac: S.TSwap) -> list[Goal]:
        if len(goals) < 2:
            raise NoGoals("swap needs at least two goals", tac.span)
        return [goals[1], goals[0]] + goals[2:]

    def tac_sorry(self, goals: list[Goal], tac: S.TSorry) -> list[Goal]:
        if not goals:
            raise NoGoals("nothing to be sorry about", tac.span)
        g = goals[0]
        target = self.mctx.instantiate_mvars(g.target)
        self.close_goal(g, App(Const("sorryAx"), target))
        return goals[1:]

    def tac_have(self, goals: list[Goal], tac: S.THave) -> list[Goal]:
        g = self.first_goal(goals, tac)
        if tac.calc is not None:
            proof, ty = self.eval_calc(g.ctx, tac.calc)
        else:
            el = self._elaborator()
            proof = el.elaborate(g.ctx, tac.value, None)
            el.solve_pending(strict=True)
            ty = infer_meta(self.env, g.ctx, self.mctx, proof)
        ty = self.mctx.instantiate_mvars(ty)
        proof = self.mctx.instantiate_mvars(proof)
        fv = fresh_fvar()
        entry = CtxEntry(fv.id, tac.name, ty)
        ctx2 = g.ctx.extend(entry)
        new_target = self.mctx.instantiate_mvars(g.target)
        body = self.mctx.mk_mvar(new_target, ctx2, name="goal", kind="prop")
        self.mctx.assign(
            g.mvar_id,
            Closure("have", fv.id, tac.name, ty, EXPLICIT, body.id, arg=proof))
        return [Goal(body.id, ctx2, new_target)] + goals[1:]

    def tac_calc(self, goals: list[Goal], tac: S.TCalc) -> list[Goal]:
        g = self.first_goal(goals, tac)
        proof, ty = self.eval_calc(g.ctx, tac)
        if not unify(self.env, self.mctx, ty,
                     self.mctx.instantiate_mvars(g.target)):
            mn = self.mctx.mvar_names()
            raise CalcChainBroken(
                "calc proves "
                f"{pp_term(self.env, self.mctx.instantiate_mvars(ty), mvar_names=mn)}"
                " but the goal is "
                f"{pp_term(self.env, self.mctx.instantiate_mvars(g.target), mvar_names=mn)}",
                tac.span)
        self.close_goal(g, proof)
        return goals

    def eval_calc(self, ctx: LocalContext, calc: S.TCalc) -> tuple[Term, Term]:
        """Check each step against its equation and chain with transitivity."""
        el = self._elaborator()
        first = el.elaborate(ctx, calc.first_lhs, None)
        el.solve_pending(strict=True)
        ety = self.mctx.instantiate_mvars(
            infer_meta(self.env, ctx, self.mctx, first))
        first = self.mctx.instantiate_mvars(first)
        proof: Term | None = None
        prev = first
        for step in calc.steps:
            el2 = self._elaborator()
            rhs = el2.elaborate(ctx, step.rhs, expected=ety)
            el2.solve_pending(strict=True)
            rhs = self.mctx.instantiate_mvars(rhs)
            eq_stmt = mk_app(Const("Eq"), ety, prev, rhs)
            mv = self.mctx.mk_mvar(eq_stmt, ctx, name="calc", kind="prop")
            sub = Goal(mv.id, ctx, eq_stmt)
            self._snapshot(step.span, [sub])
            remaining = self.run_block([sub], step.justification)
            if remaining:
                raise UnsolvedGoals(
                    "calc step left unsolved goals:\n" + self.render(remaining),
                    step.span)
            step_proof = self.mctx.instantiate_mvars(mv)
            if proof is None:
                proof = step_proof
            else:
                proof = mk_app(Const("Eq.trans"), ety, first, prev, rhs,
                               proof, step_proof)
            prev = rhs
        if proof is None:
            raise CalcChainBroken("calc chain has no steps", calc.span)
        return proof, mk_app(Const("Eq"), ety, first, prev)

    def tac_bullet(self, goals: list[Goal], tac: S.TBullet) -> list[Goal]:
        g = self.first_goal(goals, tac)
        self._snapshot(tac.span, [g])
        remaining = self.run_block([g], tac.tactics)
        if remaining:
            raise BulletLeftGoalsOpen(
                "bullet block left its goal open:\n" + self.render(remaining),
                tac.span)
        return goals[1:]


def run_tactic_block(checker, el: Elaborator, ctx: LocalContext, entries,
                     stmt: Term, block, span: Span) -> Term:
    """Run a `by` block against a statement; returns the checked proof term."""
    from .checker import StepSnapshot

    mctx = el.mctx
    env = checker.env
    root = mctx.mk_mvar(stmt, ctx, name="goal", kind="prop")

    engine = TacticEngine(env, mctx,
                          trace_simp=checker.trace_simp,
                          trace_module=checker.trace_module)

    def record(tac_span: Span, goals):
        renders = [engine.render_one(g) for g in goals]
        checker.snapshots.append(StepSnapshot(
            span_start=tac_span.start, span=tac_span,
            render_after=engine.render(goals),
            goals=renders, live=(engine, list(goals))))

    engine.record = record
    goals = engine.run_block([Goal(root.id, ctx, stmt)], block)
    if goals:
        render = engine.render(goals)
        raise UnsolvedGoals("unsolved goals\n" + render, span,
                            goal_render=render)
    proof = mctx.instantiate_mvars(MVar(root.id))
    if has_mvar(proof):
        raise MicroProofError(
            "proof term contains unresolved metavariables", span)
    # unconditional kernel re-check of the assembled proof term
    kctx = LocalContext(tuple(
        CtxEntry(e.fvar_id, e.name, mctx.instantiate_mvars(e.type),
                 e.value, e.mode) for e in ctx.entries))
    inferred = infer_type(env, kctx, proof)
    if not def_eq(env, inferred, mctx.instantiate_mvars(stmt)):
        raise MicroProofError(
            "tactic proof failed kernel re-check: proved "
            f"{pp_term(env, inferred)}", span)
    return proof
