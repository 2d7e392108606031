"""Elaboration: surface syntax → kernel terms.

Implicit and instance-implicit arguments are synthesized via metavariables;
unification is first-order with a pattern case and delta-unfolding on head
mismatch; typeclass instances are found by depth-first search over local
instance binders and the environment's instance set.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field

from . import sast as S
from .env import (CtxEntry, Environment, LocalContext)
from .errors import (AmbiguousElaboration, InstanceDepthExceeded,
                     InstanceResolutionFailed, MicroProofError, OccursCheck,
                     Span, TypeMismatch, UnifyFailure, UnknownIdentifier)
from .kernel import def_eq, infer_type, whnf
from .terms import (App, Const, EXPLICIT, FVar, IMPLICIT, INSTANCE, Lam, MVar,
                    Pi, SORT_PROP, SORT_TYPE, Sort, Term, Var, abstract_fvar,
                    alpha_eq, app_spine, fresh_fvar, fresh_mvar_id, has_mvar,
                    instantiate, mk_app, subterms)

INSTANCE_DEPTH_CAP = 32


# --- metavariable context ---------------------------------------------------

@dataclass
class Closure:
    """Delayed-abstraction assignment: the mvar's value is built from an
    inner mvar by abstracting a local free variable at read-out time.

    kind "lam":  value = fun (name : ty) => body[fvar := bound]
    kind "have": value = (fun (name : ty) => body[fvar := bound]) arg
    """
    kind: str
    fvar_id: int
    name: str
    ty: Term
    mode: str
    body_mvar: int
    arg: Term | None = None


@dataclass
class MVarDecl:
    type: Term
    ctx: LocalContext
    name: str
    kind: str  # "prop" | "data" | "instance"
    assignment: Term | Closure | None = None


class MetaContext:
    def __init__(self):
        self.decls: dict[int, MVarDecl] = {}

    def copy(self) -> "MetaContext":
        m = MetaContext()
        m.decls = {k: MVarDecl(d.type, d.ctx, d.name, d.kind, d.assignment)
                   for k, d in self.decls.items()}
        return m

    def mk_mvar(self, type: Term, ctx: LocalContext, name: str = "m",
                kind: str = "data") -> MVar:
        mid = fresh_mvar_id()
        self.decls[mid] = MVarDecl(type, ctx, name, kind)
        return MVar(mid)

    def decl(self, mid: int) -> MVarDecl:
        return self.decls[mid]

    def is_assigned(self, mid: int) -> bool:
        d = self.decls.get(mid)
        return d is not None and d.assignment is not None

    def assign(self, mid: int, value) -> None:
        d = self.decls[mid]
        assert d.assignment is None, f"mvar {mid} already assigned"
        d.assignment = value

    def value_of(self, mid: int) -> Term | None:
        d = self.decls.get(mid)
        if d is None or d.assignment is None:
            return None
        a = d.assignment
        if isinstance(a, Closure):
            body = self.instantiate_mvars(MVar(a.body_mvar))
            lam = Lam(a.name, self.instantiate_mvars(a.ty),
                      abstract_fvar(body, a.fvar_id), a.mode)
            return lam if a.kind == "lam" else App(lam, a.arg)
        return a

    def instantiate_mvars(self, t: Term) -> Term:
        if isinstance(t, MVar):
            v = self.value_of(t.id)
            return t if v is None else self.instantiate_mvars(v)
        if isinstance(t, App):
            return App(self.instantiate_mvars(t.fn), self.instantiate_mvars(t.arg))
        if isinstance(t, Lam):
            return Lam(t.name, self.instantiate_mvars(t.ty),
                       self.instantiate_mvars(t.body), t.mode)
        if isinstance(t, Pi):
            return Pi(t.name, self.instantiate_mvars(t.ty),
                      self.instantiate_mvars(t.body), t.mode)
        return t

    def mvar_names(self) -> dict[int, str]:
        return {mid: d.name for mid, d in self.decls.items()}

    def unassigned_in(self, t: Term) -> list[int]:
        out: list[int] = []
        for s in subterms(self.instantiate_mvars(t)):
            if isinstance(s, MVar) and s.id not in out:
                out.append(s.id)
        return out


# --- unification ------------------------------------------------------------

def _mvars_of(t: Term) -> set[int]:
    return {s.id for s in subterms(t) if isinstance(s, MVar)}


def _fvars_of(t: Term) -> set[int]:
    return {s.id for s in subterms(t) if isinstance(s, FVar)}


def unify(env: Environment, mctx: MetaContext, t1: Term, t2: Term,
          forbidden: frozenset[int] = frozenset()) -> bool:
    """Extend mctx so t1 and t2 become definitionally equal. Mutates mctx;
    callers that need backtracking must copy the mctx first."""
    t1 = mctx.instantiate_mvars(t1)
    t2 = mctx.instantiate_mvars(t2)
    if alpha_eq(t1, t2):
        return True

    h1, a1 = app_spine(t1)
    h2, a2 = app_spine(t2)
    if isinstance(h1, MVar) and _try_solve(env, mctx, h1, a1, t2, forbidden):
        return True
    if isinstance(h2, MVar) and _try_solve(env, mctx, h2, a2, t1, forbidden):
        return True

    if isinstance(t1, (Pi, Lam)) and type(t1) is type(t2):
        if isinstance(t1, Pi) and t1.mode != t2.mode:
            return False
        if not unify(env, mctx, t1.ty, t2.ty, forbidden):
            return False
        fv = fresh_fvar()
        return unify(env, mctx, instantiate(t1.body, fv), instantiate(t2.body, fv),
                     forbidden | {fv.id})

    def heads_match() -> bool:
        if isinstance(h1, Const) and isinstance(h2, Const):
            return h1.name == h2.name
        if isinstance(h1, FVar) and isinstance(h2, FVar):
            return h1.id == h2.id
        return False

    if heads_match() and len(a1) == len(a2):
        save = mctx.copy()
        if all(unify(env, mctx, x, y, forbidden) for x, y in zip(a1, a2)):
            return True
        mctx.decls = save.decls

    # delta: unfold and retry once if anything changed
    w1 = whnf(env, t1)
    w2 = whnf(env, t2)
    if not (alpha_eq(w1, t1) and alpha_eq(w2, t2)):
        return unify(env, mctx, w1, w2, forbidden)
    return False


def _try_solve(env: Environment, mctx: MetaContext, m: MVar, args: list[Term],
               rhs: Term, forbidden: frozenset[int]) -> bool:
    if mctx.is_assigned(m.id):
        return False  # already instantiated away by caller
    # pattern case: arguments must be distinct free variables
    arg_ids: list[int] = []
    for a in args:
        a = mctx.instantiate_mvars(a)
        if not isinstance(a, FVar) or a.id in arg_ids:
            return False
        arg_ids.append(a.id)
    rhs = mctx.instantiate_mvars(rhs)
    if m.id in _mvars_of(rhs):
        return False  # occurs check
    bad = (_fvars_of(rhs) & forbidden) - set(arg_ids)
    if bad:
        return False  # would capture a unification-local bound variable
    value = rhs
    # binder types come from the mvar's own Pi telescope
    tele = mctx.instantiate_mvars(mctx.decl(m.id).type)
    types: list[Term] = []
    t = tele
    for _ in arg_ids:
        t = whnf(env, t) if not isinstance(t, Pi) else t
        if not isinstance(t, Pi):
            return False
        types.append(t.ty)
        t = instantiate(t.body, FVar(-1))  # shape only; types reused positionally
    for fid, ty in zip(reversed(arg_ids), reversed(types)):
        value = Lam("x", ty, abstract_fvar(value, fid))
    mctx.assign(m.id, value)
    return True


# --- instance resolution ----------------------------------------------------

def resolve_instance(env: Environment, mctx: MetaContext, ctx: LocalContext,
                     goal: Term, depth: int = 0) -> Term | None:
    if depth > INSTANCE_DEPTH_CAP:
        raise InstanceDepthExceeded("instance search exceeded depth cap")
    goal = mctx.instantiate_mvars(goal)
    if has_mvar(goal):
        return None
    for e in reversed(ctx.entries):
        if e.mode == INSTANCE and def_eq(env, e.type, goal):
            return FVar(e.fvar_id)
    for name in env.instance_set:
        d = env.find(name)
        if d is None:
            continue
        trial = mctx.copy()
        term: Term = Const(d.name)
        ty = d.type
        premise_mvars: list[tuple[MVar, str]] = []
        while isinstance(ty, Pi):
            mv = trial.mk_mvar(ty.ty, ctx, name=ty.name, kind="instance"
                               if ty.mode == INSTANCE else "data")
            premise_mvars.append((mv, ty.mode))
            term = App(term, mv)
            ty = instantiate(ty.body, mv)
        if not unify(env, trial, ty, goal):
            continue
        ok = True
        for mv, mode in premise_mvars:
            if trial.is_assigned(mv.id):
                continue
            if mode == INSTANCE:
                sub = resolve_instance(env, trial, ctx, trial.decl(mv.id).type,
                                       depth + 1)
                if sub is None:
                    ok = False
                    break
                trial.assign(mv.id, sub)
            else:
                ok = False
                break
        if not ok:
            continue
        mctx.decls = trial.decls
        return mctx.instantiate_mvars(term)
    return None


# --- the elaborator ---------------------------------------------------------

_BINOP_HEADS = {
    "=": "Eq", "≠": "Ne", "∧": "And", "∨": "Or", "↔": "Iff",
    "+": "AddCommGroup.add", "-": "AddCommGroup.sub",
    "*": "Ring.mul", "•": "Module.smul",
}

_FIELD_SUFFIXES = {"mp": "Iff.mp", "mpr": "Iff.mpr", "1": "And.left",
                   "2": "And.right"}


@dataclass
class _Pending:
    mvar_id: int
    ctx: LocalContext
    span: Span


class Elaborator:
    def __init__(self, env: Environment, mctx: MetaContext | None = None):
        self.env = env
        self.mctx = mctx if mctx is not None else MetaContext()
        self.pending: list[_Pending] = []

    # -- top-level entry points ---------------------------------------------

    def elaborate(self, ctx: LocalContext, stx: S.SyntaxNode,
                  expected: Term | None = None) -> Term:
        t = self._elab(ctx, stx, expected)
        self.solve_pending(strict=False)
        return t

    def solve_pending(self, strict: bool) -> list[_Pending]:
        """Resolve postponed instance problems; returns the unresolved ones.
        With strict=True, any leftover raises InstanceResolutionFailed."""
        progress = True
        while progress:
            progress = False
            for p in list(self.pending):
                if self.mctx.is_assigned(p.mvar_id):
                    self.pending.remove(p)
                    progress = True
                    continue
                ty = self.mctx.instantiate_mvars(self.mctx.decl(p.mvar_id).type)
                if has_mvar(ty):
                    continue
                sol = resolve_instance(self.env, self.mctx, p.ctx, ty)
                if sol is not None:
                    self.mctx.assign(p.mvar_id, sol)
                    self.pending.remove(p)
                    progress = True
        if strict:
            for p in self.pending:
                ty = self.mctx.instantiate_mvars(self.mctx.decl(p.mvar_id).type)
                from .printer import pp_term
                raise InstanceResolutionFailed(
                    f"failed to synthesize instance {pp_term(self.env, ty)}",
                    p.span)
        return list(self.pending)

    # -- term elaboration ----------------------------------------------------

    def _elab(self, ctx: LocalContext, stx: S.SyntaxNode,
              expected: Term | None) -> Term:
        term, ty = self._elab_infer(ctx, stx, expected)
        if expected is not None:
            term, ty = self._peel_nonexplicit(ctx, term, ty, stx.span)
            if not unify(self.env, self.mctx, ty, expected):
                from .printer import pp_term
                mn = self.mctx.mvar_names()
                raise TypeMismatch(
                    "type mismatch: expected "
                    f"{pp_term(self.env, self.mctx.instantiate_mvars(expected), mvar_names=mn)}"
                    f", got {pp_term(self.env, self.mctx.instantiate_mvars(ty), mvar_names=mn)}",
                    stx.span)
        return term

    def _elab_infer(self, ctx: LocalContext, stx: S.SyntaxNode,
                    expected: Term | None) -> tuple[Term, Term]:
        if isinstance(stx, S.SIdent):
            return self._elab_ident(ctx, stx)
        if isinstance(stx, S.SSort):
            return (SORT_PROP if stx.level == "Prop" else SORT_TYPE), SORT_TYPE
        if isinstance(stx, S.SZero):
            return self._head_with_args(ctx, Const("Zero.zero"),
                                        self._const_type("Zero.zero", stx.span),
                                        [], stx.span)
        if isinstance(stx, S.SAscribe):
            ty = self._elab(ctx, stx.type, None)
            return self._elab(ctx, stx.term, ty), ty
        if isinstance(stx, S.SApp):
            fn_stx, args = self._app_spine(stx)
            fn, fn_ty = self._elab_infer(ctx, fn_stx, None)
            return self._head_with_args(ctx, fn, fn_ty, args, stx.span)
        if isinstance(stx, S.SBinOp):
            return self._elab_binop(ctx, stx)
        if isinstance(stx, S.SNot):
            return self._head_with_args(ctx, Const("Not"),
                                        self._const_type("Not", stx.span),
                                        [stx.arg], stx.span)
        if isinstance(stx, S.SNeg):
            return self._head_with_args(ctx, Const("AddCommGroup.neg"),
                                        self._const_type("AddCommGroup.neg", stx.span),
                                        [stx.arg], stx.span)
        if isinstance(stx, S.SLinArrow):
            return self._head_with_args(ctx, Const("LinearMap"),
                                        self._const_type("LinearMap", stx.span),
                                        [stx.ring, stx.src, stx.dst], stx.span)
        if isinstance(stx, S.SForall):
            return self._elab_forall(ctx, stx)
        if isinstance(stx, S.SFun):
            return self._elab_fun(ctx, stx, expected)
        raise MicroProofError(f"cannot elaborate {type(stx).__name__}", stx.span)

    def _app_spine(self, stx: S.SApp):
        args: list[S.SyntaxNode] = []
        cur: S.SyntaxNode = stx
        while isinstance(cur, S.SApp):
            args.append(cur.arg)
            cur = cur.fn
        return cur, list(reversed(args))

    def _const_type(self, name: str, span: Span) -> Term:
        d = self.env.find(name)
        if d is None or not self.env.visible(d):
            raise UnknownIdentifier(f"unknown identifier '{name}'", span)
        return d.type

    def _elab_ident(self, ctx: LocalContext, stx: S.SIdent) -> tuple[Term, Term]:
        name = stx.name
        e = ctx.lookup_name(name)
        if e is not None:
            return FVar(e.fvar_id), e.type
        d = self.env.find(name)
        if d is not None and self.env.visible(d):
            return Const(name), d.type
        # generalized field notation: longest declared prefix + .mp/.mpr/.1/.2
        parts = name.split(".")
        for cut in range(len(parts) - 1, 0, -1):
            base_name = ".".join(parts[:cut])
            suffixes = parts[cut:]
            base_e = ctx.lookup_name(base_name)
            base_d = self.env.find(base_name) if base_e is None else None
            if base_e is None and (base_d is None or not self.env.visible(base_d)):
                continue
            if not all(sfx in _FIELD_SUFFIXES for sfx in suffixes):
                continue
            if base_e is not None:
                term, ty = FVar(base_e.fvar_id), base_e.type
            else:
                term, ty = Const(base_name), base_d.type
            for sfx in suffixes:
                proj = _FIELD_SUFFIXES[sfx]
                term, ty = self._apply_term_arg(
                    ctx, Const(proj), self._const_type(proj, stx.span),
                    term, ty, stx.span)
            return term, ty
        raise UnknownIdentifier(f"unknown identifier '{name}'", stx.span)

    def _elab_binop(self, ctx: LocalContext, stx: S.SBinOp) -> tuple[Term, Term]:
        if stx.op == "→":
            lhs = self._elab(ctx, stx.lhs, None)
            rhs = self._elab(ctx, stx.rhs, None)
            from .terms import shift
            pi = Pi("_", lhs, shift(rhs, 1))
            return pi, infer_meta_sort(self.env, ctx, self.mctx, pi)
        if stx.op == "∈":
            set_t, set_ty = self._elab_infer(ctx, stx.rhs, None)
            return self._head_with_args(ctx, set_t, set_ty, [stx.lhs], stx.span)
        head = _BINOP_HEADS[stx.op]
        return self._head_with_args(ctx, Const(head),
                                    self._const_type(head, stx.span),
                                    [stx.lhs, stx.rhs], stx.span)

    def _elab_forall(self, ctx: LocalContext, stx: S.SForall) -> tuple[Term, Term]:
        ctx2, entries = self.elab_binders(ctx, stx.binders)
        body = self._elab(ctx2, stx.body, None)
        term = body
        for e in reversed(entries):
            term = Pi(e.name, e.type, abstract_fvar(term, e.fvar_id), e.mode)
        return term, infer_meta_sort(self.env, ctx, self.mctx, term)

    def _elab_fun(self, ctx: LocalContext, stx: S.SFun,
                  expected: Term | None) -> tuple[Term, Term]:
        expected = (self.mctx.instantiate_mvars(expected)
                    if expected is not None else None)
        ctx2 = ctx
        entries: list[CtxEntry] = []
        exp = expected
        for b in stx.binders:
            for nm in b.names:
                if b.type is not None:
                    ty = self._elab(ctx2, b.type, None)
                elif isinstance(exp, Pi):
                    ty = exp.ty
                else:
                    ty = self.mctx.mk_mvar(SORT_TYPE, ctx2, name=nm)
                fv = fresh_fvar()
                e = CtxEntry(fv.id, nm, ty, mode=b.mode)
                entries.append(e)
                ctx2 = ctx2.extend(e)
                if isinstance(exp, Pi):
                    exp = whnf_meta(self.env, self.mctx, instantiate(exp.body, fv))
        body = self._elab(ctx2, stx.body, exp)
        body_ty = self._infer(ctx2, body)
        term, ty = body, body_ty
        for e in reversed(entries):
            term = Lam(e.name, e.type, abstract_fvar(term, e.fvar_id), e.mode)
            ty = Pi(e.name, e.type, abstract_fvar(ty, e.fvar_id), e.mode)
        return term, ty

    def _head_with_args(self, ctx: LocalContext, fn: Term, fn_ty: Term,
                        args: list[S.SyntaxNode], span: Span) -> tuple[Term, Term]:
        for arg_stx in args:
            fn, fn_ty = self._peel_nonexplicit(ctx, fn, fn_ty, span)
            fn_ty = whnf_meta(self.env, self.mctx, fn_ty)
            if not isinstance(fn_ty, Pi):
                fn, fn_ty = self._coerce_fun(ctx, fn, fn_ty, span)
            arg = self._elab(ctx, arg_stx, fn_ty.ty)
            fn = App(fn, arg)
            fn_ty = instantiate(fn_ty.body, arg)
        return fn, fn_ty

    def _apply_term_arg(self, ctx: LocalContext, fn: Term, fn_ty: Term,
                        arg: Term, arg_ty: Term, span: Span) -> tuple[Term, Term]:
        """Apply fn to an already-elaborated argument term."""
        fn, fn_ty = self._peel_nonexplicit(ctx, fn, fn_ty, span)
        fn_ty = whnf_meta(self.env, self.mctx, fn_ty)
        if not isinstance(fn_ty, Pi):
            fn, fn_ty = self._coerce_fun(ctx, fn, fn_ty, span)
        arg, arg_ty = self._peel_nonexplicit(ctx, arg, arg_ty, span)
        if not unify(self.env, self.mctx, arg_ty, fn_ty.ty):
            from .printer import pp_term
            raise TypeMismatch(
                f"argument type mismatch at {pp_term(self.env, arg_ty)}", span)
        return App(fn, arg), instantiate(fn_ty.body, arg)

    def _peel_nonexplicit(self, ctx: LocalContext, term: Term, ty: Term,
                          span: Span) -> tuple[Term, Term]:
        while True:
            ty_w = whnf_meta(self.env, self.mctx, ty, reducible_only=True)
            if not isinstance(ty_w, Pi) or ty_w.mode == EXPLICIT:
                ty_w = self.mctx.instantiate_mvars(ty)
                if not (isinstance(ty_w, Pi) and ty_w.mode != EXPLICIT):
                    return term, ty_w
            mv = self.mctx.mk_mvar(ty_w.ty, ctx, name=ty_w.name,
                                   kind="instance" if ty_w.mode == INSTANCE
                                   else "data")
            if ty_w.mode == INSTANCE:
                self.pending.append(_Pending(mv.id, ctx, span))
            term = App(term, mv)
            ty = instantiate(ty_w.body, mv)

    def _coerce_fun(self, ctx: LocalContext, fn: Term, fn_ty: Term,
                    span: Span) -> tuple[Term, Pi]:
        """Insert the linear-map application coercion when fn is not a
        function but its type unfolds to `LinearMap R A B`."""
        w = whnf_meta(self.env, self.mctx, fn_ty)
        head, args = app_spine(w)
        if isinstance(head, Const) and head.name == "LinearMap" and len(args) == 3:
            app_const = "LinearMap.app"
            d = self.env.find(app_const)
            if d is not None:
                coerced = mk_app(Const(app_const), args[0], args[1], args[2], fn)
                r, a, b = args
                from .terms import shift
                return coerced, Pi("_", a, shift(b, 1))
        from .printer import pp_term
        raise TypeMismatch(
            f"expected a function, got a term of type {pp_term(self.env, w)}",
            span)

    # -- binders and statements ---------------------------------------------

    def elab_binders(self, ctx: LocalContext,
                     binders) -> tuple[LocalContext, list[CtxEntry]]:
        entries: list[CtxEntry] = []
        for b in binders:
            ty = self._elab(ctx, b.type, None) if b.type is not None else None
            names = b.names if b.names else ("inst",)
            for nm in names:
                bty = ty if ty is not None else self.mctx.mk_mvar(
                    SORT_TYPE, ctx, name=nm)
                fv = fresh_fvar()
                e = CtxEntry(fv.id, nm, bty, mode=b.mode)
                entries.append(e)
                ctx = ctx.extend(e)
        return ctx, entries

    def _infer(self, ctx: LocalContext, t: Term) -> Term:
        return infer_meta(self.env, ctx, self.mctx, t)


# --- type inference tolerant of metavariables -------------------------------

def infer_meta(env: Environment, ctx: LocalContext, mctx: MetaContext,
               t: Term) -> Term:
    t = mctx.instantiate_mvars(t)
    if isinstance(t, MVar):
        return mctx.instantiate_mvars(mctx.decl(t.id).type)
    if isinstance(t, App):
        fn_ty = whnf_meta(env, mctx, infer_meta(env, ctx, mctx, t.fn))
        if not isinstance(fn_ty, Pi):
            raise TypeMismatch("application head is not a function")
        return instantiate(fn_ty.body, t.arg)
    if isinstance(t, Lam):
        fv = fresh_fvar()
        ctx2 = ctx.extend(CtxEntry(fv.id, t.name, t.ty, mode=t.mode))
        body_ty = infer_meta(env, ctx2, mctx, instantiate(t.body, fv))
        return Pi(t.name, t.ty, abstract_fvar(body_ty, fv.id), t.mode)
    if isinstance(t, Pi):
        return infer_meta_sort(env, ctx, mctx, t)
    return infer_type(env, ctx, t)


def infer_meta_sort(env: Environment, ctx: LocalContext, mctx: MetaContext,
                    t: Term) -> Sort:
    """Sort of a (possibly mvar-containing) Pi/type; Prop is impredicative."""
    t = whnf_meta(env, mctx, t)
    if isinstance(t, Pi):
        fv = fresh_fvar()
        ctx2 = ctx.extend(CtxEntry(fv.id, t.name, t.ty, mode=t.mode))
        return infer_meta_sort(env, ctx2, mctx, instantiate(t.body, fv))
    if isinstance(t, Sort):
        return SORT_TYPE
    ty = infer_meta(env, ctx, mctx, t)
    w = whnf_meta(env, mctx, ty)
    return w if isinstance(w, Sort) else SORT_TYPE


def whnf_meta(env: Environment, mctx: MetaContext, t: Term,
              reducible_only: bool = False) -> Term:
    return whnf(env, mctx.instantiate_mvars(t), reducible_only)


# --- autobound implicits and `variable` selection ---------------------------

def _is_autobindable(name: str) -> bool:
    return len(name) == 1 and unicodedata.category(name).startswith("L")


def free_names(stx, bound: frozenset[str] = frozenset()) -> list[str]:
    """Identifiers referenced by a surface tree, in first-occurrence order."""
    out: list[str] = []

    def go(node, bound):
        if node is None:
            return
        if isinstance(node, S.SIdent):
            base = node.name.split(".")[0]
            if node.name not in bound and base not in bound:
                if node.name not in out:
                    out.append(node.name)
            return
        if isinstance(node, (S.SForall, S.SFun)):
            b2 = set(bound)
            for b in node.binders:
                go(b.type, frozenset(b2))
                b2.update(b.names)
            go(node.body, frozenset(b2))
            return
        if isinstance(node, S.SApp):
            go(node.fn, bound)
            go(node.arg, bound)
            return
        if isinstance(node, S.SBinOp):
            go(node.lhs, bound)
            go(node.rhs, bound)
            return
        if isinstance(node, (S.SNeg, S.SNot)):
            go(node.arg, bound)
            return
        if isinstance(node, S.SLinArrow):
            go(node.ring, bound)
            go(node.src, bound)
            go(node.dst, bound)
            return
        if isinstance(node, S.SAscribe):
            go(node.term, bound)
            go(node.type, bound)
            return

    go(stx, bound)
    return out


def insert_autobound(binders, env: Environment,
                     known: set[str]) -> list[S.Binder]:
    """Unknown single-letter names in binder types become implicit Type
    binders, inserted immediately before the binder that first mentions them."""
    known = set(known)
    out: list[S.Binder] = []
    for b in binders:
        if b.type is not None:
            for nm in free_names(b.type):
                if nm in known or env.find(nm) is not None:
                    continue
                if _is_autobindable(nm):
                    out.append(S.Binder((nm,), S.SSort("sort", b.span, "Type"),
                                        IMPLICIT, b.span))
                    known.add(nm)
        out.append(b)
        known.update(b.names)
    return out


def select_variables(var_binders, used_names: set[str]) -> list[S.Binder]:
    """The `variable` inclusion rule: a named binder is included iff its name
    is used (directly or by another included binder's type); an anonymous
    instance binder is included iff every variable name its type mentions is
    included."""
    all_var_names = {n for b in var_binders for n in b.names}
    used = set(used_names)
    avail: set[str] = set()
    chosen: set[int] = set()
    changed = True
    while changed:
        changed = False
        for i, b in enumerate(var_binders):
            if i in chosen:
                continue
            if b.names:
                if any(n in used for n in b.names):
                    chosen.add(i)
                    avail.update(b.names)
                    if b.type is not None:
                        used.update(free_names(b.type))
                    changed = True
            else:
                deps = [n for n in free_names(b.type) if n in all_var_names]
                if all(n in avail for n in deps):
                    chosen.add(i)
                    changed = True
    return [b for i, b in enumerate(var_binders) if i in chosen]
