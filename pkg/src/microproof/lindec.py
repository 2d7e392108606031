"""The `module` tactic: decides equalities of universal linear expressions.

Both sides of the goal are normalized to linear combinations of module atoms
with scalar-polynomial coefficients.  The verdict is computed on that abstract
normal form; when the sides agree, a kernel-checkable proof is replayed as a
chain of certified rewrite steps (distribution, re-association, commutativity
swaps, cancellation) built from the algebra axioms.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import sast as S
from .elab import MetaContext, resolve_instance
from .env import Environment, LocalContext
from .errors import (MicroProofError, ModuleNotEqual, NonCommutativeScalars,
                     NotModuleTyped, Span)
from .kernel import infer_type, whnf
from .printer import ctx_name_map, pp_term
from .rewriter import SimpEngine, compile_rule, eq_refl, eq_symm, eq_trans
from .terms import (App, Const, Lam, Term, Var, alpha_eq, app_spine,
                    instantiate, mk_app)

_ADD = "AddCommGroup.add"
_NEG = "AddCommGroup.neg"
_SUB = "AddCommGroup.sub"
_ZERO = "Zero.zero"
_SMUL = "Module.smul"
_MUL = "Ring.mul"

# Rules that expand every linear expression into a right-nested sum of
# (possibly negated) scalar ladders over atoms.  `smul_smul` is applied
# right-to-left to split scalar products into ladders.
_EXPANSION = ["sub_eq_add_neg", "neg_add", "neg_neg", "neg_zero",
              "add_smul", "neg_smul", "smul_neg", "smul_add",
              "zero_smul", "smul_zero", "zero_add", "add_zero", "add_assoc"]

_MAX_PHASE_B_STEPS = 10000


# --- abstract normal forms --------------------------------------------------

@dataclass
class ScalarPoly:
    """Map from monomial (sorted tuple of scalar-atom keys) to an integer
    coefficient; zero coefficients are never stored."""
    coeffs: dict[tuple[str, ...], int] = field(default_factory=dict)

    @staticmethod
    def atom(key: str) -> "ScalarPoly":
        return ScalarPoly({(key,): 1})

    @staticmethod
    def zero() -> "ScalarPoly":
        return ScalarPoly({})

    @staticmethod
    def one() -> "ScalarPoly":
        return ScalarPoly({(): 1})

    def add(self, other: "ScalarPoly") -> "ScalarPoly":
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            n = out.get(m, 0) + c
            if n == 0:
                out.pop(m, None)
            else:
                out[m] = n
        return ScalarPoly(out)

    def neg(self) -> "ScalarPoly":
        return ScalarPoly({m: -c for m, c in self.coeffs.items()})

    def mul(self, other: "ScalarPoly") -> "ScalarPoly":
        out = ScalarPoly.zero()
        for m1, c1 in self.coeffs.items():
            for m2, c2 in other.coeffs.items():
                m = tuple(sorted(m1 + m2))
                out = out.add(ScalarPoly({m: c1 * c2}))
        return out

    def is_zero(self) -> bool:
        return not self.coeffs


def poly_equal(p: ScalarPoly, q: ScalarPoly) -> bool:
    return p.coeffs == q.coeffs


@dataclass
class LinCombo:
    """Map from module atom (keyed by structure) to its scalar polynomial;
    atoms appear in first-occurrence order and never map to zero."""
    combo: dict[str, ScalarPoly] = field(default_factory=dict)
    atoms: dict[str, Term] = field(default_factory=dict)

    def add_atom(self, key: str, t: Term, p: ScalarPoly) -> None:
        if key not in self.atoms:
            self.atoms[key] = t
        cur = self.combo.get(key, ScalarPoly.zero()).add(p)
        if cur.is_zero():
            self.combo.pop(key, None)
        else:
            self.combo[key] = cur

    def merge(self, other: "LinCombo") -> None:
        for key, p in other.combo.items():
            self.add_atom(key, other.atoms[key], p)


def lincombo_equal(a: LinCombo, b: LinCombo) -> bool:
    if set(a.combo) != set(b.combo):
        return False
    return all(poly_equal(a.combo[k], b.combo[k]) for k in a.combo)


def _spine(t: Term) -> tuple[str | None, list[Term]]:
    head, args = app_spine(t)
    return (head.name if isinstance(head, Const) else None), args


def _interp_scalar(t: Term) -> ScalarPoly:
    name, args = _spine(t)
    if name == _ADD and len(args) == 4:
        return _interp_scalar(args[2]).add(_interp_scalar(args[3]))
    if name == _SUB and len(args) == 4:
        return _interp_scalar(args[2]).add(_interp_scalar(args[3]).neg())
    if name == _NEG and len(args) == 3:
        return _interp_scalar(args[2]).neg()
    if name == _MUL and len(args) == 4:
        return _interp_scalar(args[2]).mul(_interp_scalar(args[3]))
    if name == _ZERO and len(args) == 2:
        return ScalarPoly.zero()
    return ScalarPoly.atom(repr(t))


def _interp_module(t: Term, out: LinCombo, scale: ScalarPoly) -> None:
    name, args = _spine(t)
    if name == _ADD and len(args) == 4:
        _interp_module(args[2], out, scale)
        _interp_module(args[3], out, scale)
        return
    if name == _SUB and len(args) == 4:
        _interp_module(args[2], out, scale)
        _interp_module(args[3], out, scale.neg())
        return
    if name == _NEG and len(args) == 3:
        _interp_module(args[2], out, scale.neg())
        return
    if name == _ZERO and len(args) == 2:
        return
    if name == _SMUL and len(args) == 5:
        _interp_module(args[4], out, scale.mul(_interp_scalar(args[3])))
        return
    if not scale.is_zero():
        out.add_atom(repr(t), t, scale)


def module_normalize(env: Environment, ctx: LocalContext, t: Term) -> LinCombo:
    ty = infer_type(env, ctx, t)
    inst = resolve_instance(env, MetaContext(), ctx,
                            mk_app(Const("AddCommGroup"), ty))
    if inst is None:
        raise NotModuleTyped(
            "module: expression does not live in an additive group")
    out = LinCombo()
    _interp_module(t, out, ScalarPoly.one())
    return out


# --- parsing the expanded term ---------------------------------------------

@dataclass
class Summand:
    term: Term
    sign: int                       # +1 or -1
    levels: list[tuple[Term, ...]]  # smul arg tuples (R, M, inst, r), outermost first
    atom: Term


def _parse_sum(t: Term) -> list[Term]:
    name, args = _spine(t)
    if name == _ADD and len(args) == 4:
        return [args[2]] + _parse_sum(args[3])
    return [t]


def _parse_summand(t: Term) -> Summand:
    sign = 1
    cur = t
    name, args = _spine(cur)
    if name == _NEG and len(args) == 3:
        sign = -1
        cur = args[2]
        name, args = _spine(cur)
    levels: list[tuple[Term, ...]] = []
    while name == _SMUL and len(args) == 5:
        levels.append((args[0], args[1], args[2], args[3]))
        cur = args[4]
        name, args = _spine(cur)
    return Summand(t, sign, levels, cur)


def _is_zero_term(t: Term) -> bool:
    name, args = _spine(t)
    return name == _ZERO and len(args) == 2


# --- the proof-producing normalizer ----------------------------------------

class _Normalizer:
    def __init__(self, engine, ctx: LocalContext, mod_ty: Term, span: Span):
        self.engine = engine
        self.env = engine.env
        self.ctx = ctx
        self.A = mod_ty
        self.span = span
        self.names = ctx_name_map(ctx)
        self.acg = self._resolve(mk_app(Const("AddCommGroup"), mod_ty))
        if self.acg is None:
            raise NotModuleTyped(
                "module: goal sides do not live in an additive group",
                span)
        self.scalar_order: dict[str, int] = {}
        self.atom_order: dict[str, int] = {}
        self._ring: dict[str, Term | None] = {}
        self._comm: dict[str, Term | None] = {}
        self.needed_swaps: list[str] = []
        self.steps = 0

    def render(self, t: Term) -> str:
        return pp_term(self.env, t, dict(self.names))

    def _resolve(self, goal: Term) -> Term | None:
        return resolve_instance(self.env, MetaContext(), self.ctx, goal)

    def ring_inst(self, R: Term) -> Term | None:
        key = repr(R)
        if key not in self._ring:
            self._ring[key] = self._resolve(mk_app(Const("Ring"), R))
        return self._ring[key]

    def comm_inst(self, R: Term) -> Term | None:
        key = repr(R)
        if key not in self._comm:
            self._comm[key] = self._resolve(mk_app(Const("CommRing"), R))
        return self._comm[key]

    # order keys, assigned at first sight (left side first)
    def scalar_key(self, r: Term) -> int:
        k = repr(r)
        if k not in self.scalar_order:
            self.scalar_order[k] = len(self.scalar_order)
        return self.scalar_order[k]

    def atom_key(self, a: Term) -> int:
        k = repr(a)
        if k not in self.atom_order:
            self.atom_order[k] = len(self.atom_order)
        return self.atom_order[k]

    def summand_key(self, s: Summand) -> tuple:
        mono = tuple(sorted(self.scalar_key(lv[3]) for lv in s.levels))
        return (self.atom_key(s.atom), mono, 0 if s.sign > 0 else 1)

    # --- summand scan: register orders and record commutativity needs ------
    def scan(self, summands: list[Summand]) -> None:
        for s in summands:
            keys = [self.scalar_key(lv[3]) for lv in s.levels]
            self.atom_key(s.atom)
            if keys != sorted(keys):
                sorted_levels = sorted(
                    s.levels, key=lambda lv: self.scalar_key(lv[3]))
                R, M, inst = s.levels[0][0], s.levels[0][1], s.levels[0][2]
                before = self._ladder(s.levels, s.atom)
                after = self._ladder(sorted_levels, s.atom)
                if self.comm_inst(R) is None:
                    req = f"{self.render(before)} = {self.render(after)}"
                    if req not in self.needed_swaps:
                        self.needed_swaps.append(req)

    def _ladder(self, levels, atom: Term) -> Term:
        t = atom
        for R, M, inst, r in reversed(levels):
            t = mk_app(Const(_SMUL), R, M, inst, r, t)
        return t

    # --- certified rewrite steps -------------------------------------------
    def _spend(self) -> None:
        self.steps += 1
        if self.steps > _MAX_PHASE_B_STEPS:
            raise MicroProofError("module: normalization step budget "
                                  "exceeded", self.span)

    def _congr(self, build, hole_ty: Term, old: Term, new: Term,
               pf: Term) -> tuple[Term, Term, Term]:
        """Lift pf : old = new through one term constructor."""
        lam = Lam("t", hole_ty, build(Var(0)))
        return (build(old), build(new),
                mk_app(Const("congrArg"), hole_ty, self.A, old, new, lam, pf))

    def _add(self, a: Term, b: Term) -> Term:
        return mk_app(Const(_ADD), self.A, self.acg, a, b)

    def p_add_comm(self, a: Term, b: Term) -> Term:
        return mk_app(Const("add_comm"), self.A, self.acg, a, b)

    def p_add_assoc(self, a: Term, b: Term, c: Term) -> Term:
        return mk_app(Const("add_assoc"), self.A, self.acg, a, b, c)

    def swap_scalars(self, levels, i: int, atom_tail: Term) \
            -> tuple[Term, Term]:
        """Swap levels i and i+1 of a ladder whose tail below level i+1 is
        atom_tail; returns (new subterm, proof old = new) for the subterm
        rooted at level i."""
        R, M, inst, r = levels[i]
        _, _, _, s = levels[i + 1]
        ring = self.ring_inst(R)
        comm = self.comm_inst(R)
        if ring is None or comm is None:
            raise NonCommutativeScalars(
                "module: scalar multiplication must commute; this goal "
                f"requires {self.render(self._ladder(levels[i:], atom_tail))}"
                f" = {self.render(self._ladder([levels[i + 1], levels[i]] + levels[i + 2:], atom_tail))}",
                self.span)
        m = atom_tail
        smul = lambda c, t: mk_app(Const(_SMUL), R, M, inst, c, t)
        mul = lambda a, b: mk_app(Const(_MUL), R, ring, a, b)
        smul_smul = lambda a, b: mk_app(Const("smul_smul"), R, M, ring,
                                        self.acg, inst, a, b, m)
        t0 = smul(r, smul(s, m))
        t1 = mk_app(Const(_SMUL), R, M, inst, mul(r, s), m)
        t2 = mk_app(Const(_SMUL), R, M, inst, mul(s, r), m)
        t3 = smul(s, smul(r, m))
        p01 = smul_smul(r, s)
        _, _, p12 = self._congr(
            lambda c: mk_app(Const(_SMUL), R, M, inst, c, m), R,
            mul(r, s), mul(s, r),
            mk_app(Const("mul_comm"), R, comm, r, s))
        p23 = eq_symm(self.A, t3, t2, smul_smul(s, r))
        pf = eq_trans(self.A, t0, t1, t2, p01, p12)
        pf = eq_trans(self.A, t0, t2, t3, pf, p23)
        return t3, pf

    def swap_summands(self, a: Term, b: Term,
                      rest: Term | None) -> tuple[Term, Term]:
        """a + (b + rest)  =  b + (a + rest)   (or a + b = b + a)."""
        if rest is None:
            return self._add(b, a), self.p_add_comm(a, b)
        t0 = self._add(a, self._add(b, rest))
        t1 = self._add(self._add(a, b), rest)
        t2 = self._add(self._add(b, a), rest)
        t3 = self._add(b, self._add(a, rest))
        p01 = eq_symm(self.A, t1, t0, self.p_add_assoc(a, b, rest))
        _, _, p12 = self._congr(lambda s: self._add(s, rest), self.A,
                                self._add(a, b), self._add(b, a),
                                self.p_add_comm(a, b))
        p23 = self.p_add_assoc(b, a, rest)
        pf = eq_trans(self.A, t0, t1, t2, p01, p12)
        pf = eq_trans(self.A, t0, t2, t3, pf, p23)
        return t3, pf

    def cancel(self, l: Term, neg_l: Term,
               rest: Term | None) -> tuple[Term, Term]:
        """l + (-l + rest) = rest   (or l + -l = 0)."""
        zero = mk_app(Const(_ZERO), self.A,
                      mk_app(Const("AddCommGroup.toZero"), self.A, self.acg))
        p_cancel = mk_app(Const("add_neg_cancel"), self.A, self.acg, l)
        if rest is None:
            return zero, p_cancel
        t0 = self._add(l, self._add(neg_l, rest))
        t1 = self._add(self._add(l, neg_l), rest)
        t2 = self._add(zero, rest)
        p01 = eq_symm(self.A, t1, t0, self.p_add_assoc(l, neg_l, rest))
        _, _, p12 = self._congr(lambda s: self._add(s, rest), self.A,
                                self._add(l, neg_l), zero, p_cancel)
        p23 = mk_app(Const("zero_add"), self.A, self.acg, rest)
        pf = eq_trans(self.A, t0, t1, t2, p01, p12)
        pf = eq_trans(self.A, t0, t2, rest, pf, p23)
        return rest, pf

    # --- positional lifting into the full sum ------------------------------
    def _rebuild(self, summands: list[Term], i: int, new_tail: Term,
                 old_tail: Term, pf: Term) -> tuple[Term, Term]:
        """The tail starting at summand i was rewritten; lift the proof
        through summands 0..i-1."""
        old, new = old_tail, new_tail
        for j in range(i - 1, -1, -1):
            s = summands[j]
            old, new, pf = self._congr(lambda t, s=s: self._add(s, t),
                                       self.A, old, new, pf)
        return new, pf

    def _tail(self, summands: list[Term], i: int) -> Term:
        t = summands[-1]
        for s in reversed(summands[i:-1]):
            t = self._add(s, t)
        return t

    # --- the driver ---------------------------------------------------------
    def normalize(self, t: Term) -> tuple[Term, Term | None]:
        """Certified phase-B normalization: sort ladders, sort summands,
        cancel opposite pairs, drop zeros."""
        cur = t
        total: Term | None = None

        def compose(new: Term, pf: Term) -> None:
            nonlocal cur, total
            total = pf if total is None else eq_trans(self.A, t, cur, new,
                                                      total, pf)
            cur = new

        while True:
            self._spend()
            terms = _parse_sum(cur)
            step = self._find_step(terms)
            if step is None:
                return cur, total
            compose(*step)

    def _find_step(self, terms: list[Term]) -> tuple[Term, Term] | None:
        summands = [_parse_summand(s) for s in terms]
        n = len(terms)
        # drop a zero summand (only possible after a cancellation)
        for i in range(n):
            if n > 1 and _is_zero_term(terms[i]):
                if i < n - 1:
                    rest = self._tail(terms, i + 1)
                    old_tail = self._add(terms[i], rest)
                    pf = mk_app(Const("zero_add"), self.A, self.acg, rest)
                    return self._rebuild(terms, i, rest, old_tail, pf)
                prev = terms[i - 1]
                old_tail = self._add(prev, terms[i])
                pf = mk_app(Const("add_zero"), self.A, self.acg, prev)
                return self._rebuild(terms, i - 1, prev, old_tail, pf)
        # sort scalars within each ladder
        for i, s in enumerate(summands):
            for k in range(len(s.levels) - 1):
                r_key = self.scalar_key(s.levels[k][3])
                s_key = self.scalar_key(s.levels[k + 1][3])
                same_ring = alpha_eq(s.levels[k][0], s.levels[k + 1][0])
                if r_key > s_key and same_ring:
                    tail_below = self._ladder(s.levels[k + 2:], s.atom)
                    new_sub, pf = self.swap_scalars(s.levels, k, tail_below)
                    old_sub = self._ladder(s.levels[k:], s.atom)
                    # lift through the outer ladder prefix and sign
                    old, new = old_sub, new_sub
                    for lv in reversed(s.levels[:k]):
                        old, new, pf = self._congr(
                            lambda t, lv=lv: mk_app(Const(_SMUL), lv[0],
                                                    lv[1], lv[2], lv[3], t),
                            self.A, old, new, pf)
                    if s.sign < 0:
                        old, new, pf = self._congr(
                            lambda t: mk_app(Const(_NEG), self.A, self.acg,
                                             t),
                            self.A, old, new, pf)
                    rest = self._tail(terms, i + 1) if i < n - 1 else None
                    old_tail = old if rest is None else self._add(old, rest)
                    if rest is not None:
                        old2, new2, pf = self._congr(
                            lambda t: self._add(t, rest), self.A, old, new,
                            pf)
                        new = new2
                    return self._rebuild(terms, i, new, old_tail, pf)
        # cancel adjacent opposite summands
        for i in range(n - 1):
            a, b = summands[i], summands[i + 1]
            inner = _strip_neg(b.term)
            if a.sign > 0 and b.sign < 0 and inner is not None \
                    and alpha_eq(a.term, inner):
                rest = self._tail(terms, i + 2) if i + 2 <= n - 1 else None
                new_sub, pf = self.cancel(a.term, b.term, rest)
                old_tail = self._tail(terms, i)
                return self._rebuild(terms, i, new_sub, old_tail, pf)
        # bubble-sort adjacent summands
        for i in range(n - 1):
            if self.summand_key(summands[i]) > self.summand_key(
                    summands[i + 1]):
                rest = self._tail(terms, i + 2) if i + 2 <= n - 1 else None
                new_sub, pf = self.swap_summands(terms[i], terms[i + 1],
                                                 rest)
                old_tail = self._tail(terms, i)
                return self._rebuild(terms, i, new_sub, old_tail, pf)
        return None


def _strip_neg(t: Term) -> Term | None:
    name, args = _spine(t)
    if name == _NEG and len(args) == 3:
        return args[2]
    return None


# --- the tactic -------------------------------------------------------------

def _expansion_rules(env: Environment):
    rules = []
    for name in _EXPANSION:
        d = env.find(name)
        rule, _ = compile_rule(env, name, Const(name), d.type)
        rules.append(rule)
    d = env.find("smul_smul")
    rule, _ = compile_rule(env, "smul_smul", Const("smul_smul"), d.type)
    rules.append(rule.reverse())
    return rules


def _net_form(norm: _Normalizer,
              summands: list[Summand]) -> dict[tuple, int]:
    net: dict[tuple, int] = {}
    for s in summands:
        key = (norm.atom_key(s.atom),
               tuple(sorted(norm.scalar_key(lv[3]) for lv in s.levels)))
        net[key] = net.get(key, 0) + s.sign
        if net[key] == 0:
            del net[key]
    return net


def tac_module(engine, goals, tac: S.TModule):
    g = engine.first_goal(goals, tac)
    env = engine.env
    kctx = engine.display_ctx(g.ctx)
    target = engine.mctx.instantiate_mvars(g.target)
    head, args = app_spine(target)
    if not (isinstance(head, Const) and head.name == "Eq" and len(args) == 3):
        w = whnf(env, target, reducible_only=True)
        head, args = app_spine(w)
        if not (isinstance(head, Const) and head.name == "Eq"
                and len(args) == 3):
            raise NotModuleTyped("module: goal is not an equality", tac.span)
        target = w
    mod_ty, lhs, rhs = args
    norm = _Normalizer(engine, kctx, mod_ty, tac.span)

    # phase A: certified expansion into sums of signed ladders
    simp = SimpEngine(env, kctx, _expansion_rules(env))
    l1, pf_l = simp.simplify(lhs)
    r1, pf_r = simp.simplify(rhs)

    ls = [_parse_summand(s) for s in _parse_sum(l1)]
    rs = [_parse_summand(s) for s in _parse_sum(r1)]
    norm.scan(ls)
    norm.scan(rs)
    if norm.needed_swaps:
        raise NonCommutativeScalars(
            "module: the scalars form a Ring but not a CommRing; closing "
            "this goal requires " + " and ".join(norm.needed_swaps),
            tac.span)

    def drop_zero(ss):
        return [s for s in ss if not _is_zero_term(s.term)]

    net_l = _net_form(norm, drop_zero(ls))
    net_r = _net_form(norm, drop_zero(rs))
    if net_l != net_r:
        nf_l, nf_r = norm.render(l1), norm.render(r1)
        if engine.trace_module is not None:
            engine.trace_module(nf_l, nf_r)
        raise ModuleNotEqual(
            "module: the two sides have different normal forms:\n"
            f"  {nf_l}\n  {nf_r}", tac.span)

    # phase B: certified sorting and cancellation to a shared canonical term
    l2, pf_l2 = norm.normalize(l1)
    r2, pf_r2 = norm.normalize(r1)
    if not alpha_eq(l2, r2):
        raise ModuleNotEqual(
            "module: could not reconcile the two normal forms:\n"
            f"  {norm.render(l2)}\n  {norm.render(r2)}", tac.span)

    def compose(a: Term, b: Term, c: Term, p1: Term | None,
                p2: Term | None) -> Term | None:
        if p1 is None:
            return p2
        if p2 is None:
            return p1
        return eq_trans(mod_ty, a, b, c, p1, p2)

    pl = compose(lhs, l1, l2, pf_l, pf_l2)     # lhs = canonical
    pr = compose(rhs, r1, r2, pf_r, pf_r2)     # rhs = canonical
    if pl is None and pr is None:
        proof = eq_refl(mod_ty, lhs)
    elif pr is None:
        proof = pl
    else:
        pr_sym = eq_symm(mod_ty, rhs, r2, pr)
        proof = (pr_sym if pl is None
                 else eq_trans(mod_ty, lhs, l2, rhs, pl, pr_sym))
    engine.close_goal(g, proof)
    return goals[1:]
