"""Pretty printing: kernel terms with notation, goal states, surface trees.

Binder display names are hints only; collisions are resolved by appending
daggers.  Implicit and instance arguments of constants are suppressed based
on the declaration signature.
"""

from __future__ import annotations

from .env import Environment, LocalContext
from .errors import Span
from .terms import (App, Const, EXPLICIT, FVar, IMPLICIT, INSTANCE, Lam, MVar,
                    Pi, PROP, Sort, Term, Var, alpha_eq, app_spine, has_loose_var,
                    instantiate, mk_app)

# precedence levels (match the parser's table)
PREC_MIN = 0
PREC_QUANT = 5
PREC_IFF = 20
PREC_ARROW = 25
PREC_OR = 30
PREC_AND = 35
PREC_NOT = 40
PREC_CMP = 50
PREC_ADDSUB = 65
PREC_MUL = 70
PREC_SMUL = 73
PREC_NEGATE = 75
PREC_APP = 100
PREC_ATOM = 110

# (symbol, prec, assoc) keyed by (constant name, explicit arity)
_INFIX = {
    ("Eq", 2): ("=", PREC_CMP, "none"),
    ("Ne", 2): ("≠", PREC_CMP, "none"),
    ("And", 2): ("∧", PREC_AND, "right"),
    ("Or", 2): ("∨", PREC_OR, "right"),
    ("Iff", 2): ("↔", PREC_IFF, "right"),
    ("AddCommGroup.add", 2): ("+", PREC_ADDSUB, "left"),
    ("AddCommGroup.sub", 2): ("-", PREC_ADDSUB, "left"),
    ("Ring.mul", 2): ("*", PREC_MUL, "left"),
    ("Module.smul", 2): ("•", PREC_SMUL, "right"),
}

# set-former constants displayed with `∈`: name -> number of set-former
# explicit args (one more explicit arg is the member)
_MEM_DISPLAY = {"Module.End.eigenspace": 2}

_COERCION_APPS = {"LinearMap.app"}


def _fresh_name(base: str, used: set[str]) -> str:
    name = base if base else "_"
    while name in used:
        name += "†"
    return name


class Printer:
    def __init__(self, env: Environment, mvar_names=None, mvar_heads=None):
        self.env = env
        self.mvar_names = mvar_names or {}
        # mvar id -> head constant of its type, for dot-notation display
        self.mvar_heads = mvar_heads or {}

    # -- public API ----------------------------------------------------------

    def term(self, t: Term, names: dict[int, str] | None = None) -> str:
        names = dict(names) if names else {}
        used = set(names.values())
        return self._pp(t, PREC_MIN, names, used)

    # -- helpers -------------------------------------------------------------

    def _mvar_str(self, m: MVar) -> str:
        return "?" + str(self.mvar_names.get(m.id, f"m{m.id}"))

    def _arg_modes(self, name: str, n: int) -> list[str]:
        d = self.env.find(name)
        modes: list[str] = []
        if d is not None:
            t = d.type
            while len(modes) < n and isinstance(t, Pi):
                modes.append(t.mode)
                t = t.body
        while len(modes) < n:
            modes.append(EXPLICIT)
        return modes

    def _pp(self, t: Term, prec: int, names, used) -> str:
        if isinstance(t, Sort):
            return "Prop" if t.level == PROP else "Type"
        if isinstance(t, Var):
            return f"#{t.idx}"
        if isinstance(t, FVar):
            return names.get(t.id, f"_fvar{t.id}")
        if isinstance(t, MVar):
            return self._mvar_str(t)
        if isinstance(t, Const):
            s = self._pp_const_app(t.name, [], [], prec, names, used)
            return s if s is not None else t.name
        if isinstance(t, Pi):
            return self._pp_pi(t, prec, names, used)
        if isinstance(t, Lam):
            return self._pp_lam(t, prec, names, used)
        if isinstance(t, App):
            return self._pp_app(t, prec, names, used)
        raise AssertionError(f"unprintable term {t!r}")

    def _paren(self, s: str, node_prec: int, prec: int) -> str:
        return f"({s})" if node_prec < prec else s

    def _pp_pi(self, t: Pi, prec: int, names, used) -> str:
        # non-dependent explicit Pi prints as an arrow
        if t.mode == EXPLICIT and not has_loose_var(t.body):
            lhs = self._pp(t.ty, PREC_ARROW + 1, names, used)
            rhs = self._pp_arrow_rhs(t.body, names, used)
            return self._paren(f"{lhs} → {rhs}", PREC_ARROW, prec)
        # quantifier: group consecutive binders of identical type and mode
        from .terms import fresh_fvar

        def wants_forall(p: Pi) -> bool:
            return p.mode != EXPLICIT or has_loose_var(p.body)

        group_names: list[str] = []
        cur: Term = t
        names = dict(names)
        used = set(used)
        first_ty, first_mode = t.ty, t.mode
        while (isinstance(cur, Pi) and cur.mode == first_mode
               and alpha_eq(cur.ty, first_ty)
               and (cur is t or wants_forall(cur))):
            fv = fresh_fvar()
            nm = _fresh_name(cur.name, used)
            names[fv.id] = nm
            used.add(nm)
            group_names.append(nm)
            cur = instantiate(cur.body, fv)
        ty_s = self._pp(first_ty, PREC_MIN, names, used)
        binder = " ".join(group_names)
        if first_mode == IMPLICIT:
            head = f"∀ {{{binder} : {ty_s}}}"
        elif first_mode == INSTANCE:
            head = f"∀ [{binder} : {ty_s}]"
        else:
            head = f"∀ ({binder} : {ty_s})"
        body_s = self._pp(cur, PREC_MIN, names, used)
        return self._paren(f"{head}, {body_s}", PREC_QUANT, prec)

    def _pp_arrow_rhs(self, body: Term, names, used) -> str:
        # body has no loose Var 0; shift it back down by instantiating
        from .terms import fresh_fvar
        fv = fresh_fvar()
        return self._pp(instantiate(body, fv), PREC_ARROW, names, used)

    def _pp_lam(self, t: Lam, prec: int, names, used) -> str:
        names = dict(names)
        used = set(used)
        parts: list[str] = []
        cur: Term = t
        while isinstance(cur, Lam):
            from .terms import fresh_fvar
            fv = fresh_fvar()
            nm = _fresh_name(cur.name, used)
            names[fv.id] = nm
            used.add(nm)
            ty_s = self._pp(cur.ty, PREC_MIN, names, used)
            parts.append(f"({nm} : {ty_s})")
            cur = instantiate(cur.body, fv)
        body_s = self._pp(cur, PREC_MIN, names, used)
        return self._paren(f"fun {' '.join(parts)} => {body_s}", PREC_QUANT, prec)

    def _pp_app(self, t: App, prec: int, names, used) -> str:
        head, args = app_spine(t)
        if isinstance(head, Const):
            modes = self._arg_modes(head.name, len(args))
            explicit = [a for a, m in zip(args, modes) if m == EXPLICIT]
            s = self._pp_const_app(head.name, explicit, args, prec, names, used)
            if s is not None:
                return s
        # generic application
        fn_s = self._pp(head, PREC_APP, names, used)
        parts = [fn_s] + [self._pp(a, PREC_APP + 1, names, used) for a in args]
        return self._paren(" ".join(parts), PREC_APP, prec)

    def _pp_const_app(self, name, explicit, all_args, prec, names, used):
        n = len(explicit)
        key = (name, n)
        if key in _INFIX:
            sym, p, assoc = _INFIX[key]
            lp = p if assoc == "left" else p + 1
            rp = p if assoc == "right" else p + 1
            lhs = self._pp(explicit[0], lp, names, used)
            rhs = self._pp(explicit[1], rp, names, used)
            return self._paren(f"{lhs} {sym} {rhs}", p, prec)
        if name == "Not" and n == 1:
            arg = self._pp(explicit[0], PREC_NOT, names, used)
            return self._paren(f"¬{arg}", PREC_NOT, prec)
        if name == "AddCommGroup.neg" and n == 1:
            arg = self._pp(explicit[0], PREC_NEGATE, names, used)
            return self._paren(f"-{arg}", PREC_NEGATE, prec)
        if name == "Zero.zero" and n == 0:
            return "0"
        if name == "LinearMap" and n == 3:
            r = self._pp(explicit[0], PREC_MIN, names, used)
            a = self._pp(explicit[1], PREC_ARROW + 1, names, used)
            b = self._pp(explicit[2], PREC_ARROW, names, used)
            return self._paren(f"{a} →ₗ[{r}] {b}", PREC_ARROW, prec)
        if name in _COERCION_APPS and n == 2:
            f_s = self._pp(explicit[0], PREC_APP, names, used)
            a_s = self._pp(explicit[1], PREC_APP + 1, names, used)
            return self._paren(f"{f_s} {a_s}", PREC_APP, prec)
        if name in _MEM_DISPLAY and n == _MEM_DISPLAY[name] + 1:
            member = self._pp(explicit[-1], PREC_CMP + 1, names, used)
            former = [name] + [self._pp(a, PREC_APP + 1, names, used)
                               for a in explicit[:-1]]
            return self._paren(f"{member} ∈ {' '.join(former)}", PREC_CMP, prec)
        if ("." in name and n >= 1 and isinstance(explicit[0], MVar)
                and self.mvar_heads.get(explicit[0].id)
                    == name.rsplit(".", 1)[0]):
            recv = self._mvar_str(explicit[0])
            short = name.rsplit(".", 1)[1]
            parts = [f"{recv}.{short}"] + [self._pp(a, PREC_APP + 1, names, used)
                                           for a in explicit[1:]]
            return self._paren(" ".join(parts), PREC_APP, prec)
        if n == 0:
            return name
        parts = [name] + [self._pp(a, PREC_APP + 1, names, used) for a in explicit]
        return self._paren(" ".join(parts), PREC_APP, prec)


def pp_term(env: Environment, t: Term, names: dict[int, str] | None = None,
            mvar_names=None, mvar_heads=None) -> str:
    return Printer(env, mvar_names, mvar_heads).term(t, names)


def ctx_name_map(ctx: LocalContext) -> dict[int, str]:
    """Display names for a local context, daggering collisions."""
    names: dict[int, str] = {}
    used: set[str] = set()
    for e in ctx.entries:
        nm = _fresh_name(e.name, used)
        names[e.fvar_id] = nm
        used.add(nm)
    return names


def render_goal(env: Environment, ctx: LocalContext, target: Term,
                mvar_names=None, mvar_heads=None) -> str:
    """One goal: grouped hypothesis lines, then the `⊢` line.

    Instance-implicit entries are hidden; a hidden entry still breaks a
    grouping run, so like-typed names are merged only when truly adjacent.
    """
    printer = Printer(env, mvar_names, mvar_heads)
    names = ctx_name_map(ctx)
    lines: list[str] = []
    run_names: list[str] = []
    run_type: Term | None = None
    run_type_str = ""

    def flush():
        nonlocal run_names, run_type
        if run_names:
            lines.append(f"{' '.join(run_names)} : {run_type_str}")
        run_names, run_type = [], None

    for e in ctx.entries:
        if e.mode == INSTANCE:
            flush()
            continue
        if run_type is not None and alpha_eq(e.type, run_type):
            run_names.append(names[e.fvar_id])
        else:
            flush()
            run_names = [names[e.fvar_id]]
            run_type = e.type
            run_type_str = printer.term(e.type, names)
    flush()
    lines.append("⊢ " + printer.term(target, names))
    return "\n".join(lines)


def render_goals(env: Environment, goals, mvar_names=None,
                 mvar_heads=None) -> str:
    """Render a list of (ctx, target) pairs; `no goals` when empty."""
    goals = list(goals)
    if not goals:
        return "no goals"
    if len(goals) == 1:
        ctx, target = goals[0]
        return render_goal(env, ctx, target, mvar_names, mvar_heads)
    blocks = []
    for i, (ctx, target) in enumerate(goals, 1):
        blocks.append(f"goal {i} of {len(goals)}\n"
                      + render_goal(env, ctx, target, mvar_names, mvar_heads))
    return "\n\n".join(blocks)


# --- surface-tree printing (round-trip support) -----------------------------

_SURFACE_PREC = {
    "↔": (PREC_IFF, "right"),
    "→": (PREC_ARROW, "right"),
    "∨": (PREC_OR, "right"),
    "∧": (PREC_AND, "right"),
    "=": (PREC_CMP, "none"),
    "≠": (PREC_CMP, "none"),
    "∈": (PREC_CMP, "none"),
    "+": (PREC_ADDSUB, "left"),
    "-": (PREC_ADDSUB, "left"),
    "*": (PREC_MUL, "left"),
    "•": (PREC_SMUL, "right"),
}


def print_surface(stx) -> str:
    return _ps(stx, PREC_MIN)


def _ps_paren(s: str, node_prec: int, prec: int) -> str:
    return f"({s})" if node_prec < prec else s


def _ps(stx, prec: int) -> str:
    from . import sast as S
    if isinstance(stx, S.SIdent):
        return stx.name
    if isinstance(stx, S.SZero):
        return "0"
    if isinstance(stx, S.SSort):
        return stx.level
    if isinstance(stx, S.SApp):
        s = f"{_ps(stx.fn, PREC_APP)} {_ps(stx.arg, PREC_APP + 1)}"
        return _ps_paren(s, PREC_APP, prec)
    if isinstance(stx, S.SBinOp):
        p, assoc = _SURFACE_PREC[stx.op]
        lp = p if assoc == "left" else p + 1
        rp = p if assoc == "right" else p + 1
        s = f"{_ps(stx.lhs, lp)} {stx.op} {_ps(stx.rhs, rp)}"
        return _ps_paren(s, p, prec)
    if isinstance(stx, S.SNeg):
        inner = _ps(stx.arg, PREC_NEGATE)
        # a space keeps nested negation from lexing as a `--` comment
        sep = " " if inner.startswith("-") else ""
        return _ps_paren(f"-{sep}{inner}", PREC_NEGATE, prec)
    if isinstance(stx, S.SNot):
        return _ps_paren(f"¬{_ps(stx.arg, PREC_NOT)}", PREC_NOT, prec)
    if isinstance(stx, S.SLinArrow):
        s = (f"{_ps(stx.src, PREC_ARROW + 1)} →ₗ[{_ps(stx.ring, PREC_MIN)}] "
             f"{_ps(stx.dst, PREC_ARROW)}")
        return _ps_paren(s, PREC_ARROW, prec)
    if isinstance(stx, S.SAscribe):
        return f"({_ps(stx.term, PREC_MIN)} : {_ps(stx.type, PREC_MIN)})"
    if isinstance(stx, S.SForall):
        s = f"∀ {_ps_binders(stx.binders)}, {_ps(stx.body, PREC_MIN)}"
        return _ps_paren(s, PREC_QUANT, prec)
    if isinstance(stx, S.SFun):
        s = f"fun {_ps_binders(stx.binders)} => {_ps(stx.body, PREC_MIN)}"
        return _ps_paren(s, PREC_QUANT, prec)
    raise AssertionError(f"unprintable surface node {stx!r}")


def _ps_binders(binders) -> str:
    parts = []
    for b in binders:
        names = " ".join(b.names)
        if b.type is None:
            parts.append(names)
        else:
            ty = _ps(b.type, PREC_MIN)
            brackets = {"explicit": "()", "implicit": "{}",
                        "instanceImplicit": "[]"}[b.mode]
            parts.append(f"{brackets[0]}{names} : {ty}{brackets[1]}")
    return " ".join(parts)


def surface_equal(a, b) -> bool:
    """Structural equality of surface trees ignoring spans."""
    from . import sast as S
    if type(a) is not type(b):
        return False
    if isinstance(a, (tuple, list)):
        return len(a) == len(b) and all(surface_equal(x, y) for x, y in zip(a, b))
    if isinstance(a, S.Binder):
        return (a.names == b.names and a.mode == b.mode
                and surface_equal(a.type, b.type))
    if isinstance(a, S.SyntaxNode):
        for f in a.__dataclass_fields__:
            if f in ("span", "kind"):
                continue
            if not surface_equal(getattr(a, f), getattr(b, f)):
                return False
        return True
    return a == b
