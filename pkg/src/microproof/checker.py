"""Command processing: turns parsed commands into checked declarations.

This is the shared pipeline behind prelude loading, `microproof check`, and
the session server: parse → elaborate → (tactics) → kernel check.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import sast as S
from .elab import (Elaborator, free_names, insert_autobound, select_variables)
from .env import (AXIOM, DEFAULT, Declaration, EMPTY_CTX, Environment, EXAMPLE,
                  DEFINITION, LocalContext, OPAQUE, REDUCIBLE, THEOREM)
from .errors import MicroProofError, Span
from .kernel import check_decl
from .terms import Lam, Pi, Term, abstract_fvar, has_mvar

_example_counter = itertools.count(1)


@dataclass
class Diagnostic:
    severity: str  # error | warning | info
    span: Span
    message: str
    kind: str = ""
    goal_render: str | None = None
    file: str | None = None

    def to_json(self) -> dict:
        return {
            "severity": self.severity,
            "span": {"start": self.span.start, "end": self.span.end,
                     "line": self.span.line, "col": self.span.col,
                     "endLine": self.span.end_line, "endCol": self.span.end_col},
            "message": self.message,
            "kind": self.kind,
            "goalRender": self.goal_render,
            "file": self.file,
        }


@dataclass
class StepSnapshot:
    """Tactic-state render captured after one proof step."""
    span_start: int
    span: Span
    render_after: str
    goals: list = field(default_factory=list)
    # live proof state for interactive queries: (engine, goal list)
    live: object = None


@dataclass
class CheckResult:
    env: Environment
    diagnostics: list[Diagnostic]
    snapshots: list[StepSnapshot]
    proofs: list[tuple[Term, Term]]  # (statement, proof term) of accepted proofs

    @property
    def ok(self) -> bool:
        return not any(d.severity == "error" for d in self.diagnostics)


class Checker:
    def __init__(self, env: Environment, module_name: str = "Main",
                 import_resolver=None, trace_simp=None, trace_module=None):
        # declarations made in this module are visible to later commands
        self.env = env.with_imports({module_name})
        self.module_name = module_name
        self.import_resolver = import_resolver
        self.trace_simp = trace_simp
        self.trace_module = trace_module
        self.var_binders: list[S.Binder] = []
        self.diagnostics: list[Diagnostic] = []
        self.snapshots: list[StepSnapshot] = []
        self.proofs: list[tuple[Term, Term]] = []

    def error(self, e: MicroProofError) -> None:
        self.diagnostics.append(Diagnostic(
            "error", e.span, e.message, e.kind,
            goal_render=getattr(e, "goal_render", None)))

    def warn(self, span: Span, message: str) -> None:
        self.diagnostics.append(Diagnostic("warning", span, message))

    def run(self, commands) -> CheckResult:
        for cmd in commands:
            try:
                self.process(cmd)
            except MicroProofError as e:
                self.error(e)
        return CheckResult(self.env, self.diagnostics, self.snapshots,
                           self.proofs)

    def process(self, cmd: S.CommandAst) -> None:
        if isinstance(cmd, S.Import):
            if self.import_resolver is None:
                raise MicroProofError(
                    f"cannot resolve import '{cmd.module_name}'", cmd.span)
            self.env = self.import_resolver(self.env, cmd.module_name,
                                            self.module_name, cmd.span)
            return
        if isinstance(cmd, S.Variable):
            known = {n for b in self.var_binders for n in b.names}
            self.var_binders.extend(
                insert_autobound(cmd.binders, self.env, known))
            return
        if isinstance(cmd, S.AttributeCmd):
            if not self.env.contains(cmd.target_name):
                raise MicroProofError(
                    f"unknown declaration '{cmd.target_name}'", cmd.span)
            self.env = self.env.set_attribute(cmd.target_name, cmd.attr)
            return
        if isinstance(cmd, (S.Example, S.TheoremDecl, S.DefDecl, S.AxiomDecl)):
            self.process_declaration(cmd)
            return
        raise MicroProofError(f"unhandled command {type(cmd).__name__}",
                              cmd.span)

    # -- declarations --------------------------------------------------------

    def _collect_used(self, own_binders, *stxs) -> set[str]:
        used: set[str] = set()
        bound: set[str] = set()
        for b in own_binders:
            if b.type is not None:
                used.update(n for n in free_names(b.type) if n not in bound)
            bound.update(b.names)
        for stx in stxs:
            if stx is not None:
                used.update(n for n in free_names(stx) if n not in bound)
        return used

    def process_declaration(self, cmd) -> None:
        var_names = {n for b in self.var_binders for n in b.names}
        own = insert_autobound(cmd.binders, self.env, set(var_names))

        if isinstance(cmd, S.DefDecl):
            used = self._collect_used(own, cmd.type, cmd.body)
        elif isinstance(cmd, S.AxiomDecl):
            used = self._collect_used(own, cmd.statement)
        else:
            used = self._collect_used(own, cmd.statement)
        selected = select_variables(self.var_binders, used)
        all_binders = list(selected) + list(own)

        el = Elaborator(self.env)
        ctx, entries = el.elab_binders(EMPTY_CTX, all_binders)

        def close_pi(t: Term) -> Term:
            t = el.mctx.instantiate_mvars(t)
            for e in reversed(entries):
                t = Pi(e.name, el.mctx.instantiate_mvars(e.type),
                       abstract_fvar(t, e.fvar_id), e.mode)
            return t

        def close_lam(t: Term) -> Term:
            t = el.mctx.instantiate_mvars(t)
            for e in reversed(entries):
                t = Lam(e.name, el.mctx.instantiate_mvars(e.type),
                        abstract_fvar(t, e.fvar_id), e.mode)
            return t

        if isinstance(cmd, S.DefDecl):
            ty = el.elaborate(ctx, cmd.type)
            body = el.elaborate(ctx, cmd.body, expected=ty)
            el.solve_pending(strict=True)
            decl_type, decl_value = close_pi(ty), close_lam(body)
            self._require_ground(decl_type, cmd.span)
            self._require_ground(decl_value, cmd.span)
            red = REDUCIBLE if cmd.reducible else (OPAQUE if cmd.opaque
                                                   else DEFAULT)
            d = Declaration(cmd.name, DEFINITION, decl_type, decl_value, red,
                            frozenset(cmd.attrs), False, self.module_name)
            self._install(d, cmd.span)
            return

        if isinstance(cmd, S.AxiomDecl):
            stmt = el.elaborate(ctx, cmd.statement)
            el.solve_pending(strict=True)
            decl_type = close_pi(stmt)
            self._require_ground(decl_type, cmd.span)
            d = Declaration(cmd.name, AXIOM, decl_type, None, DEFAULT,
                            frozenset(cmd.attrs), False, self.module_name)
            self._install(d, cmd.span)
            return

        # example / theorem
        stmt = el.elaborate(ctx, cmd.statement)
        el.solve_pending(strict=True)
        if cmd.term_proof is not None:
            proof = el.elaborate(ctx, cmd.term_proof,
                                 expected=el.mctx.instantiate_mvars(stmt))
            el.solve_pending(strict=True)
        elif cmd.by_block is not None:
            from .tactics import run_tactic_block
            proof = run_tactic_block(self, el, ctx, entries,
                                     el.mctx.instantiate_mvars(stmt),
                                     cmd.by_block, cmd.span)
        else:
            raise MicroProofError("declaration has no proof", cmd.span)
        decl_type, decl_value = close_pi(stmt), close_lam(proof)
        self._require_ground(decl_type, cmd.span)
        self._require_ground(decl_value, cmd.span)
        if isinstance(cmd, S.Example):
            name = f"_example_{next(_example_counter)}"
            kind = EXAMPLE
        else:
            name = cmd.name
            kind = THEOREM
        d = Declaration(name, kind, decl_type, decl_value, DEFAULT,
                        frozenset(cmd.attrs), False, self.module_name)
        self._install(d, cmd.span)
        self.proofs.append((decl_type, decl_value))

    def _require_ground(self, t: Term, span: Span) -> None:
        if has_mvar(t):
            raise MicroProofError(
                "elaboration left unresolved metavariables", span)

    def _install(self, d: Declaration, span: Span) -> None:
        self.env, warnings = check_decl(self.env, d)
        for w in warnings:
            self.warn(span, w)


def check_source(env: Environment, source: str, module_name: str = "Main",
                 import_resolver=None, trace_simp=None,
                 trace_module=None) -> CheckResult:
    from .parser import parse_file
    commands, parse_errors = parse_file(source)
    checker = Checker(env, module_name, import_resolver, trace_simp,
                      trace_module)
    for e in parse_errors:
        checker.error(e)
    return checker.run(commands)
