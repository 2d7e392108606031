"""Surface syntax trees (commands, term expressions, tactic expressions)."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import Span


@dataclass(frozen=True)
class SyntaxNode:
    kind: str
    span: Span


# --- term expressions -------------------------------------------------------

@dataclass(frozen=True)
class SIdent(SyntaxNode):
    name: str


@dataclass(frozen=True)
class SApp(SyntaxNode):
    fn: SyntaxNode
    arg: SyntaxNode


@dataclass(frozen=True)
class SBinOp(SyntaxNode):
    op: str  # = ≠ ∈ ∧ ∨ ↔ → + - * •
    lhs: SyntaxNode
    rhs: SyntaxNode


@dataclass(frozen=True)
class SNeg(SyntaxNode):
    arg: SyntaxNode


@dataclass(frozen=True)
class SNot(SyntaxNode):
    arg: SyntaxNode


@dataclass(frozen=True)
class SZero(SyntaxNode):
    pass


@dataclass(frozen=True)
class SAscribe(SyntaxNode):
    """`(e : T)`"""
    term: SyntaxNode
    type: SyntaxNode


@dataclass(frozen=True)
class SSort(SyntaxNode):
    level: str  # Prop | Type


@dataclass(frozen=True)
class SLinArrow(SyntaxNode):
    """`A →ₗ[R] B`"""
    ring: SyntaxNode
    src: SyntaxNode
    dst: SyntaxNode


@dataclass(frozen=True)
class SForall(SyntaxNode):
    binders: tuple["Binder", ...]
    body: SyntaxNode


@dataclass(frozen=True)
class SFun(SyntaxNode):
    binders: tuple["Binder", ...]
    body: SyntaxNode


@dataclass(frozen=True)
class Binder:
    names: tuple[str, ...]
    type: SyntaxNode | None
    mode: str  # explicit | implicit | instanceImplicit
    span: Span


# --- tactics ----------------------------------------------------------------

@dataclass(frozen=True)
class TacticAst(SyntaxNode):
    pass


@dataclass(frozen=True)
class TIntro(TacticAst):
    names: tuple[str, ...]


@dataclass(frozen=True)
class TExact(TacticAst):
    term: SyntaxNode


@dataclass(frozen=True)
class TApply(TacticAst):
    term: SyntaxNode


@dataclass(frozen=True)
class TConstructor(TacticAst):
    pass


@dataclass(frozen=True)
class TSwap(TacticAst):
    pass


@dataclass(frozen=True)
class TSorry(TacticAst):
    pass


@dataclass(frozen=True)
class TExactSearch(TacticAst):
    pass


@dataclass(frozen=True)
class TModule(TacticAst):
    pass


@dataclass(frozen=True)
class TRw(TacticAst):
    lemmas: tuple[tuple[SyntaxNode, bool], ...]  # (ref, reversed)


@dataclass(frozen=True)
class TSimp(TacticAst):
    extras: tuple[SyntaxNode, ...]
    all_hyps: bool = False


@dataclass(frozen=True)
class CalcStep:
    rhs: SyntaxNode
    justification: tuple[TacticAst, ...]
    span: Span


@dataclass(frozen=True)
class TCalc(TacticAst):
    first_lhs: SyntaxNode
    steps: tuple[CalcStep, ...]


@dataclass(frozen=True)
class THave(TacticAst):
    name: str  # defaults to "this"
    value: SyntaxNode | None  # term form
    calc: TCalc | None  # have := calc ...


@dataclass(frozen=True)
class TBullet(TacticAst):
    tactics: tuple[TacticAst, ...]


# --- commands ---------------------------------------------------------------

@dataclass(frozen=True)
class CommandAst(SyntaxNode):
    pass


@dataclass(frozen=True)
class Import(CommandAst):
    module_name: str


@dataclass(frozen=True)
class Variable(CommandAst):
    binders: tuple[Binder, ...]


@dataclass(frozen=True)
class Example(CommandAst):
    binders: tuple[Binder, ...]
    statement: SyntaxNode
    by_block: tuple[TacticAst, ...] | None
    term_proof: SyntaxNode | None = None
    attrs: tuple[str, ...] = ()


@dataclass(frozen=True)
class TheoremDecl(CommandAst):
    name: str
    binders: tuple[Binder, ...]
    statement: SyntaxNode
    by_block: tuple[TacticAst, ...] | None
    term_proof: SyntaxNode | None = None
    attrs: tuple[str, ...] = ()


@dataclass(frozen=True)
class DefDecl(CommandAst):
    name: str
    binders: tuple[Binder, ...]
    type: SyntaxNode
    body: SyntaxNode
    attrs: tuple[str, ...] = ()
    reducible: bool = False
    opaque: bool = False


@dataclass(frozen=True)
class AxiomDecl(CommandAst):
    name: str
    binders: tuple[Binder, ...]
    statement: SyntaxNode
    attrs: tuple[str, ...] = ()


@dataclass(frozen=True)
class AttributeCmd(CommandAst):
    attr: str
    target_name: str


def walk_tactics(tactics) -> list:
    """Flatten a tactic block into proof steps.

    A calc chain counts as one step per equation plus the tactics justifying
    it; bullets contribute themselves plus their bodies.
    """
    out: list = []
    for t in tactics:
        if isinstance(t, THave) and t.calc is not None:
            for step in t.calc.steps:
                out.append(step)
                out.extend(walk_tactics(step.justification))
        elif isinstance(t, TCalc):
            for step in t.steps:
                out.append(step)
                out.extend(walk_tactics(step.justification))
        elif isinstance(t, TBullet):
            out.append(t)
            out.extend(walk_tactics(t.tactics))
        else:
            out.append(t)
    return out
