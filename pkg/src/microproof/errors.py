"""Error hierarchy. Every user-facing failure carries an optional source span."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Span:
    start: int
    end: int
    line: int
    col: int
    end_line: int = 0
    end_col: int = 0

    def covers(self, offset: int) -> bool:
        return self.start <= offset <= self.end

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


DUMMY_SPAN = Span(0, 0, 1, 1, 1, 1)


class MicroProofError(Exception):
    """Base for all checker errors."""

    def __init__(self, message: str, span: Span | None = None):
        super().__init__(message)
        self.message = message
        self.span = span

    @property
    def kind(self) -> str:
        return type(self).__name__


# kernel
class UnboundVariable(MicroProofError):
    pass


class UnknownConstant(MicroProofError):
    pass


class AppTypeMismatch(MicroProofError):
    pass


class NotASort(MicroProofError):
    pass


class DuplicateName(MicroProofError):
    pass


class TypeMismatch(MicroProofError):
    pass


class KernelAssertion(MicroProofError):
    pass


# syntax
class InvalidCharacter(MicroProofError):
    pass


class ParseError(MicroProofError):
    pass


# elaborator
class UnknownIdentifier(MicroProofError):
    pass


class InstanceResolutionFailed(MicroProofError):
    pass


class InstanceDepthExceeded(MicroProofError):
    pass


class AmbiguousElaboration(MicroProofError):
    pass


class UnifyFailure(MicroProofError):
    pass


class OccursCheck(MicroProofError):
    pass


# tactics
class NoGoals(MicroProofError):
    pass


class IntroOnNonPi(MicroProofError):
    pass


class ApplyUnifyFailure(MicroProofError):
    pass


class ConstructorHeadUnknown(MicroProofError):
    pass


class BulletLeftGoalsOpen(MicroProofError):
    pass


class CalcChainBroken(MicroProofError):
    pass


class UnsolvedGoals(MicroProofError):
    def __init__(self, message: str, span: Span | None = None,
                 goal_render: str | None = None):
        super().__init__(message, span)
        self.goal_render = goal_render


# rewriter
class RwNoMatch(MicroProofError):
    pass


class RwMotiveIllTyped(MicroProofError):
    pass


class SimpStepBudgetExceeded(MicroProofError):
    pass


class SimpNoProgress(MicroProofError):
    pass


# module tactic
class NotModuleTyped(MicroProofError):
    pass


class ModuleNotEqual(MicroProofError):
    pass


class NonCommutativeScalars(MicroProofError):
    pass


# search
class SearchNoResult(MicroProofError):
    pass


class SearchTimeout(MicroProofError):
    pass


# driver
class UnknownModule(MicroProofError):
    pass


class ImportCycle(MicroProofError):
    pass
