"""Kernel term representation.

Closed declaration bodies use de Bruijn indices (`Var`).  The tactic and
elaboration layers additionally use free variables (`FVar`) for local-context
entries and metavariables (`MVar`) for holes; kernel-accepted declarations
contain neither.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterator

PROP = "Prop"
TYPE = "Type"

EXPLICIT = "explicit"
IMPLICIT = "implicit"
INSTANCE = "instanceImplicit"


class Term:
    __slots__ = ()


@dataclass(frozen=True)
class Sort(Term):
    level: str  # PROP or TYPE


@dataclass(frozen=True)
class Var(Term):
    idx: int


@dataclass(frozen=True)
class FVar(Term):
    id: int


@dataclass(frozen=True)
class Const(Term):
    name: str


@dataclass(frozen=True)
class App(Term):
    fn: Term
    arg: Term


@dataclass(frozen=True)
class Lam(Term):
    name: str
    ty: Term
    body: Term
    mode: str = EXPLICIT


@dataclass(frozen=True)
class Pi(Term):
    name: str
    ty: Term
    body: Term
    mode: str = EXPLICIT


@dataclass(frozen=True)
class MVar(Term):
    id: int


SORT_PROP = Sort(PROP)
SORT_TYPE = Sort(TYPE)

_fvar_counter = itertools.count(1)
_mvar_counter = itertools.count(1)


def fresh_fvar() -> FVar:
    return FVar(next(_fvar_counter))


def fresh_mvar_id() -> int:
    return next(_mvar_counter)


def mk_app(fn: Term, *args: Term) -> Term:
    for a in args:
        fn = App(fn, a)
    return fn


def app_spine(t: Term) -> tuple[Term, list[Term]]:
    args: list[Term] = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fn
    args.reverse()
    return t, args


def shift(t: Term, d: int, cutoff: int = 0) -> Term:
    """Shift loose de Bruijn indices >= cutoff by d."""
    if d == 0:
        return t
    if isinstance(t, Var):
        return Var(t.idx + d) if t.idx >= cutoff else t
    if isinstance(t, App):
        return App(shift(t.fn, d, cutoff), shift(t.arg, d, cutoff))
    if isinstance(t, Lam):
        return Lam(t.name, shift(t.ty, d, cutoff), shift(t.body, d, cutoff + 1), t.mode)
    if isinstance(t, Pi):
        return Pi(t.name, shift(t.ty, d, cutoff), shift(t.body, d, cutoff + 1), t.mode)
    return t


def instantiate(t: Term, value: Term, depth: int = 0) -> Term:
    """Substitute `value` for Var(depth) in t (opening a binder body)."""
    if isinstance(t, Var):
        if t.idx == depth:
            return shift(value, depth)
        if t.idx > depth:
            return Var(t.idx - 1)
        return t
    if isinstance(t, App):
        return App(instantiate(t.fn, value, depth), instantiate(t.arg, value, depth))
    if isinstance(t, Lam):
        return Lam(t.name, instantiate(t.ty, value, depth), instantiate(t.body, value, depth + 1), t.mode)
    if isinstance(t, Pi):
        return Pi(t.name, instantiate(t.ty, value, depth), instantiate(t.body, value, depth + 1), t.mode)
    return t


def abstract_fvar(t: Term, fvar_id: int, depth: int = 0) -> Term:
    """Replace FVar(fvar_id) with Var(depth) (closing over a binder)."""
    if isinstance(t, FVar):
        return Var(depth) if t.id == fvar_id else t
    if isinstance(t, Var):
        return Var(t.idx + 1) if t.idx >= depth else t
    if isinstance(t, App):
        return App(abstract_fvar(t.fn, fvar_id, depth), abstract_fvar(t.arg, fvar_id, depth))
    if isinstance(t, Lam):
        return Lam(t.name, abstract_fvar(t.ty, fvar_id, depth), abstract_fvar(t.body, fvar_id, depth + 1), t.mode)
    if isinstance(t, Pi):
        return Pi(t.name, abstract_fvar(t.ty, fvar_id, depth), abstract_fvar(t.body, fvar_id, depth + 1), t.mode)
    return t


def replace_fvar(t: Term, fvar_id: int, value: Term) -> Term:
    """Substitute a term for a free variable (no binder adjustment needed)."""
    if isinstance(t, FVar):
        return value if t.id == fvar_id else t
    if isinstance(t, App):
        return App(replace_fvar(t.fn, fvar_id, value), replace_fvar(t.arg, fvar_id, value))
    if isinstance(t, Lam):
        return Lam(t.name, replace_fvar(t.ty, fvar_id, value), replace_fvar(t.body, fvar_id, value), t.mode)
    if isinstance(t, Pi):
        return Pi(t.name, replace_fvar(t.ty, fvar_id, value), replace_fvar(t.body, fvar_id, value), t.mode)
    return t


def subterms(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, App):
        yield from subterms(t.fn)
        yield from subterms(t.arg)
    elif isinstance(t, (Lam, Pi)):
        yield from subterms(t.ty)
        yield from subterms(t.body)


def has_mvar(t: Term) -> bool:
    return any(isinstance(s, MVar) for s in subterms(t))


def has_fvar(t: Term, fvar_id: int | None = None) -> bool:
    for s in subterms(t):
        if isinstance(s, FVar) and (fvar_id is None or s.id == fvar_id):
            return True
    return False


def has_loose_var(t: Term, below: int = 1, depth: int = 0) -> bool:
    """True if t mentions Var(i) with depth <= i < depth+below from outside."""
    if isinstance(t, Var):
        return depth <= t.idx < depth + below
    if isinstance(t, App):
        return has_loose_var(t.fn, below, depth) or has_loose_var(t.arg, below, depth)
    if isinstance(t, (Lam, Pi)):
        return has_loose_var(t.ty, below, depth) or has_loose_var(t.body, below, depth + 1)
    return False


def map_subterms(t: Term, f: Callable[[Term], Term]) -> Term:
    if isinstance(t, App):
        return App(f(t.fn), f(t.arg))
    if isinstance(t, Lam):
        return Lam(t.name, f(t.ty), f(t.body), t.mode)
    if isinstance(t, Pi):
        return Pi(t.name, f(t.ty), f(t.body), t.mode)
    return t


def term_size(t: Term) -> int:
    return sum(1 for _ in subterms(t))


def alpha_eq(t1: Term, t2: Term) -> bool:
    """Structural equality ignoring binder display names."""
    if t1 is t2:
        return True
    if type(t1) is not type(t2):
        return False
    if isinstance(t1, (Lam, Pi)):
        return t1.mode == t2.mode and alpha_eq(t1.ty, t2.ty) and alpha_eq(t1.body, t2.body)
    if isinstance(t1, App):
        return alpha_eq(t1.fn, t2.fn) and alpha_eq(t1.arg, t2.arg)
    return t1 == t2
