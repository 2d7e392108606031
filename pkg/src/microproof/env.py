"""Declarations, the environment, and local contexts."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace

from .errors import DuplicateName
from .terms import EXPLICIT, Term

AXIOM = "axiom"
DEFINITION = "definition"
THEOREM = "theorem"
EXAMPLE = "example"

REDUCIBLE = "reducible"
DEFAULT = "default"
OPAQUE = "opaque"


@dataclass(frozen=True)
class Declaration:
    name: str
    kind: str  # axiom | definition | theorem | example
    type: Term
    value: Term | None = None
    reducibility: str = DEFAULT
    attributes: frozenset[str] = frozenset()
    uses_sorry: bool = False
    module: str = "Init"


@dataclass
class Environment:
    """Ordered, append-only store of checked declarations.

    Immutable by convention after a file has been checked; `add` returns a new
    Environment sharing the underlying list up to the extension point.
    """

    decls: list[Declaration] = field(default_factory=list)
    by_name: dict[str, int] = field(default_factory=dict)
    simp_set: list[str] = field(default_factory=list)
    instance_set: list[str] = field(default_factory=list)
    import_closure: set[str] = field(default_factory=set)

    def find(self, name: str) -> Declaration | None:
        i = self.by_name.get(name)
        return self.decls[i] if i is not None else None

    def contains(self, name: str) -> bool:
        return name in self.by_name

    def add(self, d: Declaration) -> "Environment":
        if d.name in self.by_name:
            raise DuplicateName(f"declaration '{d.name}' already exists")
        env = Environment(
            decls=self.decls + [d],
            by_name=dict(self.by_name),
            simp_set=list(self.simp_set),
            instance_set=list(self.instance_set),
            import_closure=set(self.import_closure),
        )
        env.by_name[d.name] = len(env.decls) - 1
        if "simp" in d.attributes:
            env.simp_set.append(d.name)
        if "instance" in d.attributes:
            env.instance_set.append(d.name)
        return env

    def set_attribute(self, name: str, attr: str) -> "Environment":
        i = self.by_name[name]
        d = self.decls[i]
        env = Environment(
            decls=list(self.decls),
            by_name=dict(self.by_name),
            simp_set=list(self.simp_set),
            instance_set=list(self.instance_set),
            import_closure=set(self.import_closure),
        )
        env.decls[i] = replace(d, attributes=d.attributes | {attr})
        if attr == "simp" and name not in env.simp_set:
            env.simp_set.append(name)
        if attr == "instance" and name not in env.instance_set:
            env.instance_set.append(name)
        return env

    def with_imports(self, modules: set[str]) -> "Environment":
        env = Environment(
            decls=self.decls,
            by_name=self.by_name,
            simp_set=self.simp_set,
            instance_set=self.instance_set,
            import_closure=set(self.import_closure) | modules,
        )
        return env

    def visible(self, d: Declaration) -> bool:
        return d.module == "Init" or d.module in self.import_closure

    def hash(self) -> str:
        h = hashlib.sha256()
        for d in self.decls:
            h.update(repr((d.name, d.kind, d.type, d.value, d.reducibility,
                           sorted(d.attributes), d.uses_sorry, d.module)).encode())
        h.update(repr((self.simp_set, self.instance_set)).encode())
        return h.hexdigest()


@dataclass(frozen=True)
class CtxEntry:
    fvar_id: int
    name: str
    type: Term
    value: Term | None = None
    mode: str = EXPLICIT


class LocalContext:
    """Ordered free-variable context for elaboration and tactics."""

    def __init__(self, entries: tuple[CtxEntry, ...] = ()):
        self.entries = entries
        self._by_id = {e.fvar_id: e for e in entries}

    def extend(self, entry: CtxEntry) -> "LocalContext":
        return LocalContext(self.entries + (entry,))

    def lookup_id(self, fvar_id: int) -> CtxEntry | None:
        return self._by_id.get(fvar_id)

    def lookup_name(self, name: str) -> CtxEntry | None:
        # innermost binding wins
        for e in reversed(self.entries):
            if e.name == name:
                return e
        return None

    def replace_entry(self, fvar_id: int, new_entry: CtxEntry) -> "LocalContext":
        return LocalContext(tuple(new_entry if e.fvar_id == fvar_id else e
                                  for e in self.entries))

    def remove(self, fvar_id: int) -> "LocalContext":
        return LocalContext(tuple(e for e in self.entries if e.fvar_id != fvar_id))

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)


EMPTY_CTX = LocalContext()
