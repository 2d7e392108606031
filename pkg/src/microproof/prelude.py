"""The bundled mini-library: manifest, import resolution, prelude loading.

Prelude modules are plain `.mpl` sources compiled through the normal
parse/elaborate/kernel pipeline — there is no backdoor for installing
declarations.
"""

from __future__ import annotations

import os
from pathlib import Path

from .builtins import base_environment
from .env import Environment
from .errors import DUMMY_SPAN, ImportCycle, MicroProofError, Span, UnknownModule

MANIFEST = [
    "MiniLib.Logic",
    "MiniLib.Algebra",
    "MiniLib.Module",
    "MiniLib.LinearAlgebra.LinearMap",
    "MiniLib.LinearAlgebra.Eigenspace",
    "MiniLib.LinearAlgebra.LinearIndependent",
]

_DEFAULT_DIR = Path(__file__).parent / "prelude"

_module_closures: dict[str, set[str]] = {}


def _alias(module_name: str) -> str:
    if module_name.startswith("Mathlib."):
        return "MiniLib." + module_name[len("Mathlib."):]
    return module_name


def module_path(prelude_dir: Path, module_name: str) -> Path:
    return prelude_dir / (module_name.replace(".", os.sep) + ".mpl")


def import_resolve(env: Environment, module_name: str, current_module: str,
                   span: Span = DUMMY_SPAN) -> Environment:
    """Bring a loaded prelude module (transitively) into scope."""
    name = _alias(module_name)
    if name == current_module or module_name == current_module:
        raise ImportCycle(f"module '{current_module}' imports itself", span)
    closure = _module_closures.get(name)
    if closure is None:
        raise UnknownModule(f"unknown module '{module_name}'", span)
    return env.with_imports(set(closure))


def prelude_dir_from_flags(prelude_path: str | None = None) -> Path:
    if prelude_path:
        return Path(prelude_path)
    env_path = os.environ.get("MICROPROOF_PRELUDE")
    if env_path:
        return Path(env_path)
    return _DEFAULT_DIR


def load_prelude(prelude_dir: Path | None = None,
                 trace_simp=None) -> Environment:
    """Parse, elaborate and kernel-check all manifest modules in order."""
    from .checker import Checker
    from .parser import parse_file

    prelude_dir = prelude_dir or _DEFAULT_DIR
    env = base_environment()
    # a failed load must not clobber the closure registry that previously
    # loaded environments rely on for import resolution
    saved_closures = dict(_module_closures)
    try:
        for module in MANIFEST:
            path = module_path(prelude_dir, module)
            if not path.exists():
                raise UnknownModule(f"prelude module file missing: {path}")
            source = path.read_text(encoding="utf-8")
            commands, parse_errors = parse_file(source)
            if parse_errors:
                raise parse_errors[0]
            # restrict visibility to this module's declared imports
            scoped = Environment(env.decls, env.by_name, env.simp_set,
                                 env.instance_set, {module})
            checker = Checker(scoped, module_name=module,
                              import_resolver=import_resolve,
                              trace_simp=trace_simp)
            result = checker.run(commands)
            if result.diagnostics:
                d = result.diagnostics[0]
                raise MicroProofError(
                    f"prelude module {module} failed: {d.message}", d.span)
            closure = set(result.env.import_closure) | {module}
            _module_closures[module] = closure
            env = Environment(result.env.decls, result.env.by_name,
                              result.env.simp_set, result.env.instance_set,
                              set())
    except MicroProofError:
        _module_closures.clear()
        _module_closures.update(saved_closures)
        raise
    return env
