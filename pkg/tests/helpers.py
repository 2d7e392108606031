"""Shared helpers for the test suite."""

from pathlib import Path

from microproof.checker import check_source
from microproof.prelude import import_resolve

CORPUS = Path(__file__).parent / "corpus"

IMPORT = "import Mathlib.LinearAlgebra.LinearIndependent\n"


def check(env, source, **kw):
    return check_source(env, source, module_name="Main",
                        import_resolver=import_resolve, **kw)


def corpus(name: str) -> str:
    return (CORPUS / name).read_text(encoding="utf-8")


def errors(result):
    return [d for d in result.diagnostics if d.severity == "error"]


def warnings(result):
    return [d for d in result.diagnostics if d.severity == "warning"]
