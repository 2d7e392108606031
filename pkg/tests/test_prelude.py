"""Library tests: manifest loading, attribute wiring, the simp-set coverage
invariant, and a minimality ablation."""

import shutil
from pathlib import Path

import pytest

from microproof.errors import MicroProofError
from microproof.prelude import (MANIFEST, import_resolve, load_prelude,
                                module_path, prelude_dir_from_flags)

from helpers import check, corpus, errors

PRELUDE_DIR = prelude_dir_from_flags()


class TestLoading:
    def test_all_manifest_modules_load(self, env):
        for module in MANIFEST:
            assert module_path(PRELUDE_DIR, module).exists()
        # key declarations from each module
        for name in ["Iff", "add_comm", "smul_smul", "map_add",
                     "Module.End.eigenspace",
                     "Module.End.eigenvectors_linearIndependent'"]:
            assert env.contains(name), name

    def test_declarations_carry_their_module(self, env):
        assert env.find("map_add").module == "MiniLib.LinearAlgebra.LinearMap"
        assert env.find("add_comm").module == "MiniLib.Algebra"

    def test_loading_is_deterministic(self):
        assert load_prelude().hash() == load_prelude().hash()

    def test_unknown_import_rejected(self, env):
        res = check(env, "import Mathlib.Nonexistent.Module\n")
        errs = errors(res)
        assert errs and "unknown module" in errs[0].message

    def test_import_brings_transitive_closure(self, env):
        # importing the top module makes everything below it visible
        res = check(env,
                    "import Mathlib.LinearAlgebra.LinearIndependent\n"
                    "example (p : Prop) (h : p ∧ True) : p := by\n"
                    "  simp_all\n")
        assert res.ok

    def test_without_import_library_is_hidden(self, env):
        res = check(env, "variable [Field K]\n"
                    "example (a b : K) : a * b = b * a := by\n"
                    "  exact mul_comm a b\n")
        assert not res.ok


class TestAttributes:
    def test_simp_set_contents(self, env):
        expected = {
            "eq_self_iff_true", "and_true", "true_and", "or_false",
            "false_or", "not_true", "ne_eq", "zero_add", "add_zero",
            "sub_self", "sub_zero", "zero_smul", "smul_zero", "smul_eq_zero",
            "map_add", "map_smul", "map_zero"}
        assert set(env.simp_set) == expected

    def test_instance_set_covers_hierarchy(self, env):
        for name in ["AddCommGroup.toZero", "Ring.toAddCommGroup",
                     "CommRing.toRing", "Field.toCommRing",
                     "Field.toNoZeroSMulDivisors"]:
            assert name in env.instance_set, name


class TestSimpCoverage:
    def test_every_simp_lemma_fires_in_coverage_corpus(self, env):
        fired = set()
        res = check(env, corpus("simp_coverage.mpl"),
                    trace_simp=lambda name, before, after: fired.add(name))
        assert res.ok
        missing = set(env.simp_set) - fired
        assert not missing, f"simp lemmas never exercised: {sorted(missing)}"


class TestAblation:
    @pytest.fixture()
    def ablated_env(self, tmp_path):
        """Prelude with the simp attribute removed from smul_eq_zero."""
        root = tmp_path / "prelude"
        shutil.copytree(PRELUDE_DIR, root)
        mod = root / "MiniLib" / "Module.mpl"
        text = mod.read_text(encoding="utf-8")
        assert "@[simp] axiom smul_eq_zero" in text
        mod.write_text(text.replace("@[simp] axiom smul_eq_zero",
                                    "axiom smul_eq_zero"),
                       encoding="utf-8")
        return load_prelude(root)

    def test_dropping_smul_eq_zero_breaks_the_flagship_proof(self,
                                                             ablated_env):
        res = check(ablated_env, corpus("flagship.mpl"))
        assert not res.ok

    def test_flagship_needs_each_default_simp_rule_it_traces(self, env):
        """The rules the flagship run actually uses are load-bearing: the
        ablation above shows it for the disjunction splitter; here record
        which default rules fire at all, to pin the dependency surface."""
        fired = set()
        res = check(env, corpus("flagship.mpl"),
                    trace_simp=lambda name, before, after: fired.add(name))
        assert res.ok
        assert {"ne_eq", "smul_eq_zero", "sub_eq_zero"} <= fired


class TestPreludeFailureSurface:
    def test_missing_prelude_dir_raises(self, tmp_path):
        with pytest.raises(MicroProofError):
            load_prelude(tmp_path / "nowhere")
