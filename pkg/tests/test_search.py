"""Search tests: the head-indexed `exact?` lemma search and name search."""

import pytest

from microproof.prelude import MANIFEST
from microproof.search import HeadIndex, _split_name, exact_search, name_search

from helpers import IMPORT, check, errors

STRENGTH_HDR = IMPORT + (
    "variable {R M : Type} [CommRing R] [AddCommGroup M] [Module R M]\n"
    "  [NoZeroSMulDivisors R M]\n")


@pytest.fixture(scope="module")
def lib(env):
    """Environment with the whole library visible (as the CLI sees it)."""
    return env.with_imports(set(MANIFEST))


class TestHeadIndex:
    def test_indexes_by_conclusion_head(self, lib):
        idx = HeadIndex.build(lib)
        assert "LinearIndependent" in idx.by_head
        assert ("Module.End.eigenvectors_linearIndependent'"
                in idx.by_head["LinearIndependent"])

    def test_iff_lemmas_get_projections(self, lib):
        idx = HeadIndex.build(lib)
        assert "Module.End.mem_eigenspace_iff" in idx.by_head.get("Iff", [])
        names = [n for ns in idx.by_head.values() for n in ns]
        assert "Module.End.mem_eigenspace_iff.mpr" in names
        assert "Module.End.mem_eigenspace_iff.mp" in names


class TestExactSearch:
    def test_membership_goal_top_suggestion(self, env):
        captured = []
        import microproof.search as search_mod
        orig = search_mod.exact_search

        def spy(*a, **kw):
            out = orig(*a, **kw)
            captured.append([t for t, _ in out])
            return out

        search_mod.exact_search = spy
        try:
            res = check(env, STRENGTH_HDR +
                        "example {ι : Type} (f : M →ₗ[R] M) (μ : ι → R)\n"
                        "    (v : ι → M) (hv : ∀ i, v i ≠ 0)\n"
                        "    (h : ∀ i, f (v i) = μ i • v i) (i : ι) :\n"
                        "    v i ∈ Module.End.eigenspace f (μ i) := by\n"
                        "  exact?\n")
        finally:
            search_mod.exact_search = orig
        assert res.ok
        assert captured[0][0] == \
            "exact Module.End.mem_eigenspace_iff.mpr (h i)"

    def test_hypothesis_applied_to_variable(self, env):
        captured = []
        import microproof.search as search_mod
        orig = search_mod.exact_search

        def spy(*a, **kw):
            out = orig(*a, **kw)
            captured.append([t for t, _ in out])
            return out

        search_mod.exact_search = spy
        try:
            res = check(env, STRENGTH_HDR +
                        "example {ι : Type} (v : ι → M)\n"
                        "    (hv : ∀ i, v i ≠ 0) (i : ι) : v i ≠ 0 := by\n"
                        "  exact?\n")
        finally:
            search_mod.exact_search = orig
        assert res.ok
        assert captured[0][0] == "exact hv i"

    def test_plain_hypothesis_ranks_first(self, env):
        res = check(env, IMPORT +
                    "example (p : Prop) (hp : p) : p := by exact?\n")
        assert res.ok

    def test_no_result_is_an_error(self, env):
        res = check(env, IMPORT + "axiom P : Prop\n"
                    "example : P := by exact?\n")
        errs = errors(res)
        assert errs and errs[0].message == "exact?: no applicable lemma found"

    def test_suggestions_are_kernel_certified(self, lib, env):
        from microproof.kernel import def_eq, infer_type
        res = check(env, STRENGTH_HDR +
                    "example {ι : Type} (v : ι → M)\n"
                    "    (hv : ∀ i, v i ≠ 0) (i : ι) : v i ≠ 0 := by\n"
                    "  have hvi := hv i\n"
                    "  sorry\n")
        engine, goals = res.snapshots[0].live
        g = goals[0]
        target = engine.mctx.instantiate_mvars(g.target)
        out = exact_search(engine.env, engine.display_ctx(g.ctx), target)
        assert out
        for _, proof in out:
            inferred = infer_type(engine.env, engine.display_ctx(g.ctx),
                                  proof)
            assert def_eq(engine.env, inferred, target)


class TestNameSearch:
    def test_flagship_queries(self, lib):
        names = [n for n, _ in name_search(lib, "linear independent")]
        assert "LinearIndependent" in names
        assert "Module.End.eigenvectors_linearIndependent'" in names

    def test_word_prefix_matching(self, lib):
        names = [n for n, _ in name_search(lib, "eigenvector linear independent")]
        assert names == ["Module.End.eigenvectors_linearIndependent'"]

    def test_case_insensitive(self, lib):
        assert name_search(lib, "LINEAR independent")
        assert [n for n, _ in name_search(lib, "linear independent")] == \
            [n for n, _ in name_search(lib, "LINEAR independent")]

    def test_all_words_must_match(self, lib):
        assert name_search(lib, "linear zzzz") == []

    def test_results_in_environment_order(self, lib):
        names = [n for n, _ in name_search(lib, "add")]
        order = {d.name: i for i, d in enumerate(lib.decls)}
        assert names == sorted(names, key=lambda n: order[n])

    def test_internal_names_hidden(self, lib):
        assert all(not n.startswith("_")
                   for n, _ in name_search(lib, ""))

    def test_signatures_rendered(self, lib):
        results = dict(name_search(lib, "map add"))
        assert "map_add" in results
        assert "f (v + w) = f v + f w" in results["map_add"]

    def test_split_name(self):
        assert _split_name("Module.End.eigenvectors_linearIndependent'") == [
            "module", "end", "eigenvectors", "linear", "independent"]
