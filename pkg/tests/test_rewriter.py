"""Rewrite-engine tests: rw, simp, simp_all — matching, congruence,
certification, tracing, and failure modes."""

from helpers import IMPORT, check, errors

HDR = IMPORT + "variable [Field K] [AddCommGroup V] [Module K V]\n"


class TestRw:
    def test_rw_with_library_lemma(self, env):
        res = check(env, HDR +
                    "example (f : V →ₗ[K] V) (v w : V) :\n"
                    "    f (v + w) = f v + f w := by rw [map_add]\n")
        assert res.ok

    def test_rw_chains_left_to_right(self, env):
        res = check(env, HDR +
                    "example (f : V →ₗ[K] V) (a b : K) (x y : V) :\n"
                    "    f (a • x) + f (b • y) = a • f x + b • f y := by\n"
                    "  rw [map_smul, map_smul]\n")
        assert res.ok

    def test_rw_with_hypothesis(self, env):
        res = check(env, HDR +
                    "example (f : V →ₗ[K] V) (x : V) (μ : K)\n"
                    "    (hx : f x = μ • x) : f x + f x = μ • x + μ • x := by\n"
                    "  rw [hx]\n")
        assert res.ok

    def test_rw_rewrites_all_occurrences_of_first_match(self, env):
        # both `f x` occurrences must be rewritten by a single `rw [hx]`
        res = check(env, HDR +
                    "example (f : V →ₗ[K] V) (x : V) (μ : K)\n"
                    "    (hx : f x = μ • x) : f x + f x = μ • x + μ • x := by\n"
                    "  rw [hx]\n")
        assert res.ok

    def test_rw_no_match_fails(self, env):
        res = check(env, HDR +
                    "example (a b : K) (h : a = b) : b = b := by rw [h]\n")
        errs = errors(res)
        assert errs and errs[0].kind == "RwNoMatch"

    def test_rw_closes_refl_goal(self, env):
        res = check(env, HDR +
                    "example (f : V →ₗ[K] V) (x : V) (μ : K)\n"
                    "    (hx : f x = μ • x) : f x = μ • x := by rw [hx]\n")
        assert res.ok


class TestSimp:
    def test_simp_uses_default_simp_set(self, env):
        res = check(env, HDR +
                    "example (x : V) : x + 0 = 0 + x := by simp\n")
        assert res.ok

    def test_simp_with_extra_rules(self, env):
        res = check(env, HDR +
                    "example (f : V →ₗ[K] V) (x y : V) (μ ν : K)\n"
                    "    (hx : f x = μ • x) (hy : f y = ν • y) :\n"
                    "    f (x + y) = μ • x + ν • y := by simp [hx, hy]\n")
        assert res.ok

    def test_simp_innermost_first_reaches_fixpoint(self, env):
        res = check(env, HDR +
                    "example (f : V →ₗ[K] V) (a : K) :\n"
                    "    f (a • (0 : V) + 0) = 0 := by simp\n")
        assert res.ok

    def test_simp_no_progress_fails(self, env):
        res = check(env, HDR +
                    "example (a b : K) (h : a = b) : a = b := by simp\n")
        errs = errors(res)
        assert errs and errs[0].kind == "SimpNoProgress"

    def test_simp_iff_goal(self, env):
        res = check(env, HDR +
                    "example (a : K) (x : V) (hx : ¬(x = 0)) :\n"
                    "    a • x = 0 ↔ a = 0 := by simp [hx]\n")
        assert res.ok

    def test_simp_propositional_layer(self, env):
        res = check(env, HDR +
                    "example (p : Prop) (hp : p) : (p ∧ True) ∨ False := by\n"
                    "  simp [hp]\n")
        assert res.ok

    def test_trace_simp_reports_rule_names(self, env):
        log = []
        res = check(env, HDR + "example (x : V) : x + 0 = x := by simp\n",
                    trace_simp=lambda name, before, after:
                        log.append((name, before, after)))
        assert res.ok
        assert any(name == "add_zero" for name, _, _ in log)

    def test_equation_hypothesis_used_left_to_right(self, env):
        res = check(env, HDR +
                    "example (x y : V) (hab : x + y = 0) :\n"
                    "    x + y = 0 := by simp [hab]\n")
        assert res.ok


class TestSimpAll:
    def test_simp_all_forward_chains_hypotheses(self, env):
        res = check(env, HDR +
                    "example (p q : Prop) (h1 : p) (h2 : p → q) : q := by\n"
                    "  simp_all\n")
        assert res.ok

    def test_simp_all_uses_other_hypotheses_not_own(self, env):
        res = check(env, HDR +
                    "example (a b : K) (h1 : a = b) (h2 : b = a) :\n"
                    "    a = b := by simp_all\n")
        assert res.ok

    def test_simp_all_with_extra_rule(self, env):
        res = check(env, HDR +
                    "example (a b : K) (h : a - b = 0) : a = b := by\n"
                    "  simp_all [sub_eq_zero]\n")
        assert res.ok

    def test_simp_all_negated_hypothesis_as_falsity(self, env):
        res = check(env, HDR +
                    "example (a : K) (x : V) (hx : x ≠ 0)\n"
                    "    (h : a • x = 0) : a = 0 := by simp_all\n")
        assert res.ok


class TestCertification:
    def test_rewrites_produce_kernel_checkable_proofs(self, env):
        # every accepted proof must re-infer to its statement
        from microproof.env import EMPTY_CTX
        from microproof.kernel import def_eq, infer_type
        res = check(env, HDR +
                    "example (f : V →ₗ[K] V) (x y : V) (μ ν : K)\n"
                    "    (hx : f x = μ • x) (hy : f y = ν • y) :\n"
                    "    f (x + y) = μ • x + ν • y := by simp [hx, hy]\n")
        assert res.ok and res.proofs
        stmt, proof = res.proofs[0]
        assert def_eq(res.env, infer_type(res.env, EMPTY_CTX, proof), stmt)
