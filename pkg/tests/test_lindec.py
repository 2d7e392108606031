"""Linear-identity decision tests: polynomial normal forms, the `module`
tactic verdicts, and the certified equality proofs it emits."""

import random

from hypothesis import given, settings, strategies as st

from microproof.lindec import LinCombo, ScalarPoly, lincombo_equal, poly_equal

from helpers import IMPORT, check, errors

HDR = IMPORT + "variable [Field K] [AddCommGroup V] [Module K V]\n"
COMM_HDR = IMPORT + ("variable {R M : Type} [CommRing R] [AddCommGroup M] "
                     "[Module R M]\n")
RING_HDR = IMPORT + ("variable {R M : Type} [Ring R] [AddCommGroup M] "
                     "[Module R M]\n")


# --- ScalarPoly: the scalar arithmetic oracle -------------------------------

VARS = ["a", "b", "c", "d"]


def eval_poly(p: ScalarPoly, vals: dict[str, int]) -> int:
    total = 0
    for mono, coeff in p.coeffs.items():
        prod = coeff
        for v in mono:
            prod *= vals[v]
        total += prod
    return total


poly_exprs = st.recursive(
    st.sampled_from(VARS).map(ScalarPoly.atom)
    | st.just(ScalarPoly.zero()) | st.just(ScalarPoly.one()),
    lambda ch: st.one_of(
        st.builds(ScalarPoly.add, ch, ch),
        st.builds(ScalarPoly.mul, ch, ch),
        st.builds(ScalarPoly.neg, ch)),
    max_leaves=10)


class TestScalarPoly:
    @settings(max_examples=100, deadline=None)
    @given(poly_exprs, poly_exprs, st.integers(0, 2**31))
    def test_poly_equal_agrees_with_evaluation(self, p, q, seed):
        """Structural equality of normal forms must match semantic equality;
        on random integer points the two can only disagree when a nonzero
        polynomial vanishes by accident, which deterministic seeds avoid."""
        rng = random.Random(seed)
        diff = p.add(q.neg())
        if poly_equal(p, q):
            assert diff.is_zero()
            for _ in range(5):
                vals = {v: rng.randint(-50, 50) for v in VARS}
                assert eval_poly(p, vals) == eval_poly(q, vals)
        else:
            assert not diff.is_zero()

    @settings(max_examples=60, deadline=None)
    @given(poly_exprs, poly_exprs)
    def test_ring_laws(self, p, q):
        assert poly_equal(p.add(q), q.add(p))
        assert poly_equal(p.mul(q), q.mul(p))
        assert poly_equal(p.add(p.neg()), ScalarPoly.zero())
        assert poly_equal(p.mul(ScalarPoly.one()), p)
        assert poly_equal(p.mul(ScalarPoly.zero()), ScalarPoly.zero())

    @settings(max_examples=60, deadline=None)
    @given(poly_exprs, poly_exprs, poly_exprs)
    def test_distributivity(self, p, q, r):
        assert poly_equal(p.mul(q.add(r)), p.mul(q).add(p.mul(r)))

    def test_zero_coefficients_are_dropped(self):
        a = ScalarPoly.atom("a")
        assert a.add(a.neg()).coeffs == {}


class TestLinCombo:
    def test_atoms_in_first_occurrence_order(self):
        lc = LinCombo()
        lc.add_atom("y", None, ScalarPoly.one())
        lc.add_atom("x", None, ScalarPoly.one())
        lc.add_atom("y", None, ScalarPoly.one())
        assert list(lc.atoms) == ["y", "x"]

    def test_cancelling_atom_is_removed(self):
        lc = LinCombo()
        lc.add_atom("x", None, ScalarPoly.one())
        lc.add_atom("x", None, ScalarPoly.one().neg())
        assert "x" not in lc.combo

    def test_merge_and_equality(self):
        a, b = LinCombo(), LinCombo()
        a.add_atom("x", None, ScalarPoly.atom("a"))
        a.add_atom("y", None, ScalarPoly.atom("b"))
        b.add_atom("y", None, ScalarPoly.atom("b"))
        b.add_atom("x", None, ScalarPoly.atom("a"))
        assert lincombo_equal(a, b)
        b.add_atom("x", None, ScalarPoly.one())
        assert not lincombo_equal(a, b)


# --- the module tactic ------------------------------------------------------

class TestModuleTactic:
    def test_reflexive_goal(self, env):
        assert check(env, HDR +
                     "example (x : V) : x = x := by module\n").ok

    def test_commutes_summands(self, env):
        assert check(env, HDR +
                     "example (x y : V) (a b : K) :\n"
                     "    a • x + b • y = b • y + a • x := by module\n").ok

    def test_reassociates(self, env):
        assert check(env, HDR +
                     "example (x y z : V) :\n"
                     "    x + y + z = x + (y + z) := by module\n").ok

    def test_scalar_ladder_commutes(self, env):
        assert check(env, HDR +
                     "example (x : V) (a b : K) :\n"
                     "    a • b • x = b • a • x := by module\n").ok

    def test_distributes_and_cancels(self, env):
        assert check(env, HDR +
                     "example (x y : V) (a b : K) :\n"
                     "    (a + b) • (x + y) - b • (x + y) =\n"
                     "      a • x + a • y := by module\n").ok

    def test_flagship_calc_step(self, env):
        assert check(env, HDR +
                     "example (x y : V) (a b μ ν : K) :\n"
                     "    (μ - ν) • a • x =\n"
                     "      (a • μ • x + b • ν • y) -\n"
                     "      ν • (a • x + b • y) := by module\n").ok

    def test_unequal_sides_rejected_with_normal_forms(self, env):
        traces = []
        res = check(env, HDR +
                    "example (x : V) (a b : K) : a • x = b • x := by module\n",
                    trace_module=lambda l, r: traces.append((l, r)))
        errs = errors(res)
        assert errs and errs[0].kind == "ModuleNotEqual"
        assert "different normal forms" in errs[0].message
        assert traces == [("a • x", "b • x")]

    def test_commutativity_needed_but_unavailable(self, env):
        res = check(env, RING_HDR +
                    "example (x : M) (a b : R) :\n"
                    "    a • b • x = b • a • x := by module\n")
        errs = errors(res)
        assert errs and errs[0].kind == "NonCommutativeScalars"
        assert "Ring but not a CommRing" in errs[0].message

    def test_ring_scalars_ok_when_no_swap_needed(self, env):
        assert check(env, RING_HDR +
                     "example (x y : M) (a b : R) :\n"
                     "    a • x + b • y = b • y + a • x := by module\n").ok

    def test_non_module_goal_rejected(self, env):
        res = check(env, IMPORT + "axiom P : Prop\n"
                    "example (h : P) : P = P := by module\n")
        errs = errors(res)
        assert errs and errs[0].kind == "NotModuleTyped"

    def test_proof_is_kernel_certified(self, env):
        from microproof.env import EMPTY_CTX
        from microproof.kernel import def_eq, infer_type
        res = check(env, HDR +
                    "example (x y : V) (a b : K) :\n"
                    "    a • (x + y) + b • x = (a + b) • x + a • y := by\n"
                    "  module\n")
        assert res.ok
        stmt, proof = res.proofs[0]
        assert def_eq(res.env, infer_type(res.env, EMPTY_CTX, proof), stmt)

    def test_verdict_is_symmetric(self, env):
        lhs = "a • (x + y) + b • x"
        rhs = "(a + b) • x + a • y"
        for l, r in [(lhs, rhs), (rhs, lhs)]:
            assert check(env, HDR +
                         f"example (x y : V) (a b : K) :\n"
                         f"    {l} = {r} := by module\n").ok
