"""Tactic engine tests: the structural tactics, goal bookkeeping, snapshots,
and failure modes."""

from helpers import IMPORT, check, errors, warnings

HDR = IMPORT + "variable [Field K] [AddCommGroup V] [Module K V]\n"

PQ = IMPORT + "axiom P : Prop\naxiom Q : Prop\naxiom hp : P\naxiom hq : Q\n"


class TestIntro:
    def test_intro_names_hypotheses(self, env):
        res = check(env, HDR +
                    "example : ∀ a b : K, a = b → b = a := by\n"
                    "  intro a b h\n"
                    "  exact Eq.symm h\n")
        assert res.ok

    def test_intro_on_non_pi_fails(self, env):
        res = check(env, PQ + "example : P := by intro h\n")
        errs = errors(res)
        assert errs and errs[0].kind == "IntroOnNonPi"


class TestExactApply:
    def test_exact_closes_goal(self, env):
        res = check(env, PQ + "example : P := by exact hp\n")
        assert res.ok

    def test_exact_wrong_type_fails(self, env):
        res = check(env, PQ + "example : P := by exact hq\n")
        assert not res.ok

    def test_apply_creates_premise_goals(self, env):
        res = check(env, PQ + "axiom imp : Q → P\n"
                    "example : P := by\n  apply imp\n  exact hq\n")
        assert res.ok

    def test_apply_unify_failure(self, env):
        res = check(env, PQ + "axiom imp : Q → P\n"
                    "example : Q := by apply imp\n")
        assert not res.ok


class TestConstructorSwap:
    def test_constructor_splits_and(self, env):
        res = check(env, PQ + "example : P ∧ Q := by\n"
                    "  constructor\n  exact hp\n  exact hq\n")
        assert res.ok

    def test_swap_exchanges_first_two_goals(self, env):
        res = check(env, PQ + "example : P ∧ Q := by\n"
                    "  constructor\n  swap\n  exact hq\n  exact hp\n")
        assert res.ok

    def test_swap_then_semicolon_chain(self, env):
        res = check(env, PQ + "example : P ∧ Q := by\n"
                    "  constructor\n  swap ; exact hq\n  exact hp\n")
        assert res.ok


class TestBullets:
    def test_bullet_focuses_one_goal(self, env):
        res = check(env, PQ + "example : P ∧ Q := by\n"
                    "  constructor\n  · exact hp\n  · exact hq\n")
        assert res.ok

    def test_bullet_must_close_its_goal(self, env):
        res = check(env, PQ + "example : P ∧ Q := by\n"
                    "  constructor\n  · sorry\n  · exact hq\n")
        # sorry closes it (with a warning), but an empty bullet cannot exist;
        # instead check a bullet that leaves the goal open
        res2 = check(env, PQ + "axiom R : Prop\n"
                     "example : (P ∧ Q) ∧ R := by\n"
                     "  constructor\n  · constructor\n  sorry\n")
        errs = errors(res2)
        assert errs and errs[0].kind == "BulletLeftGoalsOpen"
        assert res.ok and warnings(res)


class TestHave:
    def test_have_adds_hypothesis(self, env):
        res = check(env, HDR +
                    "example (a b : K) (h : a - b = 0) : a = b := by\n"
                    "  have hab := Iff.mp sub_eq_zero h\n"
                    "  exact hab\n")
        assert res.ok

    def test_anonymous_have_is_named_this(self, env):
        src = HDR + ("example (a b : K) (h : a - b = 0) : a = b := by\n"
                     "  have := Iff.mp sub_eq_zero h\n"
                     "  exact this\n")
        res = check(env, src)
        assert res.ok
        assert any("this :" in s.render_after for s in res.snapshots)


class TestCalc:
    def test_calc_chains_by_transitivity(self, env):
        res = check(env, HDR +
                    "example (a b c : K) (h1 : a = b) (h2 : b = c) :\n"
                    "    a = c := by\n"
                    "  calc a = b := by exact h1\n"
                    "    _ = c := by exact h2\n")
        assert res.ok

    def test_calc_first_lhs_must_match_goal(self, env):
        res = check(env, HDR +
                    "example (a b : K) (h1 : a = b) : a = b := by\n"
                    "  calc b = a := by exact Eq.symm h1\n")
        assert not res.ok

    def test_calc_step_justification_must_close(self, env):
        res = check(env, HDR +
                    "example (a b : K) (h1 : a = b) : a = b := by\n"
                    "  calc a = b := by constructor\n")
        errs = errors(res)
        assert errs


class TestSorry:
    def test_sorry_closes_goal_with_warning(self, env):
        res = check(env, PQ + "example : P := by sorry\n")
        assert res.ok
        ws = warnings(res)
        assert len(ws) == 1 and "uses sorry" in ws[0].message

    def test_sorry_with_no_goals_is_error(self, env):
        res = check(env, PQ + "example : P := by\n  exact hp\n  sorry\n")
        errs = errors(res)
        assert errs and errs[0].message == "nothing to be sorry about"


class TestUnsolvedGoals:
    def test_open_goal_reports_render(self, env):
        res = check(env, PQ + "example : P ∧ Q := by constructor\n")
        errs = errors(res)
        assert len(errs) == 1 and errs[0].kind == "UnsolvedGoals"
        assert errs[0].goal_render is not None
        assert "⊢ P" in errs[0].goal_render and "⊢ Q" in errs[0].goal_render


class TestSnapshots:
    def test_one_snapshot_per_step_in_order(self, env):
        res = check(env, PQ + "example : P ∧ Q := by\n"
                    "  constructor\n  exact hp\n  exact hq\n")
        assert res.ok
        assert [len(s.goals) for s in res.snapshots] == [2, 1, 0]
        starts = [s.span_start for s in res.snapshots]
        assert starts == sorted(starts)

    def test_snapshot_render_matches_goal_list(self, env):
        res = check(env, PQ + "example : P ∧ Q := by\n"
                    "  constructor\n  exact hp\n  exact hq\n")
        snap = res.snapshots[0]
        assert snap.render_after.count("⊢") == 2
        assert snap.goals[0].endswith("⊢ P")
        assert snap.goals[1].endswith("⊢ Q")

    def test_live_state_records_engine_and_goals(self, env):
        res = check(env, PQ + "example : P ∧ Q := by constructor\n")
        engine, goals = res.snapshots[0].live
        open_goals = [g for g in goals
                      if not engine.mctx.is_assigned(g.mvar_id)]
        assert len(open_goals) == 2
