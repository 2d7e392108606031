"""Session-server tests: the newline-delimited JSON protocol over an
in-process session and over a real TCP subprocess."""

import json
import socket
import subprocess
import sys

import pytest

from microproof.server import Session

from helpers import corpus

GOLDEN_STATE = """K : Type
V : Type
f : V →ₗ[K] V
μ ν : K
hμν : μ ≠ ν
x y : V
hx₀ : x ≠ 0
hy₀ : y ≠ 0
hx : f x = μ • x
hy : f y = ν • y
a b : K
hab : a • x + b • y = 0
⊢ a = 0 ∧ b = 0"""


@pytest.fixture()
def session(env):
    return Session(env)


def rpc(session, rid, method, **params):
    line = json.dumps({"id": rid, "method": method, "params": params})
    response, keep = session.handle_line(line)
    return response, keep


class TestDocuments:
    def test_open_checks_and_reports(self, session):
        r, keep = rpc(session, 1, "open", path="f.mpl",
                      text=corpus("flagship.mpl"), revision=1)
        assert keep
        assert r["result"] == {"revision": 1, "diagnostics": []}

    def test_change_bumps_revision(self, session):
        rpc(session, 1, "open", path="f.mpl", text=corpus("flagship.mpl"))
        r, _ = rpc(session, 2, "change", path="f.mpl",
                   text=corpus("flagship.mpl"))
        assert r["result"]["revision"] == 2

    def test_diagnostics_for_broken_document(self, session):
        broken = corpus("flagship.mpl").rsplit("\n", 2)[0] + "\n"
        r, _ = rpc(session, 1, "open", path="f.mpl", text=broken)
        diags = r["result"]["diagnostics"]
        assert len(diags) == 1 and diags[0]["kind"] == "UnsolvedGoals"
        r2, _ = rpc(session, 2, "diagnostics", path="f.mpl")
        assert r2["result"]["diagnostics"] == diags

    def test_unopened_document_is_an_error(self, session):
        r, keep = rpc(session, 1, "goalState", path="nope.mpl", line=1, col=1)
        assert keep and "not open" in r["error"]["message"]


class TestGoalState:
    def test_state_after_intro(self, session):
        rpc(session, 1, "open", path="f.mpl", text=corpus("flagship.mpl"))
        r, _ = rpc(session, 2, "goalState", path="f.mpl", line=11, col=18)
        assert r["result"]["render"] == GOLDEN_STATE
        assert r["result"]["goals"] == [GOLDEN_STATE]
        assert r["result"]["revision"] == 1
        assert "stale" not in r["result"]

    def test_no_goals_after_proof_end(self, session):
        rpc(session, 1, "open", path="f.mpl", text=corpus("flagship.mpl"))
        r, _ = rpc(session, 2, "goalState", path="f.mpl", line=19, col=25)
        assert r["result"]["goals"] == []

    def test_before_first_tactic_is_null(self, session):
        rpc(session, 1, "open", path="f.mpl", text=corpus("flagship.mpl"))
        r, _ = rpc(session, 2, "goalState", path="f.mpl", line=1, col=1)
        assert r["result"]["render"] is None

    def test_stale_revision_flagged(self, session):
        rpc(session, 1, "open", path="f.mpl", text=corpus("flagship.mpl"),
            revision=1)
        r, _ = rpc(session, 2, "goalState", path="f.mpl", line=11, col=18,
                   revision=7)
        assert r["result"]["stale"] is True
        assert r["result"]["revision"] == 1
        # the state itself is still the one computed for revision 1
        assert r["result"]["render"] == GOLDEN_STATE


class TestSearchAndSuggest:
    def test_search_method(self, session):
        r, _ = rpc(session, 1, "search", query="eigenvector")
        names = [x["name"] for x in r["result"]["results"]]
        assert "Module.End.eigenvectors_linearIndependent'" in names
        assert all("signature" in x for x in r["result"]["results"])

    def test_suggest_at_open_goal(self, session):
        truncated = "\n".join(
            corpus("strengthened_messy.mpl").splitlines()[:16]) + "\n"
        rpc(session, 1, "open", path="s.mpl", text=truncated)
        r, _ = rpc(session, 2, "suggest", path="s.mpl", line=16, col=14)
        assert r["result"]["suggestions"][0] == \
            "exact Module.End.mem_eigenspace_iff.mpr (h i)"

    def test_suggest_with_no_goal_is_empty(self, session):
        rpc(session, 1, "open", path="f.mpl", text=corpus("flagship.mpl"))
        r, _ = rpc(session, 2, "suggest", path="f.mpl", line=19, col=25)
        assert r["result"]["suggestions"] == []


class TestProtocolErrors:
    def test_unknown_method(self, session):
        r, keep = rpc(session, 5, "frobnicate")
        assert keep and r["id"] == 5
        assert "unknown method" in r["error"]["message"]

    def test_bad_json(self, session):
        r, keep = session.handle_line("this is not json")
        assert keep and "bad JSON" in r["error"]["message"]

    def test_missing_params(self, session):
        r, keep = rpc(session, 6, "open")
        assert keep and "bad request" in r["error"]["message"]

    def test_shutdown_stops_the_loop(self, session):
        r, keep = rpc(session, 7, "shutdown")
        assert r == {"id": 7, "result": {}} and not keep


class TestTcpServer:
    def test_round_trip_over_tcp(self):
        proc = subprocess.Popen(
            [sys.executable, "-m", "microproof.cli", "serve", "--port", "0"],
            stdout=subprocess.PIPE, text=True)
        try:
            banner = proc.stdout.readline().strip()
            assert banner.startswith("listening on 127.0.0.1:")
            port = int(banner.rsplit(":", 1)[1])
            with socket.create_connection(("127.0.0.1", port),
                                          timeout=60) as conn:
                rfile = conn.makefile("r", encoding="utf-8")
                wfile = conn.makefile("w", encoding="utf-8")

                def call(rid, method, **params):
                    wfile.write(json.dumps(
                        {"id": rid, "method": method, "params": params})
                        + "\n")
                    wfile.flush()
                    return json.loads(rfile.readline())

                r = call(1, "open", path="f.mpl",
                         text=corpus("flagship.mpl"))
                assert r["result"]["diagnostics"] == []
                r = call(2, "goalState", path="f.mpl", line=11, col=18)
                assert r["result"]["render"] == GOLDEN_STATE
                r = call(3, "shutdown")
                assert r == {"id": 3, "result": {}}
            assert proc.wait(timeout=60) == 0
        finally:
            proc.kill()
