"""The interactive session server.

Speaks newline-delimited JSON over stdio or TCP.  Requests are
`{"id": …, "method": …, "params": …}`; responses are `{"id": …, "result": …}`
or `{"id": …, "error": {"message": …}}`.  Methods:

- `open {path, text}` / `change {path, text, revision}`: (re)check a document
- `goalState {path, line, col [, revision]}`: tactic state at a position
- `diagnostics {path}`: current diagnostics
- `search {query}`: name search over the loaded library
- `suggest {path, line, col [, revision]}`: `exact?` suggestions at a position
- `shutdown`

Positions are 1-based lines and 1-based columns.  Every response about a
document carries the revision it was computed against; if a request names a
different revision, the response is additionally flagged `"stale": true`.
"""

from __future__ import annotations

import json
import socket
import sys
from dataclasses import dataclass, field

from .checker import CheckResult, check_source
from .env import Environment
from .errors import MicroProofError
from .prelude import MANIFEST, import_resolve


@dataclass
class Document:
    text: str
    revision: int
    result: CheckResult


@dataclass
class Session:
    env: Environment
    docs: dict[str, Document] = field(default_factory=dict)

    # -- document plumbing ---------------------------------------------------
    def _check(self, path: str, text: str, revision: int) -> Document:
        result = check_source(self.env, text, module_name="Main",
                              import_resolver=import_resolve)
        for d in result.diagnostics:
            d.file = path
        doc = Document(text, revision, result)
        self.docs[path] = doc
        return doc

    def _doc(self, path: str) -> Document:
        doc = self.docs.get(path)
        if doc is None:
            raise MicroProofError(f"document not open: {path}")
        return doc

    def _offset(self, doc: Document, line: int, col: int) -> int:
        lines = doc.text.split("\n")
        if line < 1:
            return 0
        pre = sum(len(l) + 1 for l in lines[: line - 1])
        return pre + max(col - 1, 0)

    def _snapshot_at(self, doc: Document, line: int, col: int):
        offset = self._offset(doc, line, col)
        best = None
        for snap in doc.result.snapshots:
            if snap.span_start <= offset:
                best = snap
        return best

    @staticmethod
    def _with_staleness(doc: Document, params: dict, result: dict) -> dict:
        result["revision"] = doc.revision
        req_rev = params.get("revision")
        if req_rev is not None and req_rev != doc.revision:
            result["stale"] = True
        return result

    # -- methods -------------------------------------------------------------
    def m_open(self, params: dict) -> dict:
        doc = self._check(params["path"], params["text"],
                          int(params.get("revision", 1)))
        return {"revision": doc.revision,
                "diagnostics": [d.to_json() for d in doc.result.diagnostics]}

    def m_change(self, params: dict) -> dict:
        old = self.docs.get(params["path"])
        revision = int(params.get(
            "revision", (old.revision + 1) if old else 1))
        doc = self._check(params["path"], params["text"], revision)
        return {"revision": doc.revision,
                "diagnostics": [d.to_json() for d in doc.result.diagnostics]}

    def m_goalState(self, params: dict) -> dict:
        doc = self._doc(params["path"])
        snap = self._snapshot_at(doc, int(params["line"]),
                                 int(params.get("col", 1)))
        if snap is None:
            out = {"render": None, "goals": []}
        else:
            out = {"render": snap.render_after, "goals": list(snap.goals)}
        return self._with_staleness(doc, params, out)

    def m_diagnostics(self, params: dict) -> dict:
        doc = self._doc(params["path"])
        out = {"diagnostics": [d.to_json()
                               for d in doc.result.diagnostics]}
        return self._with_staleness(doc, params, out)

    def m_search(self, params: dict) -> dict:
        from .search import name_search

        env = self.env.with_imports(set(MANIFEST))
        return {"results": [{"name": n, "signature": s}
                            for n, s in name_search(env, params["query"])]}

    def m_suggest(self, params: dict) -> dict:
        from .search import exact_search

        doc = self._doc(params["path"])
        snap = self._snapshot_at(doc, int(params["line"]),
                                 int(params.get("col", 1)))
        suggestions: list[str] = []
        if snap is not None and snap.live is not None:
            # the snapshot's goal list is the state at that position; goals
            # solved later in the script still deserve suggestions here
            engine, goals = snap.live
            if goals:
                g = goals[0]
                ctx = engine.display_ctx(g.ctx)
                target = engine.mctx.instantiate_mvars(g.target)
                try:
                    suggestions = [t for t, _ in exact_search(
                        engine.env, ctx, target)]
                except MicroProofError:
                    suggestions = []
        return self._with_staleness(doc, params,
                                    {"suggestions": suggestions})

    # -- dispatch ------------------------------------------------------------
    def handle_line(self, line: str) -> tuple[dict, bool]:
        """Returns (response, keep_running)."""
        try:
            req = json.loads(line)
        except json.JSONDecodeError as e:
            return {"id": None, "error": {"message": f"bad JSON: {e}"}}, True
        rid = req.get("id")
        method = req.get("method")
        params = req.get("params") or {}
        if method == "shutdown":
            return {"id": rid, "result": {}}, False
        fn = getattr(self, f"m_{method}", None)
        if fn is None or not isinstance(method, str):
            return {"id": rid,
                    "error": {"message": f"unknown method: {method}"}}, True
        try:
            return {"id": rid, "result": fn(params)}, True
        except MicroProofError as e:
            return {"id": rid, "error": {"message": e.message}}, True
        except (KeyError, TypeError, ValueError) as e:
            return {"id": rid,
                    "error": {"message": f"bad request: {e!r}"}}, True


def _session_loop(session: Session, rfile, wfile) -> None:
    for line in rfile:
        line = line.strip()
        if not line:
            continue
        response, keep = session.handle_line(line)
        wfile.write(json.dumps(response, ensure_ascii=False) + "\n")
        wfile.flush()
        if not keep:
            break


def serve(env: Environment, port: int | None = None) -> None:
    session = Session(env)
    if port is None:
        _session_loop(session, sys.stdin, sys.stdout)
        return
    srv = socket.create_server(("127.0.0.1", port))
    # announce readiness (the chosen port matters when asked for port 0)
    print(f"listening on 127.0.0.1:{srv.getsockname()[1]}", flush=True)
    conn, _ = srv.accept()
    with conn:
        rfile = conn.makefile("r", encoding="utf-8")
        wfile = conn.makefile("w", encoding="utf-8")
        _session_loop(session, rfile, wfile)
    srv.close()
