"""Session service: newline-delimited JSON over a local TCP socket.

One session per connection; requests are processed strictly in order and
each gets exactly one response.  A failing request leaves the session
untouched (the step layer is transactional), so a client can keep going
after an error.

Request shapes (one JSON object per line)::

    {"cmd": "load_tools", "path": null | "<file.glt>"}
    {"cmd": "load_script", "text": "..."}
    {"cmd": "apply_step", "line": "Fa <- foot X a"}
    {"cmd": "undo", "k": 2}
    {"cmd": "move_point", "label": "A", "x": 1.0, "y": 2.0}
    {"cmd": "query_goal", "line": "lies_on Fb d"}
    {"cmd": "get_scene"}
    {"cmd": "get_facts"}

Responses: ``{"status": "ok", "payload": ...}``,
``{"status": "failure", "report": {step, tool, reason, labels, ...}}``,
``{"status": "scene", "objects": [...]}`` or
``{"status": "facts", "facts": [...]}``.
"""

from __future__ import annotations

import json
import socketserver
import threading
from fractions import Fraction

from . import primitives
from .dsl import parse_toolfile
from .errors import GeoproveError
from .script import (ScriptError, SessionState, parse_script,
                     parse_session_line)
from .toolset import resolve_ast

__all__ = ["ProtocolSession", "start_server", "serve"]


def _bad_request(message):
    return {"status": "failure",
            "report": {"step": None, "tool": None, "reason": "BadRequest",
                       "labels": [], "message": message}}


class ProtocolSession:
    """Dispatches protocol messages against one private session."""

    def __init__(self):
        self.registry = primitives.base_registry()
        self.session = SessionState(self.registry)

    # each handler returns a response dict and must leave the session
    # intact when reporting a failure

    def dispatch(self, msg):
        if not isinstance(msg, dict) or "cmd" not in msg:
            return _bad_request("request must be an object with 'cmd'")
        handler = getattr(self, "_cmd_" + str(msg["cmd"]), None)
        if handler is None:
            return _bad_request(f"unknown command {msg['cmd']!r}")
        try:
            return handler(msg)
        except ScriptError as e:
            return {"status": "failure", "report": e.report.to_json()}
        except GeoproveError as e:
            return _bad_request(str(e))
        except (KeyError, TypeError, ValueError) as e:
            return _bad_request(f"malformed request: {e}")

    def _cmd_load_tools(self, msg):
        path = msg.get("path")
        registry = primitives.primitives_registry()
        resolve_ast(parse_toolfile(primitives.base_toolfile_text()), registry)
        if path:
            with open(path, encoding="utf-8") as fh:
                resolve_ast(parse_toolfile(fh.read()), registry, shadow=True)
        self.registry = registry
        self.session = SessionState(registry)
        return {"status": "ok", "payload": {"tools": registry.names()}}

    def _cmd_load_script(self, msg):
        script = parse_script(msg["text"])
        fresh = SessionState(self.registry)
        for i, step in enumerate(script.steps):
            fresh.apply(step, i)   # ScriptError propagates; old session kept
        self.session = fresh
        return {"status": "ok", "payload": {"steps": len(script.steps)}}

    def _cmd_apply_step(self, msg):
        step = parse_session_line(msg["line"])
        result = self.session.apply(step)
        return {"status": "ok", "payload": {
            "index": result.index,
            "outputs": [{"label": l, "id": r.id, "kind": r.kind}
                        for l, r in result.outputs],
            "merges": [[a.id, b.id] for a, b in result.merges],
            "new_facts": [self._fact_json(f) for f in result.new_facts],
        }}

    def _cmd_undo(self, msg):
        self.session = self.session.undo(int(msg["k"]))
        return {"status": "ok", "payload": {"steps": len(self.session.journal)}}

    def _cmd_move_point(self, msg):
        self.session = self.session.move_free_point(
            msg["label"], float(msg["x"]), float(msg["y"]))
        return {"status": "ok", "payload": {"label": msg["label"]}}

    def _cmd_query_goal(self, msg):
        from .script import check_goal
        ok, report = check_goal(self.session, msg["line"])
        if ok:
            return {"status": "ok", "payload": {"goal": "pass"}}
        return {"status": "failure", "report": report.to_json()}

    def _cmd_get_scene(self, msg):
        return {"status": "scene", "objects": self.session.scene()}

    def _cmd_get_facts(self, msg):
        return {"status": "facts",
                "facts": [self._fact_json(f) for f in self.session.facts()]}

    def _cmd_export(self, msg):
        return {"status": "ok",
                "payload": {"script": self.session.export_script()}}

    def _fact_json(self, fact):
        data = {"kind": fact.kind,
                "refs": [r.id for r in fact.refs],
                "labels": [self.session.display_name(r) for r in fact.refs],
                "step": fact.step}
        if fact.kind == "eq_angle":
            data["anchors"] = [self._angle_anchor(r) for r in fact.refs]
        return data

    def _angle_anchor(self, aref):
        """The two line ids an angle object measures between, when it came
        from the plain two-direction combination; lets the client place
        equal-angle arcs at the right vertex."""
        core = self.session.core
        line_of_dir = {d: l for l, d in core.direction_entries()}
        target = core.find(aref)
        for (uid, refs, hypers), outs in core.table.items():
            if not uid.startswith("angle_compute"):
                continue
            if len(refs) != 2 or core.find(outs[0]) != target:
                continue
            if hypers != (Fraction(0), Fraction(-1), Fraction(1)):
                continue
            l0 = line_of_dir.get(core.find(refs[0]))
            l1 = line_of_dir.get(core.find(refs[1]))
            if l0 is not None and l1 is not None:
                return [l0.id, l1.id]
        return None


class _Handler(socketserver.StreamRequestHandler):
    def handle(self):
        session = ProtocolSession()
        for raw in self.rfile:
            line = raw.decode("utf-8", errors="replace").strip()
            if not line:
                continue
            try:
                msg = json.loads(line)
            except json.JSONDecodeError as e:
                resp = _bad_request(f"invalid JSON: {e}")
            else:
                resp = session.dispatch(msg)
            self.wfile.write((json.dumps(resp) + "\n").encode("utf-8"))
            self.wfile.flush()


class _Server(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True


def start_server(port=0, host="127.0.0.1"):
    """Start the service on a background thread; returns (server, port)."""
    server = _Server((host, port), _Handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return server, server.server_address[1]


def serve(port, host="127.0.0.1"):
    """Run the service in the foreground (CLI entry point)."""
    server = _Server((host, port), _Handler)
    print(f"listening on {host}:{server.server_address[1]}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
