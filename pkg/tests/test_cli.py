import json
import socket

import pytest

from geoprove import cli
from geoprove.server import start_server


def run_cli(args, capsys):
    code = cli.main(args)
    out, err = capsys.readouterr()
    return code, out, err


class TestCheck:
    def test_simson_passes(self, corpus_dir, capsys):
        code, out, err = run_cli(
            ["check", str(corpus_dir / "simson.gls")], capsys)
        assert code == 0
        assert "ok" in out

    def test_midpoint_demo_passes(self, corpus_dir, capsys):
        code, out, err = run_cli(
            ["check", str(corpus_dir / "midpoint_demo.gls")], capsys)
        assert code == 0

    def test_missing_file(self, capsys):
        code, out, err = run_cli(["check", "/nonexistent/file.gls"], capsys)
        assert code == 2

    def test_parse_error_exits_two(self, tmp_path, capsys):
        bad = tmp_path / "bad.gls"
        bad.write_text("A <- free_point 0 0\n!!!\n")
        code, out, err = run_cli(["check", str(bad)], capsys)
        assert code == 2

    def test_failure_report_json_schema(self, corpus_dir, tmp_path, capsys,
                                        simson_text):
        lines = [l for l in simson_text.splitlines()
                 if "angles_to_concyclic C X Fa Fb" not in l]
        broken = tmp_path / "broken.gls"
        broken.write_text("\n".join(lines) + "\n")
        code, out, err = run_cli(
            ["check", str(broken), "--report", "json"], capsys)
        assert code == 1
        report = json.loads(out)
        for field in ("step", "tool", "reason", "labels"):
            assert field in report
        assert report["reason"] == "UnknownFact"

    def test_exit_code_is_reproducible(self, corpus_dir, capsys):
        codes = set()
        for _ in range(2):
            code, _, _ = run_cli(["check", str(corpus_dir / "simson.gls")],
                                 capsys)
            codes.add(code)
        assert codes == {0}

    def test_tools_env_var_overrides_default(self, corpus_dir, tmp_path,
                                             capsys, monkeypatch):
        # an empty tools file leaves only primitives: the script cannot run
        empty = tmp_path / "empty.glt"
        empty.write_text("# no tools\n")
        monkeypatch.setenv(cli.TOOLS_ENV, str(empty))
        code, out, err = run_cli(
            ["check", str(corpus_dir / "simson.gls")], capsys)
        assert code == 1
        monkeypatch.delenv(cli.TOOLS_ENV)
        code, out, err = run_cli(
            ["check", str(corpus_dir / "simson.gls")], capsys)
        assert code == 0


class TestLint:
    def test_classic_corpus_lints(self, corpus_dir, capsys):
        code, out, err = run_cli(
            ["lint", str(corpus_dir / "classic_tools.glt")], capsys)
        assert code == 0

    def test_base_library_lints(self, capsys, tmp_path):
        from geoprove.primitives import base_toolfile_text
        p = tmp_path / "base.glt"
        p.write_text(base_toolfile_text())
        code, out, err = run_cli(["lint", str(p)], capsys)
        assert code == 0

    def test_emptied_proof_fails_naming_lemma(self, classic_tools_text,
                                              tmp_path, capsys):
        text = classic_tools_text
        head, _, tail = text.rpartition("  PROOF\n")
        emptied = head + "  PROOF\n"  # drop the sim_aa_r proof step
        p = tmp_path / "classic_emptied.glt"
        p.write_text(emptied)
        code, out, err = run_cli(["lint", str(p)], capsys)
        assert code == 1
        assert "isosceles_aa" in err
        assert "implications" in err

    def test_overload_clash_fails(self, tmp_path, capsys):
        p = tmp_path / "clash.glt"
        p.write_text(
            "probe l:L -> a:A\n  a <- prim__direction_of l\n\n"
            "probe l:L -> a:A\n  a <- prim__direction_of l\n")
        code, out, err = run_cli(["lint", str(p)], capsys)
        assert code == 1
        assert "probe" in err


class TestTrace:
    def test_simson_trace_shows_merge(self, corpus_dir, capsys):
        code, out, err = run_cli(
            ["trace", str(corpus_dir / "simson.gls")], capsys)
        assert code == 0
        assert "merge: d == e" in out

    def test_empty_script(self, tmp_path, capsys):
        p = tmp_path / "empty.gls"
        p.write_text("# nothing here\n")
        code, out, err = run_cli(["trace", str(p)], capsys)
        assert code == 0
        assert out.strip() == ""

    def test_failing_script_stops(self, tmp_path, capsys):
        p = tmp_path / "fail.gls"
        p.write_text("A <- free_point 0 0\nB <- free_point 2 0\n"
                     "a <- line A B\n?<- lies_on A a\n<- not_eq A B\n")
        # goal passes (axiom postulated incidence); then make one fail
        code, out, err = run_cli(["trace", str(p)], capsys)
        assert code == 0
        p.write_text("A <- free_point 0 0\nB <- free_point 0 0\n"
                     "a <- line A B\n")
        code, out, err = run_cli(["trace", str(p)], capsys)
        assert code == 1
        assert "FAILED" in out


class _Client:
    def __init__(self, port):
        self.sock = socket.create_connection(("127.0.0.1", port), timeout=30)
        self.rfile = self.sock.makefile("r", encoding="utf-8")

    def call(self, **msg):
        self.sock.sendall((json.dumps(msg) + "\n").encode())
        return json.loads(self.rfile.readline())

    def send_raw(self, text):
        self.sock.sendall(text.encode())
        return json.loads(self.rfile.readline())

    def close(self):
        self.sock.close()


@pytest.fixture(scope="module")
def server_port(base_registry):
    server, port = start_server(0)
    yield port
    server.shutdown()


@pytest.fixture()
def client(server_port):
    c = _Client(server_port)
    yield c
    c.close()


class TestServe:
    def test_simson_session_over_protocol(self, client, simson_text):
        resp = client.call(cmd="load_script", text=simson_text)
        assert resp["status"] == "ok"
        assert resp["payload"]["steps"] == 19
        facts = client.call(cmd="get_facts")
        assert facts["status"] == "facts"
        lies = [f for f in facts["facts"] if f["kind"] == "lies_on"
                and set(f["labels"]) == {"Fb", "d"}]
        assert lies, facts["facts"]
        scene = client.call(cmd="get_scene")
        assert scene["status"] == "scene"
        kinds = [o["kind"] for o in scene["objects"]]
        assert kinds.count("P") == 7  # A B C X Fa Fb Fc
        # d and e merged: rendered once
        d_objs = [o for o in scene["objects"] if "d" in o["labels"]]
        assert len(d_objs) == 1
        assert "e" in d_objs[0]["labels"]

    def test_apply_step_and_goal(self, client):
        client.call(cmd="load_tools", path=None)
        assert client.call(cmd="apply_step",
                           line="A <- free_point 0 0")["status"] == "ok"
        assert client.call(cmd="apply_step",
                           line="B <- free_point 4 0")["status"] == "ok"
        assert client.call(cmd="apply_step",
                           line="a <- line A B")["status"] == "ok"
        assert client.call(cmd="query_goal",
                           line="lies_on A a")["status"] == "ok"
        resp = client.call(cmd="query_goal", line="not_eq A A")
        assert resp["status"] == "failure"
        assert resp["report"]["reason"] == "NumericMisfit"

    def test_failure_keeps_session_intact(self, client):
        client.call(cmd="load_tools", path=None)
        client.call(cmd="apply_step", line="A <- free_point 0 0")
        before = client.call(cmd="get_scene")
        bad = client.call(cmd="apply_step", line="b <- line A A")
        assert bad["status"] == "failure"
        after = client.call(cmd="get_scene")
        assert before == after

    def test_malformed_json(self, client):
        resp = client.send_raw("{nope\n")
        assert resp["status"] == "failure"
        assert resp["report"]["reason"] == "BadRequest"

    def test_unknown_command(self, client):
        resp = client.call(cmd="frobnicate")
        assert resp["status"] == "failure"

    def test_move_point_and_scene_update(self, client):
        client.call(cmd="load_tools", path=None)
        client.call(cmd="apply_step", line="A <- free_point 0 0")
        client.call(cmd="apply_step", line="B <- free_point 4 0")
        resp = client.call(cmd="move_point", label="A", x=1.0, y=1.0)
        assert resp["status"] == "ok"
        scene = client.call(cmd="get_scene")
        a = next(o for o in scene["objects"] if o["labels"] == ["A"])
        assert a["value"] == {"x": 1.0, "y": 1.0}

    def test_undo(self, client):
        client.call(cmd="load_tools", path=None)
        client.call(cmd="apply_step", line="A <- free_point 0 0")
        client.call(cmd="apply_step", line="B <- free_point 4 0")
        resp = client.call(cmd="undo", k=1)
        assert resp["status"] == "ok" and resp["payload"]["steps"] == 1
        scene = client.call(cmd="get_scene")
        assert len(scene["objects"]) == 1

    def test_export_roundtrip(self, client, simson_text, tmp_path, capsys):
        client.call(cmd="load_script", text=simson_text)
        resp = client.call(cmd="export")
        assert resp["status"] == "ok"
        exported = tmp_path / "exported.gls"
        exported.write_text(resp["payload"]["script"])
        code = cli.main(["check", str(exported)])
        capsys.readouterr()
        assert code == 0
