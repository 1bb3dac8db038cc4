"""Smoke tests for the _accel extension module."""

import json
import math

import _accel


def test_parse_and_desugar():
    ast = json.loads(_accel.parse_json("let x = 10;"))
    assert ast["kind"] == "program"
    assert ast["body"][0]["kind"] == "let"
    assert ast["body"][0]["name"] == "x"

    core = _accel.desugar_source(
        "function main(req) { for (let i = 0; i < 3; i = i + 1) { respond(i); } }"
    )
    assert "while" in core and "for" not in core
    assert "listen(main)" in core


def test_instrument_dump():
    dump = _accel.instrument_source("let x = 1;")
    assert "@enterSeq(1);" in dump
    assert "@let(x, 1);" in dump
    assert "@saveHandler(0);" in dump


def test_dyn_op_coercions():
    assert _accel.dyn_op("+", 1, True) == 2
    assert _accel.dyn_op("+", "n=", 2) == "n=2"
    assert _accel.dyn_op("===", 1, "1") is False
    assert math.isnan(_accel.dyn_op("*", None, 2))
    try:
        _accel.dyn_op("*", [], 2)
        raised = False
    except TypeError:
        raised = True
    assert raised


AUTH_SOURCE = """
let c = require('containerless');
function main(req) {
  function F(resp) {
    if (resp[req.body.username] === req.body.password) {
      c.respond('ok');
    } else {
      c.respond('error');
    }
  }
  c.get('passwords.json', F);
}
"""

ROUTES = {"passwords.json": {"alice": "secret"}}


def test_run_plain():
    ok = _accel.run_plain(AUTH_SOURCE, {"username": "alice", "password": "secret"}, ROUTES)
    assert ok["status"] == 200 and ok["body"] == "ok"
    bad = _accel.run_plain(AUTH_SOURCE, {"username": "alice", "password": "nope"}, ROUTES)
    assert bad["body"] == "error"


def test_trace_and_execute():
    tracer = _accel.Tracer(AUTH_SOURCE, ROUTES)
    # Trace both arms.
    assert tracer.request({"username": "alice", "password": "secret"})["body"] == "ok"
    assert tracer.request({"username": "alice", "password": "nope"})["body"] == "error"

    table = json.loads(tracer.trace_json())
    kinds = {h["body"]["kind"] for h in table["handlers"]}
    assert "handlers" in table and len(table["handlers"]) >= 3
    assert kinds  # main body, listen handler, get callback

    # The fast sandbox agrees with the interpreter byte for byte.
    for body in (
        {"username": "alice", "password": "secret"},
        {"username": "alice", "password": "x"},
        {"username": "ghost", "password": "x"},
    ):
        fast = tracer.execute(body)
        slow = tracer.request_plain(body)
        assert fast["outcome"] == "responded", fast
        assert fast["body"] == slow["body"]
        assert fast["instructions"] > 0
        assert fast["peak_bytes"] > 0


def test_benchmarks_exposed():
    names = _accel.benchmark_names()
    assert "authorize" in names and "maze" in names
    assert "main" in _accel.benchmark_source("authorize")


def main():
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    for test in tests:
        test()
        print(f"PASS {test.__name__}")
    print(f"{len(tests)} smoke tests passed")


if __name__ == "__main__":
    main()
