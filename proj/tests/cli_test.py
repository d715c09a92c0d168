"""End-to-end checks of the graphvar executable: exit codes, round trips and schemas.

usage: cli_test.py <graphvar binary> <schemas dir>
"""

import json
import pathlib
import random
import subprocess
import sys
import tempfile

import jsonschema
from referencing import Registry, Resource

BIN = sys.argv[1]
SCHEMAS = pathlib.Path(sys.argv[2])

registry = Registry()
for path in SCHEMAS.glob("*.schema.json"):
    doc = json.loads(path.read_text())
    registry = registry.with_resource(doc["$id"], Resource.from_contents(doc))
    registry = registry.with_resource(path.name, Resource.from_contents(doc))

failures = []


def check(cond, what):
    print(("ok   " if cond else "FAIL ") + what)
    if not cond:
        failures.append(what)


def run(*args, env=None):
    return subprocess.run([BIN, *map(str, args)], capture_output=True, text=True, env=env)


def validate(obj, name):
    schema = json.loads((SCHEMAS / f"{name}.schema.json").read_text())
    try:
        jsonschema.Draft202012Validator(schema, registry=registry).validate(obj)
        check(True, f"{name} document matches its schema")
    except jsonschema.ValidationError as e:
        check(False, f"{name} document matches its schema: {e.message}")


with tempfile.TemporaryDirectory() as tmp:
    tmp = pathlib.Path(tmp)

    r = run("census", "--nodes", 3, "--out", tmp / "r.json")
    census = json.loads((tmp / "r.json").read_text())
    check(r.returncode == 0 and census["graph_count"] == 25, "census --nodes 3 gives 25 graphs")
    validate(census, "census")

    r = run("census", "--nodes", 12)
    check(r.returncode == 4, "census --nodes 12 exits 4")
    check(len(r.stderr.strip().splitlines()) == 1, "error is one line")

    r = run("measures", "--summary", tmp / "missing.json")
    check(r.returncode == 3, "measures on a missing summary exits 3")

    r = run("census", "--bogus")
    check(r.returncode == 2, "unknown flag exits 2")

    r = run("sample", "--nodes", 5, "--samples", 500, "--seed", 3, "--out", tmp / "g.jsonl")
    lines = (tmp / "g.jsonl").read_text().splitlines()
    check(r.returncode == 0 and len(lines) == 500, "sample writes 500 records")
    for line in lines[:20]:
        jsonschema.Draft202012Validator(json.loads((SCHEMAS / "graph.schema.json").read_text())).validate(json.loads(line))

    r2 = run("sample", "--nodes", 5, "--samples", 500, "--seed", 3, "--threads", 4, "--chains", 1)
    check(r2.stdout.splitlines() == lines, "sampling is seed-deterministic")
    r3 = run("sample", "--nodes", 5, "--samples", 500, env={"GE_SEED": "3"})
    check(r3.stdout.splitlines() == lines, "GE_SEED is the default seed")

    r = run("summarize", "--in", tmp / "g.jsonl", "--seed", 3, "--with-joints", "--out", tmp / "s.json")
    summary = json.loads((tmp / "s.json").read_text())
    check(r.returncode == 0 and summary["sample_count"] == 500 and summary["provenance"]["records"] == 500,
          "summarize keeps every sampled record")
    validate(summary, "summary")

    (tmp / "w.csv").write_text("weight\n" + "\n".join("1" for _ in lines) + "\n")
    r = run("summarize", "--in", tmp / "g.jsonl", "--weights", tmp / "w.csv", "--out", tmp / "sw.json")
    check(r.returncode == 0 and json.loads((tmp / "sw.json").read_text())["sigma"] == summary["sigma"],
          "unit weights change nothing")

    (tmp / "bad.jsonl").write_text('{"n":3,"directed":true,"edges":[[0,1],[1,2],[2,0]]}\n')
    r = run("summarize", "--in", tmp / "bad.jsonl")
    check(r.returncode == 3, "cyclic input exits 3")

    for target in ("exact", "approx"):
        r = run("measures", "--summary", tmp / "s.json", "--target", target, "--out", tmp / f"m_{target}.json")
        check(r.returncode == 0, f"measures --target {target}")
        validate(json.loads((tmp / f"m_{target}.json").read_text()), "report")

    r = run("maxent", "--nodes", 4, "--source", "exact", "--out", tmp / "x.json")
    maxent = json.loads((tmp / "x.json").read_text())
    check(abs(maxent["marginals"][2] - 0.309392265) < 1e-9, "maxent exact n=4")
    validate(maxent, "maxent")
    check(run("maxent", "--nodes", 9, "--source", "exact").returncode == 4, "exact maxent beyond census exits 4")

    r = run("bounds", "--nodes", "2..6")
    rows = r.stdout.strip().splitlines()
    check(rows[0] == "n,cov_bound,cor_bound,p_arrow,p_zero" and len(rows) == 6, "bounds CSV shape")
    check(abs(float(rows[1].split(",")[1]) - 0.25) < 1e-15, "bounds n=2")

    lines = ["A,B,C"]
    rng = random.Random(4)
    for _ in range(300):
        a = rng.choice("xy")
        b = a if rng.random() < 0.85 else rng.choice("xy")
        c = b if rng.random() < 0.85 else rng.choice("xy")
        lines.append(f"{a},{b},{c}")
    (tmp / "d.csv").write_text("\n".join(lines) + "\n")
    for name, learner in (("mi", "mi:0.01"), ("coin", "coin:0.5"), ("hc", "hc")):
        r = run("learn-bootstrap", "--data", tmp / "d.csv", "--learner", learner, "--replicates", 20, "--seed", 1,
                "--out", tmp / f"run_{name}.json")
        check(r.returncode == 0, f"learn-bootstrap {learner}")
        validate(json.loads((tmp / f"run_{name}.json").read_text()), "run")

    r = run("compare", "--runs", tmp / "run_coin.json", tmp / "run_mi.json", "--criterion", "vt", "--out", tmp / "c.json")
    sel = json.loads((tmp / "c.json").read_text())
    check(r.returncode == 0 and sel["selected_index"] == 1, "compare picks the stable learner")
    validate(sel, "selection")
    r = run("compare", "--runs", tmp / "run_mi.json", tmp / "run_hc.json")
    check(r.returncode == 3, "compare refuses mixed families")

    r = run("tune", "--data", tmp / "d.csv", "--learner", "mi", "--grid", "0.001,0.05,0.3", "--replicates", 10, "--seed", 2)
    rows = r.stdout.strip().splitlines()
    check(r.returncode == 0 and len(rows) == 4 and sum(int(x.split(",")[2]) for x in rows[1:]) == 1, "tune curve")

    r = run("conjectures", "--from", 3, "--to", 5, "--out", tmp / "cj.json")
    check(r.returncode == 0, "conjectures")
    validate(json.loads((tmp / "cj.json").read_text()), "conjectures")

    env = {"SOURCE_DATE_EPOCH": "1700000000"}
    a = run("sample", "--nodes", 4, "--samples", 50, "--seed", 1, env=env)
    (tmp / "h.jsonl").write_text(a.stdout)
    first = run("summarize", "--in", tmp / "h.jsonl", "--seed", 1, env=env).stdout
    second = run("summarize", "--in", tmp / "h.jsonl", "--seed", 1, env=env).stdout
    check(first == second and '"timestamp": "2023-11-14T22:13:20Z"' in first, "same manifest gives identical output")

    r = run("--verify-appendix-b")
    check(r.returncode == 0 and "PASS" in r.stdout and "FAIL" not in r.stdout, "--verify-appendix-b")

print(f"{len(failures)} failure(s)")
sys.exit(1 if failures else 0)
