import json


from nilflow.cli import main


def run(args):
    return main([str(a) for a in args])


def test_analyze_prints_table(capsys):
    assert run(["analyze", "--substitution", "a->ab;b->a"]) == 0
    out = capsys.readouterr().out
    assert "gamma" in out and "-3/2+1*l" in out
    assert "t_a" in out and "1/5+3/5*l" in out


def test_analyze_hypothesis_violation(capsys):
    assert run(["analyze", "--substitution", "a->ab;b->b"]) == 3


def test_parse_error_exit_code(capsys):
    assert run(["analyze", "--substitution", "a->ab;b"]) == 2


def test_verify_deterministic(tmp_path, capsys):
    out1, out2 = tmp_path / "r1", tmp_path / "r2"
    assert run(["verify", "--seed", 7, "--out", out1]) == 0
    assert run(["verify", "--seed", 7, "--out", out2]) == 0
    b1 = (out1 / "verify-report.json").read_bytes()
    b2 = (out2 / "verify-report.json").read_bytes()
    assert b1 == b2
    report = json.loads(b1)
    assert report["passed"] and report["seed"] == 7
    names = [c["name"] for c in report["checks"]]
    assert "sigma.self_induction" in names and "strip.induction" in names


def test_orbit_csv_header(tmp_path):
    assert run(["orbit", "--kind", "skew", "--iters", 5, "--out", tmp_path]) == 0
    text = (tmp_path / "orbit-skew.csv").read_text()
    assert text.startswith("k,u,v\n")
    assert len(text.strip().splitlines()) == 7
    assert run(["orbit", "--kind", "translation", "--iters", 3,
                "--out", tmp_path]) == 0
    text2 = (tmp_path / "orbit-translation.csv").read_text()
    assert text2.startswith("k,x,y,z\n")


def test_orbit_jsonl_exact_strings(tmp_path):
    assert run(["orbit", "--kind", "translation", "--iters", 2,
                "--format", "jsonl", "--out", tmp_path]) == 0
    lines = (tmp_path / "orbit-translation.jsonl").read_text().splitlines()
    first = json.loads(lines[1])
    assert first["x"] == "-1+1*l"
    assert first["seed"] == 0


def test_orbit_determinism(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert run(["orbit", "--kind", "strip", "--iters", 50, "--out", d]) == 0
    assert (a / "orbit-strip.csv").read_bytes() == (b / "orbit-strip.csv").read_bytes()


def test_broken_line(tmp_path, capsys):
    assert run(["broken-line", "--length", 50, "--out", tmp_path]) == 0
    lines = (tmp_path / "broken-line.csv").read_text().splitlines()
    assert lines[0] == "k,a,b,c,proj_u,proj_v"
    assert lines[1].startswith("0,0,0,0")
    assert len(lines) == 52


def test_induce(tmp_path, capsys):
    assert run(["induce", "--samples", 10, "--out", tmp_path]) == 0
    report = json.loads((tmp_path / "induce-report.json").read_text())
    assert report["renormalization"]["passed"]
    assert report["self_induction"]["passed"]


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "config.json"
    cfg.write_text(json.dumps({"substitution": "a->aab;b->a", "length": 20,
                               "out": str(tmp_path)}))
    assert run(["broken-line", "--config", cfg]) == 0
    lines = (tmp_path / "broken-line.csv").read_text().splitlines()
    assert len(lines) == 22


def test_config_flag_precedence(tmp_path):
    cfg = tmp_path / "config.json"
    cfg.write_text(json.dumps({"length": 20, "out": str(tmp_path)}))
    assert run(["broken-line", "--config", cfg, "--length", 5]) == 0
    lines = (tmp_path / "broken-line.csv").read_text().splitlines()
    assert len(lines) == 7


def test_bad_config_is_parse_error(tmp_path, capsys):
    cfg = tmp_path / "config.json"
    cfg.write_text("{not json")
    assert run(["broken-line", "--config", cfg]) == 2


def test_equidistribution_artifact(tmp_path, capsys):
    assert run(["equidistribution", "--iters", 20000, "--radius", 1,
                "--out", tmp_path, "--format", "jsonl"]) == 0
    report = json.loads((tmp_path / "weyl-sums.json").read_text())
    assert set(report) == {"skew", "nilflow"}
    assert report["skew"]["passed"]
