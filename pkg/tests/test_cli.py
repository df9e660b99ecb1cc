import json

import pytest

from bakertw import io
from bakertw.cli import main
from bakertw.fixtures import theta_ladder


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_generate_grid(capsys):
    code, out, _ = run(capsys, "generate", "grid", "--k", 5)
    assert code == 0
    g = io.graph_from_text(out)
    assert g.n == 25 and g.labels["coord"][24] == (5, 5)


def test_generate_families(capsys, tmp_path):
    for argv in (["jump-grid", "--k", 6, "--b", 3, "--jumps", "1:3,4:6"], ["crossing-grid", "--k", 4],
                 ["apex", "--k", 2, "--g", 3], ["random-bounded-degree", "--n", 20, "--max-degree", 3],
                 ["tree", "--n", 12], ["gnp", "--n", 10], ["cycle", "--n", 5, "--subdivide", 1]):
        code, out, _ = run(capsys, "--seed", 3, "generate", *argv)
        assert code == 0 and io.graph_from_text(out).n > 0
    code, _, err = run(capsys, "generate", "jump-grid", "--k", 6, "--b", 6, "--jumps", "1:3")
    assert code == 2 and "error" in err


def test_ptas_row(capsys, tmp_path):
    gfile = tmp_path / "g4.txt"
    run(capsys, "generate", "grid", "--k", 4, "-o", gfile)
    csv_path = tmp_path / "out.csv"
    code, _, _ = run(capsys, "ptas", "--graph", gfile, "--problem", "mis", "--eps", "0.5",
                     "--layering", "bfs:0", "--oracle", "--csv", csv_path)
    assert code == 0
    rows = io.read_csv(csv_path.read_text())
    assert rows[0]["problem"] == "max_independent_set" and int(rows[0]["value"]) >= 4
    assert rows[0]["opt"] == "8" and rows[0]["millis"] != ""


def test_malformed_graph_exit_code(capsys, tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("p graph 3 1\ne 0 5\n")
    code, _, err = run(capsys, "baker-profile", "--graph", bad)
    assert code == 2 and "line 2" in err


def test_argparse_error_exit_code(capsys):
    code, _, _ = run(capsys, "ptas", "--problem", "tsp")
    assert code == 2


def test_layering_and_profile(capsys, tmp_path):
    gfile = tmp_path / "g.txt"
    run(capsys, "generate", "grid", "--k", 5, "-o", gfile)
    lfile = tmp_path / "lay.txt"
    assert run(capsys, "layering", "--graph", gfile, "--root", 0, "-o", lfile)[0] == 0
    code, out, _ = run(capsys, "baker-profile", "--graph", gfile, "--layering", lfile, "--ell-max", 2)
    assert code == 0 and io.read_csv(out)[1]["width"] == "1"


def test_apaths_subcommand(capsys, tmp_path):
    gfile = tmp_path / "s.txt"
    run(capsys, "generate", "star", "--n", 3, "-o", gfile)
    code, out, _ = run(capsys, "apaths", "--graph", gfile, "--terminals", "1,2,3", "--d", 1)
    obj = json.loads(out)
    assert code == 0 and obj["verified"] and len(obj["paths"]) == 1
    code, _, _ = run(capsys, "apaths", "--graph", gfile, "--terminals", "1,2,3", "--d", 2)
    assert code == 1


def test_extract_and_verify(capsys, tmp_path):
    fx = theta_ladder(1)
    gfile, mfile, out, trace = (tmp_path / x for x in ("g.txt", "gm.json", "m.json", "trace.txt"))
    run(capsys, "generate", "theta-ladder", "--d", 1, "-o", gfile, "--grid-model-out", mfile)
    code, _, _ = run(capsys, "extract-jumpgrid", "--graph", gfile, "--root", fx.layering.root,
                     "--window", f"{fx.z}:1", "--d", 1, "--grid-model", mfile, "--relaxed",
                     "-o", out, "--trace", trace)
    assert code == 0
    assert all(line.startswith("[") for line in trace.read_text().splitlines())
    code, printed, _ = run(capsys, "verify-model", "--model", out)
    assert code == 0 and printed.strip() == "ok"
    code, _, err = run(capsys, "extract-jumpgrid", "--graph", gfile, "--root", fx.layering.root,
                       "--window", "1:1", "--d", 1, "--grid-model", mfile, "--relaxed")
    assert code == 1 and "NoVerticalExit" in err


def test_verify_model_failure(capsys, tmp_path):
    g = io.graph_to_ref(io.graph_from_text("p graph 3 2\ne 0 1\ne 1 2\n"))
    bad = {"pattern": g, "host": g, "flavour": "induced", "branch": {"0": [0, 1], "1": [1], "2": [2]}}
    mfile = tmp_path / "bad.json"
    mfile.write_text(json.dumps(bad))
    code, out, _ = run(capsys, "verify-model", "--model", mfile)
    assert code == 1 and "disjointness" in out


def test_asdim_and_clustered(capsys, tmp_path):
    gfile = tmp_path / "g.txt"
    run(capsys, "generate", "grid", "--k", 6, "-o", gfile)
    pfile = tmp_path / "p.json"
    code, _, _ = run(capsys, "asdim", "--graph", gfile, "--delta-list", 2, "--layering", "bfs:0", "-o", pfile)
    part = io.partition_from_json(pfile.read_text())
    assert code == 0 and part.k == 3 and part.delta == 2
    code, out, _ = run(capsys, "asdim", "--graph", gfile, "--delta-list", "1,2", "--classes", 3, "--measure")
    assert code == 0 and len(io.read_csv(out)) == 2
    code, out, _ = run(capsys, "clustered", "--graph", gfile, "--k", 2, "--c", 1)
    assert code == 0 and json.loads(out)["c"] == 1
    code, _, _ = run(capsys, "generate", "complete", "--n", 4, "-o", gfile)
    code, _, _ = run(capsys, "clustered", "--graph", gfile, "--k", 3, "--c", 1)
    assert code == 1


def test_config_defaults_and_override(capsys, tmp_path):
    gfile = tmp_path / "g.txt"
    run(capsys, "generate", "grid", "--k", 4, "-o", gfile)
    conf = tmp_path / "conf.txt"
    conf.write_text("# defaults\noracle = true\nno-timing = 1\nlayering = bfs:0\n")
    code, out, _ = run(capsys, "--config", conf, "ptas", "--graph", gfile, "--problem", "mvc", "--eps", 1)
    row = io.read_csv(out)[0]
    assert code == 0 and row["opt"] == "8" and row["millis"] == ""


def test_fixed_seed_is_byte_identical(capsys, tmp_path):
    outs = []
    for i in range(2):
        gfile = tmp_path / f"g{i}.txt"
        csv_path = tmp_path / f"r{i}.csv"
        run(capsys, "--seed", 11, "generate", "random-bounded-degree", "--n", 18, "--max-degree", 3, "-o", gfile)
        for problem in ("mis", "mvc", "mds"):
            run(capsys, "ptas", "--graph", gfile, "--instance", "rbd", "--problem", problem, "--eps", "1/2",
                "--oracle", "--no-timing", "--csv", csv_path)
        outs.append((gfile.read_bytes(), csv_path.read_bytes()))
    assert outs[0] == outs[1]
