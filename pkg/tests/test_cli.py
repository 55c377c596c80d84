import json
from pathlib import Path

import numpy as np
import pytest

from graphgauge import io
from graphgauge.cli import RunConfig, main
from graphgauge.errors import ValidationError
from graphgauge.gauge import Connection
from graphgauge.graph import Graph, build_complex
from graphgauge.groups import Group

DATA = Path(__file__).resolve().parent.parent / "data"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    captured = capsys.readouterr()
    payload = json.loads(captured.out) if captured.out else None
    return code, payload, captured.err


def test_cliques_counts(capsys):
    code, out, _ = run(capsys, "cliques", "--graph", DATA / "k4.txt")
    assert code == 0 and out["counts"] == [4, 6, 4, 1]
    code, out, _ = run(capsys, "cliques", "--graph", DATA / "path3.txt")
    assert out["counts"] == [3, 2]


def test_cyclic_orientation_exit_2(capsys):
    code, out, err = run(capsys, "cliques", "--graph", DATA / "cyclic.txt")
    assert code == 2 and out is None
    assert "directed cycle" in err and "->" in err


def test_natural_order_accepts_cycle_file(capsys):
    code, out, _ = run(capsys, "cliques", "--graph", DATA / "cyclic.txt", "--order", "natural")
    assert code == 0 and out["counts"] == [3, 3, 1]


def test_spectrum_k3(capsys):
    _, out, _ = run(capsys, "spectrum", "--graph", DATA / "k3.txt")
    assert np.allclose(out["eigenvalues"], [0, 3, 3])
    _, out, _ = run(capsys, "spectrum", "--graph", DATA / "k3.txt", "--k", "1")
    assert np.allclose(out["eigenvalues"], [3, 3, 3]) and out["basis"] == [[0, 1], [0, 2], [1, 2]]


def test_spectrum_empty_edges(capsys):
    _, out, _ = run(capsys, "spectrum", "--graph", DATA / "empty3.txt")
    assert out["eigenvalues"] == [0.0, 0.0, 0.0]


def test_spectrum_bad_degree(capsys):
    code, _, err = run(capsys, "spectrum", "--graph", DATA / "k3.txt", "--k", "5")
    assert code == 2 and "--k" in err


def test_betti_and_curvature(capsys):
    _, out, _ = run(capsys, "betti", "--graph", DATA / "c4.txt")
    assert out == {"betti": [1, 1], "euler_characteristic": 0}
    _, out, _ = run(capsys, "curvature", "--graph", DATA / "k3.txt", "--k", "1")
    assert [r["forman_ricci"] for r in out["curvature"][0]["rows"]] == [3, 3, 3]


def test_check_random_u2(capsys):
    code, out, _ = run(capsys, "check", "--graph", DATA / "k4.txt", "--random", "--group", "un", "--n", "2")
    assert code == 0 and out["passed"]
    assert all(v < 1e-10 for v in out["identities"].values())
    assert not out["flat"]


def test_check_trivial_connection_is_flat(capsys, tmp_path):
    cx = build_complex(io.read_graph(DATA / "k4.txt"))
    p = tmp_path / "triv.json"
    p.write_text(io.dumps(io.connection_to_json(Connection.trivial(cx, Group("U1")))))
    code, out, _ = run(capsys, "check", "--graph", DATA / "k4.txt", "--connection", p)
    assert code == 0 and out["flat"] and out["curvature_max_abs"] == 0


def test_check_corrupted_connection(capsys, tmp_path):
    cx = build_complex(io.read_graph(DATA / "k3.txt"))
    data = io.connection_to_json(Connection.trivial(cx, Group("Un", 2)))
    data["edges"][1]["matrix"][0][0] = [1.5, 0.0]
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(data))
    code, out, err = run(capsys, "check", "--graph", DATA / "k3.txt", "--connection", p)
    assert code == 2 and out is None and "unitary" in err.lower()


def test_ym_minimize_k3(capsys):
    code, out, _ = run(capsys, "ym", "minimize", "--graph", DATA / "k3.txt", "--starts", "4")
    assert code == 0 and out["converged"]
    assert out["value"] == pytest.approx(0.0, abs=1e-10)
    assert out["gauge_fixed"]


def test_ym_maximize_k4(capsys):
    code, out, _ = run(capsys, "ym", "maximize", "--graph", DATA / "k4.txt", "--starts", "4")
    assert code == 0 and out["value"] == pytest.approx(8.0, abs=1e-10)


def test_ym_non_convergence_exit_1(capsys):
    code, out, _ = run(
        capsys, "ym", "minimize", "--graph", DATA / "k4.txt", "--group", "un", "--n", "2",
        "--max-iter", "1", "--starts", "1", "--seed", "3",
    )
    assert code == 1 and not out["converged"]


def test_ym_eval_and_residual(capsys):
    _, ev, _ = run(capsys, "ym", "eval", "--graph", DATA / "k4.txt", "--random", "--seed", "5")
    _, res, _ = run(capsys, "ym", "residual", "--graph", DATA / "k4.txt", "--random", "--seed", "5")
    assert ev["value"] == res["value"] and len(res["residual_matrices"]) == 6
    assert "residual_matrices" not in ev


def test_ym_grid_k4_summary(capsys):
    code, out, _ = run(capsys, "ym", "grid", "--graph", DATA / "k4.txt", "--resolution", "60")
    fam = out["families"]
    assert code == 0 and fam["graph"] == "K4"
    assert fam["unassigned"] == 0 and sum(fam["counts"].values()) == out["num_passes"]
    assert fam["intersection_points_found"] == [True, True]


def test_grid_rejects_nonabelian(capsys):
    code, _, _ = run(capsys, "ym", "grid", "--graph", DATA / "k3.txt", "--group", "un", "--n", "2")
    assert code == 2


def test_gauge_fix_round_trip(capsys, tmp_path):
    out_path = tmp_path / "fixed.json"
    code, _, _ = run(capsys, "gauge-fix", "--graph", DATA / "k4.txt", "--random", "--group", "un", "--n", "2",
                     "--out", out_path)
    payload = json.loads(out_path.read_text())
    cx = build_complex(io.read_graph(DATA / "k4.txt"))
    fixed = io.connection_from_json(payload["connection"], cx)
    assert code == 0
    for e in payload["tree_edges"]:
        assert np.array_equal(fixed(*e), np.eye(2))


def test_ymh_commands(capsys):
    code, out, _ = run(capsys, "ymh", "residual", "--graph", DATA / "k3.txt", "--random", "--group", "un", "--n", "2")
    assert code == 0 and out["value"] >= 0
    assert len(out["edge_residuals"]) == 3 and len(out["vertex_residuals"]) == 3
    code, _, _ = run(capsys, "ymh", "eval", "--graph", DATA / "k3.txt", "--group", "un", "--n", "2", "--random")
    assert code == 0


def test_missing_connection_source(capsys):
    code, _, err = run(capsys, "ym", "eval", "--graph", DATA / "k3.txt")
    assert code == 2 and "--random" in err


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as info:
        main(["ym", "bogus", "--graph", str(DATA / "k3.txt")])
    assert info.value.code == 2


@pytest.mark.parametrize("field, value", [("tol", 0.0), ("seed", -1), ("seed", 2**64), ("starts", 0)])
def test_run_config_validation(field, value):
    with pytest.raises(ValidationError):
        RunConfig(command="ym", graph=Path("x"), **{field: value})


@pytest.mark.parametrize(
    "argv",
    [
        ["ym", "minimize", "--graph", DATA / "k4.txt", "--starts", "3", "--seed", "11"],
        ["check", "--graph", DATA / "k4.txt", "--random", "--group", "on", "--n", "3", "--seed", "2"],
        ["ym", "grid", "--graph", DATA / "k3.txt", "--resolution", "90"],
    ],
    ids=["minimize", "check", "grid"],
)
def test_byte_identical_reruns(capsys, argv):
    main([str(a) for a in argv])
    first = capsys.readouterr().out
    main([str(a) for a in argv])
    assert capsys.readouterr().out == first


def test_emitted_connection_reparses(capsys):
    _, out, _ = run(capsys, "ym", "maximize", "--graph", DATA / "k4.txt", "--starts", "2")
    cx = build_complex(Graph.complete(4))
    a = io.connection_from_json(out["connection"], cx)
    assert np.max(np.abs(a.mats - io.connection_from_json(json.loads(io.dumps(io.connection_to_json(a))), cx).mats)) <= 1e-15
