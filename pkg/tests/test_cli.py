import json

import numpy as np
import pytest

from skelex.cli import cli_main, parse_bounds
from skelex.errors import SkelexError
from skelex.netio import dump_json, load_json, network_to_dict, read_points_csv
from skelex.skeleton import Network

from conftest import random_network

TWO_NEURON_NET = Network(
    [
        (np.array([[-1.0, -1.0], [-1.0, 1.0]]), np.array([-1.0, -1.0])),
        (np.array([[1.0, 1.0]]), np.array([0.0])),
    ]
)


@pytest.fixture
def net_file(tmp_path):
    path = tmp_path / "net.json"
    dump_json(network_to_dict(random_network(42, max_width=5, k=3), name="cli-test"), path)
    return path


def test_parse_bounds():
    b = parse_bounds("-4,4,-4,4")
    assert b.dim == 2 and b.area == 64
    assert parse_bounds("-10,10").dim == 1
    with pytest.raises(SkelexError):
        parse_bounds("1,2,3")
    with pytest.raises(SkelexError):
        parse_bounds("a,b")


def test_extract_writes_per_class_files(tmp_path, net_file):
    out = tmp_path / "skel.json"
    svg = tmp_path / "skel.svg"
    code = cli_main([
        "extract", "--network", str(net_file), "--bounds", "-4,4,-4,4",
        "--out", str(out), "--svg", str(svg),
    ])
    assert code == 0
    for c in range(3):
        assert (tmp_path / f"skel_c{c}.json").exists()
        assert (tmp_path / f"skel_c{c}.svg").exists()
    doc = load_json(tmp_path / "skel_c0.json")
    assert doc["kind"] == "skeleton"


def test_boundary_classify_and_check(tmp_path, net_file):
    dmap = tmp_path / "dmap.json"
    code = cli_main([
        "boundary", "--network", str(net_file), "--bounds", "-4,4,-4,4",
        "--out", str(dmap), "--svg", str(tmp_path / "dmap.svg"),
    ])
    assert code == 0

    pts = tmp_path / "points.csv"
    rng = np.random.default_rng(7)
    rows = ["x1,x2"] + [f"{x:.6f},{y:.6f}" for x, y in rng.uniform(-4, 4, size=(50, 2))]
    pts.write_text("\n".join(rows) + "\n")
    labels_out = tmp_path / "labels.csv"
    code = cli_main([
        "classify", "--dmap", str(dmap), "--points", str(pts), "--out", str(labels_out),
    ])
    assert code == 0
    points, labels = read_points_csv(labels_out)
    assert len(points) == 50
    assert set(np.unique(labels)) <= {0, 1, 2}

    code = cli_main([
        "check", "--network", str(net_file), "--bounds", "-4,4,-4,4",
        "--samples", "2000",
    ])
    assert code == 0


def test_analyze(tmp_path, net_file):
    out = tmp_path / "stats.json"
    code = cli_main([
        "analyze", "--network", str(net_file), "--bounds", "-4,4,-4,4",
        "--grid", "64", "--out", str(out),
    ])
    assert code == 0
    stats = load_json(out)
    assert stats["linear_regions"] <= stats["activation_regions"]
    assert stats["grid_activation_regions"] <= stats["activation_regions"]


def test_unknown_flag_exits_1(net_file):
    assert cli_main(["extract", "--network", str(net_file), "--wat"]) == 1
    assert cli_main(["no-such-command"]) == 1
    assert cli_main(["--help"]) == 0


def test_missing_file_exits_1(tmp_path):
    code = cli_main([
        "extract", "--network", str(tmp_path / "missing.json"),
        "--bounds", "-4,4,-4,4", "--out", str(tmp_path / "s.json"),
    ])
    assert code == 1


def test_malformed_network_exits_1(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"kind": "network", "layers": [{"weights": "x"}]}))
    code = cli_main([
        "extract", "--network", str(bad), "--bounds", "-4,4,-4,4",
        "--out", str(tmp_path / "s.json"),
    ])
    assert code == 1


def test_1d_pipeline_via_cli(tmp_path):
    net = Network(
        [
            (np.array([[1.0], [1.0]]), np.array([1.0, 0.0])),
            (np.array([[1.0, -2.0]]), np.array([0.0])),
            (np.array([[1.0]]), np.array([0.0])),
        ]
    )
    net_path = tmp_path / "hat.json"
    dump_json(network_to_dict(net), net_path)
    code = cli_main([
        "boundary", "--network", str(net_path), "--bounds", "-10,10",
        "--out", str(tmp_path / "dmap.json"), "--svg", str(tmp_path / "dmap.svg"),
    ])
    assert code == 0
    doc = load_json(tmp_path / "dmap.json")
    assert doc["single_logit"] is True
