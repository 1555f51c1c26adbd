import json
import os
import subprocess
import sys

import pytest

from trsys.cli import main
from trsys.lattice import chain, iterated_fusion, lattice_to_json
from trsys.serialize import dump


def run_cli(args, capsys):
    code = main(args)
    out, err = capsys.readouterr()
    return code, out, err


def test_enumerate_transfer_counts(capsys):
    code, out, err = run_cli(
        ["enumerate", "--family", "chain", "--n", "2", "--kind", "transfer"], capsys
    )
    assert code == 0
    assert len(out.strip().splitlines()) == 5
    assert "5 items" in err


def test_enumerate_covers_count(capsys):
    code, out, err = run_cli(
        ["enumerate", "--family", "cube", "--n", "3", "--kind", "covers"], capsys
    )
    assert code == 0
    assert len(out.strip().splitlines()) == 61


def test_enumerate_interior_count(capsys):
    code, out, err = run_cli(
        ["enumerate", "--family", "fuse2", "--n", "3", "--kind", "interior"], capsys
    )
    assert code == 0
    assert len(out.strip().splitlines()) == 12


def test_enumerate_saturated_json(capsys):
    code, out, err = run_cli(
        ["enumerate", "--family", "fuse2", "--n", "3", "--kind", "saturated",
         "--format", "json"],
        capsys,
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 12
    for line in lines:
        obj = json.loads(line)
        assert set(obj) == {"lattice", "pairs"}
        assert set(obj["lattice"]) == {"n", "names", "leq_pairs"}


def test_enumerate_interior_json_format(capsys):
    code, out, err = run_cli(
        ["enumerate", "--family", "chain", "--n", "2", "--kind", "interior",
         "--format", "json"],
        capsys,
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert [json.loads(l) for l in lines] == [
        {"image": [0, 0, 0]},
        {"image": [0, 0, 2]},
        {"image": [0, 1, 1]},
        {"image": [0, 1, 2]},
    ]


def test_fiber_report(capsys):
    code, out, err = run_cli(
        ["enumerate", "--family", "fuse2", "--n", "3", "--report", "fibers"], capsys
    )
    assert code == 0
    assert "12 fibers" in err
    lines = out.strip().splitlines()
    assert len(lines) == 13  # header plus one row per fiber
    assert lines[1].split()[1] == "8"  # the top-cube fiber is listed first


def test_fiber_report_json(capsys):
    code, out, err = run_cli(
        ["enumerate", "--family", "chain", "--n", "2", "--report", "fibers",
         "--format", "json"],
        capsys,
    )
    assert code == 0
    rows = [json.loads(l) for l in out.strip().splitlines()]
    assert len(rows) == 4
    assert all(set(r) == {"operator", "least_pairs", "greatest_pairs", "size"} for r in rows)
    assert sorted(r["size"] for r in rows) == [1, 1, 1, 2]


def test_guard_breach_exits_three(capsys):
    code, out, err = run_cli(
        ["enumerate", "--family", "cube", "--n", "4", "--kind", "transfer"], capsys
    )
    assert code == 3
    assert "guard" in err


def test_usage_error_exits_two(capsys):
    with pytest.raises(SystemExit) as info:
        main(["enumerate", "--family", "chain", "--kind", "transfer"])
    assert info.value.code == 2


def test_output_is_deterministic_across_jobs(capsys):
    base = ["enumerate", "--family", "fuse2", "--n", "4", "--kind", "transfer",
            "--format", "json"]
    _, out1, _ = run_cli(base, capsys)
    _, out2, _ = run_cli(base + ["--jobs", "2"], capsys)
    _, out3, _ = run_cli(base, capsys)
    assert out1 == out2 == out3


def test_verify_single_check(capsys):
    code, out, err = run_cli(["verify", "--check", "catalan"], capsys)
    assert code == 0
    assert "PASS catalan" in out


def test_verify_unknown_check(capsys):
    with pytest.raises(SystemExit) as info:
        main(["verify", "--check", "nonsense"])
    assert info.value.code == 2


def test_export_tr_hasse(tmp_path, capsys):
    code, out, err = run_cli(
        ["export", "--family", "chain", "--n", "2", "--what", "tr-hasse",
         "--out", str(tmp_path)],
        capsys,
    )
    assert code == 0
    text = (tmp_path / "tr_hasse.dot").read_text()
    assert text.count(" -> ") == 5  # the pentagon
    assert text.count("[label=") == 5


def test_export_systems_draw_all_relations(tmp_path, capsys):
    code, out, err = run_cli(
        ["export", "--family", "chain", "--n", "2", "--what", "systems",
         "--out", str(tmp_path)],
        capsys,
    )
    assert code == 0
    files = sorted(os.listdir(tmp_path))
    assert len(files) == 5
    # the complete system shows all three relations, not just the covers
    full = (tmp_path / files[-1]).read_text()
    assert full.count("->") == 3


def test_export_covers(tmp_path, capsys):
    code, out, err = run_cli(
        ["export", "--family", "fuse2", "--n", "3", "--what", "covers",
         "--out", str(tmp_path)],
        capsys,
    )
    assert code == 0
    files = sorted(os.listdir(tmp_path))
    assert len(files) == 12
    text = (tmp_path / files[0]).read_text()
    assert "color=gray" in text


def test_fusion_count_command(tmp_path, capsys):
    left = tmp_path / "left.json"
    right = tmp_path / "right.json"
    dump(lattice_to_json(chain(2)), left)
    dump(lattice_to_json(chain(3)), right)
    code, out, err = run_cli(
        ["fusion-count", "--left", str(left), "--right", str(right)], capsys
    )
    assert code == 0
    assert "total           26" in out


def test_rank_two_command(capsys):
    code, out, err = run_cli(["rank-two", "--p", "2"], capsys)
    assert code == 0
    assert "19" in out
    assert "bottom cube 8, middle 3, top cube 8" in out


def test_rank_two_guard_skip(capsys):
    code, out, err = run_cli(["rank-two", "--p", "31"], capsys)
    assert code == 0
    assert "census skipped" in out


def test_json_family_round_trip(tmp_path, capsys):
    path = tmp_path / "lat.json"
    dump(lattice_to_json(iterated_fusion(chain(2), 3)), path)
    code, out, err = run_cli(
        ["enumerate", "--family", "json", "--json", str(path), "--kind", "transfer"],
        capsys,
    )
    assert code == 0
    assert len(out.strip().splitlines()) == 19


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "trsys.cli", "verify", "--check", "ranktwo"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "PASS ranktwo" in proc.stdout
