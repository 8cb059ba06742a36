import json
import subprocess
import sys

import pytest

from lowheight.cli import main, read_csv_records, read_jsonl_hits
from lowheight.eds import EDSTuple
from lowheight.heights import gcd_estimate


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_estimate(capsys):
    code, out, _ = run(capsys, "estimate", "--d", "-7", "--tuple", "w;4-2*w;16-8*w")
    assert code == 0
    rec = json.loads(out)
    assert rec["n"] == 128
    assert rec["h_tilde"] == pytest.approx(0.0057743145, rel=1e-8)


def test_estimate_round_trips_bit_identically(capsys):
    t = EDSTuple.parse("1;w-1;2*w-2", 3)
    code, out, _ = run(capsys, "estimate", "--d", "3", "--tuple", str(t), "--iters", "7")
    assert code == 0
    rec = json.loads(out)
    direct = gcd_estimate(EDSTuple.parse(rec["tuple"], 3), 7)
    assert rec["h_tilde"] == float(f"{direct.value:.9g}")
    assert rec["bits_En"] == direct.En.bit_length()


def test_iters_tightens_estimate(capsys):
    vals = []
    for I in (6, 7, 8):
        _, out, _ = run(capsys, "estimate", "--d", "-7", "--tuple", "w;4-2*w;16-8*w", "--iters", str(I))
        vals.append(json.loads(out)["h_tilde"])
    errs = [abs(v - 0.0058010) for v in vals]
    assert errs[0] > errs[1] > errs[2]


def test_estimate_torsion(capsys):
    code, out, err = run(capsys, "estimate", "--d", "3", "--tuple", "1;1;1")
    assert code == 1
    assert "torsion-suspected" in err


def test_bad_tuple_is_config_error(capsys):
    code, _, err = run(capsys, "estimate", "--d", "3", "--tuple", "2;1;3")
    assert code == 2 and "error" in err
    code, _, _ = run(capsys, "estimate", "--d", "4", "--tuple", "1;1;1")
    assert code == 2


def test_recover(capsys):
    code, out, _ = run(capsys, "recover", "--d", "3", "--tuple", "w+1;2*w+2;4*w+4")
    assert code == 0
    rec = json.loads(out)
    assert rec["curve"] == ["0", "3+w", "1+w", "2+2*w", "0"]
    assert rec["point"] == ["0", "0"]
    assert all(rec["verified"].values())


def test_verify_table_row(capsys):
    code, out, _ = run(capsys, "verify", "--d", "3", "--tuple", "w+1;2*w+2;4*w+4")
    rep = json.loads(out)
    assert code == 0 and rep["ok"]
    assert rep["checks"]["full_agrees_3sf"]
    assert [e["n"] for e in rep["estimates"]] == [128, 256]


def test_verify_torsion(capsys):
    code, out, _ = run(capsys, "verify", "--d", "3", "--tuple", "1;1;1")
    rep = json.loads(out)
    assert code == 1 and not rep["ok"]
    assert rep["checks"]["torsion_suspected"]


def test_search_config_errors(capsys, tmp_path):
    assert run(capsys, "search", "--d", "3", "--c", "0")[0] == 2
    assert run(capsys, "search", "--c", "1")[0] == 2
    assert run(capsys, "search", "--d", "3", "--c", "1", "--shards", "4/4")[0] == 2
    ck = tmp_path / "bad.ckpt"
    ck.write_text("garbage")
    assert run(capsys, "search", "--d", "3", "--c", "1", "--checkpoint", str(ck))[0] == 3


def test_search_csv_matches_json(capsys, tmp_path):
    js, cs = tmp_path / "hits.jsonl", tmp_path / "hits.csv"
    code, out, _ = run(capsys, "search", "--d", "3", "--c", "2", "--out", str(js))
    assert code == 0
    summary = json.loads(out)
    assert summary["tested"] == 6912 and summary["dedup_hits"] >= 1
    assert run(capsys, "search", "--d", "3", "--c", "2", "--out", str(cs), "--format", "csv")[0] == 0
    a, b = read_jsonl_hits(str(js)), read_csv_records(str(cs))
    for rec in a + b:
        rec.pop("seconds")
    assert a == b
    header = cs.read_text().splitlines()[0].split(",")
    assert header[:4] == ["D", "u2", "u3", "u4"]


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "lowheight", "estimate", "--d", "3", "--tuple", "1;w-1;2*w-2"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["D"] == 3
