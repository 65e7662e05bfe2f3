import subprocess
import sys

import pytest

from covertlab.cli import EXIT_CAPACITY, EXIT_IO, EXIT_OK, EXIT_USAGE, main
from covertlab.traces import read_trace

from conftest import ENGLISH


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def legit(tmp_path, capsys):
    path = tmp_path / "legit.trace"
    assert run(capsys, "gen", "--packets", 3000, "--mix", "ipv4,tcp,esp", "--seed", 7,
               "--out", path)[0] == EXIT_OK
    return path


TRAPDOOR_SETS = [
    ["ipv4:identification:scheme1"],
    ["tcp:sequence_number:scheme2"],
    ["tcp:options_timestamp:scheme3"],
    ["esp:sequence_number:esp"],
    ["esp:padding:esp-subliminal"],
    ["ipv4:tos:direct"],
    ["tcp:reserved:direct"],
    ["ipv4:identification:ip-id-modulus", "tcp:sequence_number:seq-scale",
     "tcp:options_timestamp:timestamp-lsb", "esp:padding:esp"],
    ["ipv4:options:direct", "ipv4:flags_frag:direct", "tcp:window:direct",
     "tcp:urgent_pointer:direct", "tcp:flags_unused:direct", "tcp:ack_number:direct"],
]


@pytest.mark.parametrize("trapdoors", TRAPDOOR_SETS)
def test_gen_embed_extract(tmp_path, capsys, legit, trapdoors):
    out = tmp_path / "covert.trace"
    flags = [x for t in trapdoors for x in ("--trapdoor", t)]
    code, _, _ = run(capsys, "embed", "--in", legit, "--out", out, *flags, "--payload", "Hello, world")
    assert code == EXIT_OK
    code, stdout, _ = run(capsys, "extract", "--in", out, *flags, "--bytes", 12)
    assert code == EXIT_OK
    assert stdout == "Hello, world\n"


def test_hex_payload(tmp_path, capsys, legit):
    out = tmp_path / "c.trace"
    assert run(capsys, "embed", "--in", legit, "--out", out, "--trapdoor",
               "ipv4:identification:scheme1", "--payload-hex", "00ff10")[0] == EXIT_OK
    code, stdout, _ = run(capsys, "extract", "--in", out, "--trapdoor",
                          "ipv4:identification:scheme1", "--bytes", 3, "--hex")
    assert stdout.strip() == "00ff10"


def test_capacity_exit_code(tmp_path, capsys, legit):
    code, _, err = run(capsys, "embed", "--in", legit, "--out", tmp_path / "x",
                       "--trapdoor", "tcp:options_timestamp:scheme3", "--payload", "x" * 200)
    assert code == EXIT_CAPACITY
    assert "options_timestamp" in err


def test_constraint_exit_code(tmp_path, capsys, legit):
    code, _, _ = run(capsys, "embed", "--in", legit, "--out", tmp_path / "x",
                     "--trapdoor", "esp:padding:esp", "--trapdoor", "esp:sequence_number:esp",
                     "--payload", "x")
    assert code == EXIT_CAPACITY


def test_usage_exit_codes(tmp_path, capsys, legit):
    with pytest.raises(SystemExit) as exc:
        main(["embed", "--in", str(legit)])
    assert exc.value.code == EXIT_USAGE
    code, _, _ = run(capsys, "embed", "--in", legit, "--out", tmp_path / "x",
                     "--trapdoor", "ipv4:identification", "--payload", "x")
    assert code == EXIT_USAGE
    code, _, _ = run(capsys, "embed", "--in", legit, "--out", tmp_path / "x",
                     "--trapdoor", "ipv4:identification:scheme1", "--payload-hex", "zz")
    assert code == EXIT_USAGE


def test_io_exit_codes(tmp_path, capsys):
    code, _, _ = run(capsys, "metrics", "--in", tmp_path / "missing")
    assert code == EXIT_IO
    bad = tmp_path / "bad.trace"
    bad.write_text("covertlab-trace v1 2\n0 IPv4 identification=99999\n")
    code, _, err = run(capsys, "metrics", "--in", bad)
    assert code == EXIT_IO
    assert "declares 2" in err


def test_scenario_noisy(tmp_path, capsys):
    out = tmp_path / "noisy.trace"
    code, _, _ = run(capsys, "scenario", "--kind", "noisy", "--packets", 500, "--overt-fraction", 0.5,
                     "--seed", 3, "--trapdoor", "ipv4:identification:scheme1",
                     "--trapdoor", "esp:padding:esp", "--payload", "attack at dawn", "--out", out)
    assert code == EXIT_OK
    trace = read_trace(out)
    assert any(p.covert_marker for p in trace) and not all(p.covert_marker for p in trace)
    code, stdout, _ = run(capsys, "extract", "--in", out, "--marked-only",
                          "--trapdoor", "ipv4:identification:scheme1", "--trapdoor", "esp:padding:esp",
                          "--bytes", 14)
    assert stdout == "attack at dawn\n"


def test_scenario_noiseless(tmp_path, capsys):
    out = tmp_path / "hop.trace"
    chans = ["--channel", "ipv4:identification:scheme1",
             "--channel", "tcp:sequence_number:scheme2,tcp:options_timestamp:scheme3"]
    code, _, _ = run(capsys, "scenario", "--kind", "noiseless", "--packets", 300, "--hop-period", 25,
                     "--seed", 1, *chans, "--payload", "hopping payload", "--out", out)
    assert code == EXIT_OK
    code, stdout, _ = run(capsys, "extract", "--in", out, "--hop-period", 25, *chans, "--bytes", 15)
    assert stdout == "hopping payload\n"


def test_baseline_detect_pipeline(tmp_path, capsys):
    clean = tmp_path / "clean.trace"
    train = tmp_path / "train.trace"
    prof = tmp_path / "base.profile"
    run(capsys, "gen", "--packets", 6000, "--mix", "ipv4,tcp", "--seed", 1, "--out", train)
    run(capsys, "gen", "--packets", 6000, "--mix", "ipv4,tcp", "--seed", 2, "--out", clean)
    assert run(capsys, "baseline", "--in", train, "--out", prof)[0] == EXIT_OK
    assert prof.read_text().splitlines()[0].startswith("IPv4 identification LowByte ")

    code, stdout, _ = run(capsys, "detect", "--in", clean, "--profile", prof)
    assert code == EXIT_OK
    assert stdout.strip().endswith("verdict: Clean")

    covert = tmp_path / "covert.trace"
    run(capsys, "embed", "--in", clean, "--out", covert, "--trapdoor", "ipv4:identification:scheme1",
        "--payload", ENGLISH[:700].decode())
    code, stdout, _ = run(capsys, "detect", "--in", covert, "--profile", prof)
    assert stdout.strip().endswith("verdict: Suspicious")
    assert "IPv4:identification:LowByte" in stdout


def test_baseline_too_little_data(tmp_path, capsys, legit):
    code, _, _ = run(capsys, "baseline", "--in", legit, "--out", tmp_path / "p")
    assert code == EXIT_CAPACITY


def test_metrics(capsys, legit):
    code, stdout, _ = run(capsys, "metrics", "--in", legit, "--field", "ipv4:identification:lowbyte",
                          "--window", 256)
    assert code == EXIT_OK
    assert stdout.startswith("IPv4:identification:LowByte: H=")
    assert "windows:" in stdout


def test_tables(capsys):
    code, stdout, _ = run(capsys, "tables")
    assert code == EXIT_OK
    assert "Table 4" in stdout and "FIXTURE-ONLY" in stdout


def test_module_entry_point():
    result = subprocess.run([sys.executable, "-m", "covertlab", "tables"],
                            capture_output=True, text=True, check=False)
    assert result.returncode == 0
    assert "NetworkCovert Channel-IPv4-Single" in result.stdout
