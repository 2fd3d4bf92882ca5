import subprocess
import sys

from farpoint.cli import main


def test_simulate_replay_analyze_round_trip(tmp_path):
    log = tmp_path / "session.ndjson"
    results = tmp_path / "results.csv"
    rc = main(["simulate", "--technique", "dual_speed", "--seed", "3",
               "--out", str(log), "--results", str(results), "--sets", "1"])
    assert rc == 0
    assert log.exists() and results.exists()

    rc = main(["replay", str(log)])
    assert rc == 0

    rc = main(["analyze", str(results), "--out", str(tmp_path / "rep"),
               "--format", "csv"])
    assert rc == 0
    assert (tmp_path / "rep" / "conditions.csv").exists()

    rc = main(["fit", str(results)])
    assert rc == 0

    rc = main(["report", str(results), "--format", "txt",
               "--out", str(tmp_path / "rep2")])
    assert rc == 0
    assert (tmp_path / "rep2" / "report.txt").exists()


def test_replay_detects_tampering(tmp_path, capsys):
    import json

    log = tmp_path / "session.ndjson"
    main(["simulate", "--technique", "absolute", "--seed", "1",
          "--out", str(log), "--sets", "1"])
    lines = log.read_text().splitlines()
    for i, line in enumerate(lines[10:], start=10):
        frame = json.loads(line)
        if frame["type"] == "pose":
            frame["seq"] = 1
            lines[i] = json.dumps(frame, separators=(",", ":"))
            break
    log.write_text("\n".join(lines) + "\n")
    assert main(["replay", str(log)]) == 1


def test_measure_latency_loopback(capsys):
    rc = main(["measure-latency", "-n", "200"])
    captured = capsys.readouterr()
    assert rc == 0
    assert "p90" in captured.out


def test_console_script_help():
    proc = subprocess.run([sys.executable, "-m", "farpoint.cli", "--help"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "simulate" in proc.stdout
