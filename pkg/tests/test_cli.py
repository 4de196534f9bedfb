from ecoslice.cli import main


def test_cli_generate_run_report_ablate(tmp_path, capsys):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("trace:\n  sadi_count: 144\nJ: 50\nbetas: [1]\n")
    assert main(["generate", "--config", str(cfg), "--seed", "2", "--out", str(tmp_path / "t.csv")]) == 0
    assert (tmp_path / "t.csv").read_text().startswith("sadi,slice,user_id,delay_req_ms,load")
    out = tmp_path / "o"
    assert main(["run", "--config", str(cfg), "--out-dir", str(out), "--agent", "Random"]) == 0
    assert (out / "steps_Random_1_0.csv").exists() and (out / "steps_AllActive_1_0.csv").exists()
    assert main(["report", "--out-dir", str(out)]) == 0
    assert (out / "report.csv").exists()
    assert main(["ablate", "--config", str(cfg), "--out-dir", str(out)]) == 0
    assert (out / "ablation.csv").exists()
    assert "Thompson-C" in capsys.readouterr().out


def test_cli_errors(tmp_path, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text("window: 0\n")
    assert main(["run", "--config", str(bad)]) == 2
    assert "window" in capsys.readouterr().err
    assert main(["report", "--out-dir", str(tmp_path)]) == 1
