import json
import math

import numpy as np
import pytest

from qlg import lattice, sampling
from qlg.checks import Check
from qlg.cli import main
from qlg.config import parse_config
from qlg.errors import ConfigError
from qlg.experiments import RunReport, run
from qlg.output import SNAPSHOT_COLUMNS, emit, read_csv, read_snapshot, write_csv, write_snapshot


def _diags(text, **overrides):
    with pytest.raises(ConfigError) as info:
        parse_config(text, overrides or None)
    return info.value.diagnostics


def test_valid_dispersion_config():
    cfg = parse_config("experiment = dispersion\nm_tau = 0.6\nsites = 64\n")
    assert (cfg.experiment, cfg.m_tau, cfg.sites) == ("dispersion", 0.6, 64)


def test_mass_domain_violation_has_line_number():
    d = _diags("experiment = dispersion\n# comment\nm_tau = 1.5\n")
    assert d == ["line 3: m_tau ∉ [0,1] (got 1.5)"]


def test_empty_file():
    assert _diags("") == ["missing required key 'experiment'"]


def test_all_violations_reported_together():
    d = _diags("m_tau = 1.5\nbogus = 1\nsites = abc\nsites = 3\n")
    text = "\n".join(d)
    assert "line 2: unknown key 'bogus'" in text
    assert "line 3: invalid value for 'sites'" in text
    assert "missing required key 'experiment'" in text
    assert "line 1: m_tau ∉ [0,1]" in text


def test_duplicate_and_malformed_lines():
    d = _diags("experiment = verify\nexperiment = verify\njunk\n")
    assert d[0].startswith("line 2: duplicate key 'experiment'")
    assert d[1].startswith("line 3: expected 'key = value'")


def test_missing_experiment_specific_keys():
    d = _diags("experiment = bcs\neps = 0.3\n")
    assert "missing required key 'delta' for experiment 'bcs'" in d
    assert "missing required key 'steps' for experiment 'bcs'" in d


def test_gate_parameter_domains():
    d = _diags("experiment = bdg\neps = 3\ndelta = 4\nsteps = 1\n")
    assert any("E_tau = 5 ∉ [0,1]" in x for x in d)
    d = _diags("experiment = bcs\neps = 3\ndelta = 4\nsteps = 1\nE_tau = 1.2\n")
    assert any(x.startswith("line 5: E_tau ∉ [0,1]") for x in d)
    d = _diags("experiment = superfluid\nsteps = 1\npairing_mode = uniform\ndelta = 2\n")
    assert any("|delta| tau ∉ [0,1]" in x for x in d)


def test_e_tau_sets_time_step():
    cfg = parse_config("experiment = bcs\neps = 3\ndelta = 4i\nsteps = 2\nE_tau = 0.5\n")
    assert cfg.delta == 4j
    assert cfg.tau == pytest.approx(0.1)


def test_pairs_and_seed():
    cfg = parse_config("experiment = bcs\neps = 0.3\ndelta = 0.4\nsteps = 1\nqubits = 6\npairs = 1-4, 2-5, 3-6\nseed = 0xffffffffffffffff\n")
    assert cfg.pairs == ((1, 4), (2, 5), (3, 6))
    assert cfg.seed == 2**64 - 1
    d = _diags("experiment = bcs\neps = 0.3\ndelta = 0.4\nsteps = 1\npairs = 1-2, 2-3\n")
    assert any("disjoint" in x for x in d)


def test_overrides_take_precedence():
    cfg = parse_config("experiment = verify\nseed = 3\n", {"seed": 9, "output": "x"})
    assert cfg.seed == 9 and cfg.output == "x"


def test_snapshot_round_trip_is_bit_exact(tmp_path):
    psi = lattice.random_field(33, sampling.make_rng(1))
    psi[0, 0] = -0.0
    psi[1, 1] = 5e-324 + 1e300j
    path = write_snapshot(tmp_path / "snapshot.csv", psi)
    back = read_snapshot(path)
    assert back.tobytes() == psi.tobytes()
    header, rows = read_csv(path)
    assert tuple(header) == SNAPSHOT_COLUMNS
    assert header[0] == "re_L_up" and header[-1] == "im_R_dn"
    assert len(rows) == 33


def test_empty_table_is_header_only(tmp_path):
    path = write_csv(tmp_path / "t.csv", ("a", "b"), [])
    assert path.read_bytes() == b"a,b\r\n"


def test_unwritable_path_is_named(tmp_path):
    target = tmp_path / "missing" / "deeper" / "t.csv"
    with pytest.raises(OSError, match="deeper"):
        write_csv(target, ("a",), [])


def test_report_json_carries_residual_and_tolerance(tmp_path):
    report = RunReport("verify", checks=[Check("x", 1e-13, 1e-12), Check("y", math.nan, 1.0)])
    emit(report, tmp_path)
    doc = json.loads((tmp_path / "report.json").read_text())
    assert doc["ok"] is False
    assert doc["checks"][0] == {"name": "x", "passed": True, "residual": 1e-13, "comparator": "<=", "tolerance": 1e-12, "detail": ""}
    assert doc["checks"][1]["residual"] is None
    assert report.exit_code == 2


def test_dispersion_run_format():
    report = run(parse_config("experiment = dispersion\nm_tau = 0.6\nsites = 64\n"))
    assert report.columns == ("k_ell", "omega_tau_1", "omega_tau_2", "omega_tau_3", "omega_tau_4", "p_eff_ell", "residual")
    assert len(report.rows) == 64
    assert report.ok


def test_dirac1d_long_run():
    report = run(parse_config("experiment = dirac1d\nm_tau = 0.3\nsites = 256\nsteps = 10000\nsnapshot = false\n"))
    norms = np.array([r[1] for r in report.rows])
    assert len(norms) == 10_001
    assert np.max(np.abs(norms - norms[0])) <= 1e-10
    assert report.snapshot is None
    assert report.ok


def test_runtime_gap_overflow_lands_in_report():
    report = run(parse_config("experiment = superfluid\nsites = 16\nsteps = 5\nlambda = 1000\npairing_mode = local\n"))
    assert len(report.errors) == 1
    assert report.errors[0].startswith("step 0: gap overflow at site 0")
    assert report.exit_code == 2


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_cli_dispersion(tmp_path):
    cfg = _write(tmp_path, "d.cfg", "experiment = dispersion\nm_tau = 0.6\nsites = 64\n")
    out = tmp_path / "out"
    assert main(["dispersion", "--config", cfg, "--out", str(out)]) == 0
    assert sorted(p.name for p in out.iterdir()) == ["dispersion.csv", "report.json"]
    header, rows = read_csv(out / "dispersion.csv")
    assert header[0] == "k_ell" and len(rows) == 64


def test_cli_usage_errors(tmp_path, capsys):
    assert main([]) == 1
    assert main(["nonsense"]) == 1
    assert main(["dispersion"]) == 1
    assert main(["dispersion", "--config", str(tmp_path / "nope.cfg")]) == 1
    cfg = _write(tmp_path, "bad.cfg", "experiment = dispersion\nm_tau = 1.5\n")
    assert main(["dispersion", "--config", cfg]) == 1
    assert "line 2: m_tau ∉ [0,1]" in capsys.readouterr().err
    cfg = _write(tmp_path, "other.cfg", "experiment = dispersion\nm_tau = 0.5\n")
    assert main(["dirac1d", "--config", cfg]) == 1
    assert main(["dispersion", "--config", cfg, "--seed", "-1"]) == 1
    assert main(["dispersion", "--config", cfg, "--threads", "0"]) == 1


def test_cli_threads_env_fallback(tmp_path, monkeypatch):
    cfg = _write(tmp_path, "d.cfg", "experiment = dispersion\nm_tau = 0.2\nsites = 8\n")
    monkeypatch.setenv("QLG_THREADS", "many")
    assert main(["dispersion", "--config", cfg, "--out", str(tmp_path / "o")]) == 1
    monkeypatch.setenv("QLG_THREADS", "3")
    assert main(["dispersion", "--config", cfg, "--out", str(tmp_path / "o")]) == 0


def test_cli_runtime_failure_exit_code(tmp_path):
    cfg = _write(tmp_path, "s.cfg", "experiment = superfluid\nsites = 16\nsteps = 5\nlambda = 1000\npairing_mode = local\n")
    out = tmp_path / "o"
    assert main(["superfluid", "--config", cfg, "--out", str(out)]) == 2
    doc = json.loads((out / "report.json").read_text())
    assert doc["ok"] is False and doc["errors"]


CONFIGS = {
    "dirac1d": "experiment = dirac1d\nm_tau = 0.4\nsites = 32\nsteps = 50\n",
    "dispersion": "experiment = dispersion\nm_tau = 0.6\nsites = 64\n",
    "bcs": "experiment = bcs\neps = 0.3\ndelta = 0.4-0.2i\nE_tau = 0.6\nsteps = 8\n",
    "bdg": "experiment = bdg\neps = 0.3\ndelta = 0.5i\nsteps = 20\n",
    "superfluid": "experiment = superfluid\nsites = 32\nsteps = 40\nlambda = 8\npairing_mode = local\n",
    "trotter-compare": "experiment = trotter-compare\n",
}


@pytest.mark.parametrize("experiment", sorted(CONFIGS))
def test_cli_outputs_identical_across_threads(tmp_path, experiment):
    cfg = _write(tmp_path, "c.cfg", CONFIGS[experiment])
    outs = []
    for threads in (1, 4):
        out = tmp_path / f"t{threads}"
        assert main([experiment, "--config", cfg, "--out", str(out), "--seed", "42", "--threads", str(threads)]) == 0
        outs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
    assert outs[0] == outs[1]
    assert "report.json" in outs[0]


def test_seed_changes_random_initial_field(tmp_path):
    cfg = _write(tmp_path, "c.cfg", CONFIGS["dirac1d"])
    main(["dirac1d", "--config", cfg, "--out", str(tmp_path / "a"), "--seed", "1"])
    main(["dirac1d", "--config", cfg, "--out", str(tmp_path / "b"), "--seed", "2"])
    assert (tmp_path / "a" / "snapshot.csv").read_bytes() != (tmp_path / "b" / "snapshot.csv").read_bytes()


def test_report_metadata_names_rng(tmp_path):
    cfg = _write(tmp_path, "c.cfg", CONFIGS["bdg"])
    main(["bdg", "--config", cfg, "--out", str(tmp_path)])
    meta = json.loads((tmp_path / "report.json").read_text())["metadata"]
    assert meta["rng"] == sampling.RNG_ALGORITHM
    assert "threads" not in meta and "output" not in meta["config"]
