import copy
import json
import subprocess
import sys

import pytest

from tracer_hartree.errors import ConfigError, IncompleteRun
from tracer_hartree.experiments.cli import main
from tracer_hartree.experiments.config import load_config, parse_config
from tracer_hartree.experiments.records import RECORD_COLUMNS, Record, read_records, records_to_csv, sha256
from tracer_hartree.experiments.registry import MODE_REQUIRED, QUANTITIES, judge, window
from tracer_hartree.experiments.runner import check_complete, execute, summarize, verify, write_outputs

POT = {"w": {"family": "gaussian_well", "depth": 3.0, "width": 1.5},
       "v": {"family": "gaussian", "amplitude": 1.0, "width": 1.0}, "lambda": 0.5}

GROUND = {"id": "tiny-ground", "mode": "ground_state", "grid": {"dim": 1, "n": 64, "length_over_pi": 8},
          "potentials": POT, "k": [0.0]}

GAUGE = {"id": "tiny-gauge", "mode": "gauge_check", "grid": {"dim": 1, "n": 64, "length_over_pi": 8},
         "potentials": POT, "k": [0.5], "T": 0.1, "dt": 0.005,
         "initial": {"kind": "packet", "width": 1.5, "offset": [1.0]}}

DYN = {"id": "tiny-dyn", "mode": "dynamics", "grid": {"dim": 1, "n": 64, "length_over_pi": 8},
       "potentials": POT, "k": [0.5], "T": 0.2, "dt": 0.02,
       "initial": {"kind": "packet", "width": 1.5, "offset": [1.0]}, "options": {"refine": 1}}


def with_(base, **changes):
    d = copy.deepcopy(base)
    d.update(changes)
    return d


def write_json(tmp_path, data, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(data, indent=2))
    return p


# ---------------------------------------------------------------- config
def test_parse_valid_config():
    cfg = parse_config(GROUND)
    assert cfg.mode == "ground_state"
    assert cfg.k == ((0.0,),)
    assert cfg.tolerance("ground_residual") == QUANTITIES["ground_residual"].tolerance


@pytest.mark.parametrize("bad,field", [
    ({"mode": "nonsense"}, "mode"),
    ({"grid": {"dim": 1, "n": 63, "length": 5.0}}, "grid.n"),
    ({"k": ["fast"]}, "k"),
    ({"tolerances": {"no_such_quantity": 1.0}}, "tolerances"),
])
def test_config_errors_name_field(bad, field):
    with pytest.raises(ConfigError) as info:
        parse_config(with_(GROUND, **bad))
    assert info.value.field is not None and info.value.field.startswith(field.split(".")[0])


def test_config_error_reports_line(tmp_path):
    p = write_json(tmp_path, with_(GROUND, mode="nonsense"))
    with pytest.raises(ConfigError) as info:
        load_config(p)
    lines = p.read_text().splitlines()
    assert '"mode"' in lines[info.value.line - 1]


def test_malformed_json_line(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{\n  "id": "x",\n  "mode": ,\n}')
    with pytest.raises(ConfigError) as info:
        load_config(p)
    assert info.value.line == 3


def test_empty_particle_list_is_config_error():
    d = {"id": "en", "mode": "en_asymptotics", "grid": {"dim": 1, "n": 4, "length_over_pi": 2},
         "potentials": POT, "k": [2.0], "N": []}
    with pytest.raises(ConfigError) as info:
        parse_config(d)
    assert info.value.field == "N"


def test_time_grid_must_divide():
    with pytest.raises(ConfigError):
        parse_config(with_(GAUGE, T=0.1, dt=0.03))


# --------------------------------------------------------------- registry
def test_registry_rules():
    assert window("ground_residual", 1e-9) == (None, 1e-9)
    assert window("boost_delta_mu", 1e-7, target=0.25) == (0.25 - 1e-7, 0.25 + 1e-7)
    assert window("h3_bound_margin", 0.0) == (-0.0, None)
    with pytest.raises(ValueError):
        window("boost_delta_mu", 1e-7)
    assert judge(float("nan"), None, 1.0) is False
    assert judge(1.0, None, None) is None
    for mode, qs in MODE_REQUIRED.items():
        assert all(q in QUANTITIES for q in qs)


def test_records_round_trip(tmp_path):
    recs = [Record("e", "ground_state", "ground_residual", {"k": [1.0], "n": 3}, 1.25e-11, None, 1e-9),
            Record("e", "ground_state", "ground_mu0", {}, -0.1)]
    p = tmp_path / "records.csv"
    p.write_text(records_to_csv(recs))
    back = read_records(p)
    assert [r.row() for r in back] == [r.row() for r in recs]
    assert p.read_text().splitlines()[0] == ",".join(RECORD_COLUMNS)


def test_read_records_rejects_bad_header(tmp_path):
    p = tmp_path / "records.csv"
    p.write_text("a,b\n1,2\n")
    with pytest.raises(IncompleteRun):
        read_records(p)


# ----------------------------------------------------------------- runs
@pytest.fixture(scope="module")
def ground_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("ground")
    res = execute(parse_config(GROUND))
    write_outputs(res, out)
    return res, out


def test_run_outputs_and_manifest(ground_run):
    res, out = ground_run
    assert not res.failures
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config"]["id"] == "tiny-ground"
    assert set(manifest["versions"]) >= {"python", "numpy", "scipy", "tracer_hartree"}
    for name, meta in manifest["files"].items():
        data = (out / name).read_bytes()
        assert sha256(data) == meta["sha256"] and len(data) == meta["bytes"]
    assert (out / "series_energy_history.csv").exists()


def test_verify_all_pass(ground_run, capsys):
    _, out = ground_run
    assert verify(out / "records.csv") == 0
    assert "PASS" in capsys.readouterr().out


def test_verify_detects_injected_shift(ground_run, tmp_path, capsys):
    res, _ = ground_run
    recs = [Record(r.experiment_id, r.mode, r.quantity, r.parameters,
                   r.value + 0.01 if r.quantity == "boost_delta_mu" else r.value, r.lower, r.upper)
            for r in res.records]
    p = tmp_path / "records.csv"
    p.write_text(records_to_csv(recs))
    assert verify(p) == 1
    text = capsys.readouterr().out
    assert "FAIL  boost-chemical-shift" in text


def test_verify_recomputes_pass_flag(ground_run, tmp_path):
    _, out = ground_run
    lines = (out / "records.csv").read_text().splitlines()
    hdr, rows = lines[0], lines[1:]
    tampered = list(rows)
    # Move a value outside its window while leaving passed=true.
    for i, r in enumerate(tampered):
        if ",boost_residual_k," in r:
            parts = r.rsplit(",", 4)
            parts[1] = "1.0"
            assert parts[-1] == "true"
            tampered[i] = ",".join(parts)
    p = tmp_path / "records.csv"
    p.write_text("\n".join([hdr] + tampered) + "\n")
    assert verify(p) == 1


def test_missing_quantity_is_incomplete(ground_run, tmp_path):
    res, _ = ground_run
    recs = [r for r in res.records if r.quantity != "boost_energy_gap"]
    with pytest.raises(IncompleteRun):
        check_complete(recs)
    p = tmp_path / "records.csv"
    p.write_text(records_to_csv(recs))
    assert main(["verify", str(p)]) == 1
    with pytest.raises(IncompleteRun):
        check_complete([])


def test_deterministic_and_parallel_match(tmp_path):
    cfg = parse_config(DYN)
    a = write_outputs(execute(cfg, jobs=1), tmp_path / "a")
    b = write_outputs(execute(cfg, jobs=1), tmp_path / "b")
    c = write_outputs(execute(cfg, jobs=2), tmp_path / "c")
    for name in ("records.csv", "series_trajectory.csv", "series_refinement.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes() == (c / name).read_bytes()


def test_summarize_groups_by_claim():
    res = execute(parse_config(GAUGE))
    claims = {s.claim for s in summarize(res.records)}
    assert "gauge-equivalence" in claims


# ------------------------------------------------------------------ CLI
def test_cli_exit_codes(tmp_path):
    good = write_json(tmp_path, GROUND, "good.json")
    failing = write_json(tmp_path, with_(GROUND, id="tiny-ground-k", k=[1.0]), "fail.json")
    broken = write_json(tmp_path, with_(GROUND, mode="nonsense"), "broken.json")
    assert main(["-q", "run", str(good), "--out", str(tmp_path / "g"), "--strict"]) == 0
    # The boosted multiplier does not shift by k^2/4, so strict mode fails.
    assert main(["-q", "run", str(failing), "--out", str(tmp_path / "f")]) == 0
    assert main(["-q", "run", str(failing), "--out", str(tmp_path / "f"), "--strict"]) == 1
    assert main(["-q", "run", str(broken)]) == 2
    assert main(["-q", "run", str(tmp_path / "missing.json")]) == 2
    assert main(["-q", "run", str(good), "--jobs", "0"]) == 2
    assert main(["verify", str(tmp_path / "g" / "records.csv")]) == 0
    assert main(["verify", str(tmp_path / "f" / "records.csv")]) == 1
    assert main(["verify", str(tmp_path / "nowhere.csv")]) == 2


def test_console_script_entry_point(tmp_path):
    good = write_json(tmp_path, GROUND, "good.json")
    proc = subprocess.run([sys.executable, "-m", "tracer_hartree.experiments.cli", "-q", "run", str(good),
                           "--out", str(tmp_path / "o")], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "o" / "records.csv").exists()
