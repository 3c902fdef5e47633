import csv
import io
import json

import numpy as np
import pytest

from mhd_wavekit import ConservedState, FluidState, GasLaw, rarefaction_integrate
from mhd_wavekit.cli import main, run_scenario
from mhd_wavekit.serialize import curve_columns, curve_rows, dumps, emit_plot_data, parse_state

LAW = {"gamma": 5.0 / 3.0, "beta": 1.0}
LEFT = {"v": 1.0, "B2": 0.5, "B3": 0.0, "u1": 0.0, "u2": 0.0, "u3": 0.0}


def scenario(tmp_path, name="s.json", **parts):
    doc = {"law": LAW, "left": LEFT, "output": {"dir": str(tmp_path / "out")}}
    doc.update(parts)
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return p


def run(path, sub="run", *extra):
    buf = io.StringIO()
    import contextlib
    with contextlib.redirect_stdout(buf):
        code = main([sub, "--scenario", str(path), *extra])
    return code, buf.getvalue()


def test_fields_shape(tmp_path):
    p = scenario(tmp_path, analysis={"fields": {"check": True}})
    code, out = run(p)
    assert code == 0 and out.startswith("fields:")
    data = json.loads((tmp_path / "out" / "fields.json").read_text())
    assert len(data["eigenvalues"]) == 6
    assert len(data["eigenvectors"]) == 6 and all(len(r) == 6 for r in data["eigenvectors"])
    assert len(data["gnl_derivatives"]) == 6
    assert data["check"]["passed"]


def test_subcommand_without_analysis_field(tmp_path):
    p = scenario(tmp_path)
    code, out = run(p, "fields")
    assert code == 0


def test_subcommand_analysis_mismatch_is_input_error(tmp_path):
    p = scenario(tmp_path, analysis={"fields": {}})
    assert run(p, "certify")[0] == 4


def test_shock_with_equal_volumes_is_input_error(tmp_path):
    p = scenario(tmp_path, wave_request={"shock": {"family": 3, "v_right": 1.0}},
                 analysis={"hugoniot": {}})
    code, out = run(p)
    assert code == 4


def test_schema_violation_points_at_field(tmp_path, capsys):
    p = scenario(tmp_path, wave_request={"shock": {"family": 7, "v_right": 0.9}},
                 analysis={"hugoniot": {}})
    code = main(["run", "--scenario", str(p)])
    assert code == 4
    assert "/wave_request/shock/family" in capsys.readouterr().err


def test_unreadable_scenario(tmp_path):
    assert main(["run", "--scenario", str(tmp_path / "missing.json")]) == 4
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["run", "--scenario", str(bad)]) == 4


def test_bad_arguments_exit_4():
    assert main(["nope", "--scenario", "x"]) == 4


def test_no_shock_exit_3(tmp_path):
    p = scenario(tmp_path, wave_request={"shock": {"family": 3, "v_right": 0.8}},
                 analysis={"hugoniot": {}})
    assert run(p)[0] == 3


def test_inconclusive_exit_2(tmp_path):
    p = scenario(tmp_path, left={"v": 1, "B2": 1, "B3": -1, "u1": 0, "u2": 0, "u3": 0},
                 wave_request={"contact": {"family": 2, "angle": 0.4}},
                 analysis={"certify": {"a": 1.0}})
    assert run(p)[0] == 2


def test_hugoniot_wave_json(tmp_path):
    p = scenario(tmp_path, wave_request={"shock": {"family": 3, "v_right": 0.9}},
                 analysis={"hugoniot": {}})
    code, out = run(p)
    assert code == 0 and out.startswith("hugoniot:")
    data = json.loads((tmp_path / "out" / "wave.json").read_text())
    assert set(data) >= {"left", "right", "sigma", "family", "checks"}
    assert set(data["checks"]) >= {"rh", "lax", "dissipation"}
    assert data["checks"]["lax"]["passed"]


def test_state_json_round_trip(tmp_path):
    p = scenario(tmp_path, wave_request={"shock": {"family": 4, "v_right": 1.37}},
                 analysis={"hugoniot": {}})
    run(p)
    data = json.loads((tmp_path / "out" / "wave.json").read_text())
    from mhd_wavekit import ShockSolveRequest, solve_shock
    w = solve_shock(ShockSolveRequest(FluidState(**LEFT), 4, 1.37, GasLaw(**LAW)))
    back = parse_state(data["right"])
    assert isinstance(back, ConservedState)
    assert np.allclose(back.as_array(), w.right.as_array(), rtol=1e-15, atol=0)


def test_emit_single_sample_curve(tmp_path, law53, left53):
    curve = rarefaction_integrate(left53, 6, law53, v_floor=left53.v)
    path = emit_plot_data(curve_rows(curve), curve_columns(6), tmp_path / "c.csv")
    lines = path.read_text().splitlines()
    assert lines[0] == "v,B2,B3,u1,u2,u3,lambda_6"
    assert len(lines) == 2
    manifest = json.loads((tmp_path / "c.manifest.json").read_text())
    assert manifest["columns"] == curve_columns(6)
    assert set(manifest) >= {"columns", "wave", "a", "branch"}


def test_emit_rejects_empty(tmp_path):
    from mhd_wavekit import InvalidRequestError
    with pytest.raises(InvalidRequestError):
        emit_plot_data([], ["v"], tmp_path / "e.csv")


def test_certificate_trace_ends_on_sigma(tmp_path):
    p = scenario(tmp_path, wave_request={"shock": {"family": 3, "v_right": 0.9}},
                 analysis={"certify": {"a": 3.0}})
    code, out = run(p)
    assert code == 0
    cert = json.loads((tmp_path / "out" / "certificate.json").read_text())
    assert set(cert) >= {"a", "branch", "witness", "crossing_v", "conditions",
                         "F_at_witness", "trace_file"}
    rows = list(csv.reader((tmp_path / "out" / cert["trace_file"]).open()))
    assert rows[0][:2] == ["v", "F_a"]
    assert abs(float(rows[-1][1])) <= 1e-9 * cert["scale"]


def test_sweep_on_reference_shock_example(tmp_path, capsys):
    # B_l = (0.5, 0), gamma = 5/3, beta = 1, v_l = 1, v_r = 0.8: the
    # independent Hugoniot oracle finds no admissible slow shock here
    # (they exist only for v_r in roughly (0.8745, 1)), so the run stops
    # before any certificate is attempted
    p = scenario(tmp_path, wave_request={"shock": {"family": 3, "v_right": 0.8}},
                 analysis={"sweep-a": {"grid": {"lo": 0.01, "hi": 100, "n": 17}}})
    code = main(["run", "--scenario", str(p)])
    assert code == 3
    assert "NoShock" in capsys.readouterr().err
    assert not (tmp_path / "out" / "sweep.json").exists()


def test_sweep_supplementary_switch_off_side(tmp_path):
    # same left state, v_r = 0.9 where a slow shock exists
    p = scenario(tmp_path, wave_request={"shock": {"family": 3, "v_right": 0.9}},
                 analysis={"sweep-a": {"grid": {"lo": 0.01, "hi": 100, "n": 17}}})
    code, out = run(p, "run", "--jobs", "4")
    assert code == 0 and "17/17" in out
    data = json.loads((tmp_path / "out" / "sweep.json").read_text())
    assert len(data["entries"]) == 17


def test_a_grid_override(tmp_path):
    p = scenario(tmp_path, wave_request={"shock": {"family": 3, "v_right": 0.9}},
                 analysis={"sweep-a": {}})
    code, out = run(p, "sweep-a", "--a-grid", "0.5,2,3")
    assert code == 0 and "3/3" in out
    assert run(p, "sweep-a", "--a-grid", "0.5,2")[0] == 4


def test_rarefaction_and_dissipation(tmp_path):
    p = scenario(tmp_path, wave_request={"shock": {"family": 3, "v_right": 0.9}},
                 analysis={"rarefaction": {"family": 6, "origin": "right", "v_floor": 0.1}})
    assert run(p)[0] == 0
    assert (tmp_path / "out" / "rarefaction_R6.csv").exists()
    p = scenario(tmp_path, "d.json", wave_request={"shock": {"family": 3, "v_right": 0.9}},
                 analysis={"dissipation": {}})
    code, out = run(p)
    assert code == 0 and "factored" in out


def test_run_scenario_outputs_are_deterministic(tmp_path):
    outs = []
    for k in range(2):
        d = tmp_path / f"run{k}"
        p = scenario(tmp_path, f"s{k}.json", wave_request={"shock": {"family": 3, "v_right": 0.9}},
                     analysis={"sweep-a": {}}, output={"dir": str(d)})
        assert run_scenario(p, "run") == 0
        outs.append({f.name: f.read_bytes() for f in sorted(d.iterdir())})
    assert outs[0] == outs[1]


def test_float_format_round_trips():
    xs = [0.1, 1 / 3, 1e-300, -2.5e17, 5e-324]
    back = json.loads(dumps(xs))
    assert back == xs
