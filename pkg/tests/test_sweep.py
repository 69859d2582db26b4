import json
import math

import numpy as np
import pytest

from povm_realism import sweep
from povm_realism.errors import ValidationError
from povm_realism.states import maximally_mixed


def test_quantity_parse():
    assert sweep.Quantity.parse("LGI") is sweep.Quantity.LGI
    with pytest.raises(ValidationError):
        sweep.Quantity.parse("bogus")


def test_lgi_grid_cells():
    g = sweep.sweep_region("lgi", step=0.1)
    assert g.cell(0.9, 0.0) == (True, pytest.approx(1.215), True)
    valid, value, violated = g.cell(0.8, 0.2)
    assert valid and value == pytest.approx(1.0) and not violated
    assert g.cell(0.9, 0.2)[:2] == (False, None)


def test_grid_shape_and_rows():
    g = sweep.sweep_region("nsit", step=0.1)
    assert g.lambda_axis.size == 11 and g.gamma_axis.size == 21
    rows = list(g.rows())
    assert len(rows) == 11 * 21
    assert rows[0][:2] == (0.0, -1.0) and rows[1][:2] == (0.1, -1.0)
    assert int(g.valid.sum()) == sum(11 - abs(k) for k in range(-10, 11) if abs(k) <= 10)


def test_bad_step():
    with pytest.raises(ValidationError):
        sweep.sweep_region("lgi", step=0.0)
    with pytest.raises(ValidationError):
        sweep.sweep_region("lgi", step=0.2)


def test_csv_layout():
    g = sweep.sweep_region("lgi", step=0.1)
    lines = sweep.render(g, "csv").splitlines()
    assert lines[0] == "lambda,gamma,valid,value,violated"
    assert lines[1] == "0,-1,true,1,false"
    invalid = [ln for ln in lines[1:] if ",false,," in ln]
    assert len(invalid) == int((~g.valid).sum())


def test_csv_three_by_three_and_empty():
    g = sweep.sweep_region("lgi", step=0.1)
    g.lambda_axis, g.gamma_axis = g.lambda_axis[:3], g.gamma_axis[:3]
    for name in ("valid", "values", "violated"):
        setattr(g, name, getattr(g, name)[:3, :3])
    assert len(sweep.render(g, "csv").splitlines()) == 1 + 9
    g.lambda_axis = g.lambda_axis[:0]
    for name in ("valid", "values", "violated"):
        setattr(g, name, getattr(g, name)[:, :0])
    assert sweep.render(g, "csv") == "lambda,gamma,valid,value,violated\n"


def test_json_round_trip():
    g = sweep.sweep_region("wlgi1", step=0.1)
    d = json.loads(sweep.render(g, "json"))
    assert d["quantity"] == "wlgi1" and len(d["cells"]) == g.valid.size
    vals = [c["value"] for c in d["cells"] if c["valid"]]
    assert vals == [float(x) for x in g.values[g.valid]]


def test_emit_is_byte_stable(tmp_path):
    a = sweep.emit(sweep.sweep_region("lgi", step=0.05), "csv", tmp_path / "a.csv")
    b = sweep.emit(sweep.sweep_region("lgi", step=0.05), "csv", tmp_path / "b.csv")
    assert a.read_bytes() == b.read_bytes()
    with pytest.raises(ValidationError):
        sweep.render(sweep.sweep_region("lgi", step=0.1), "xml")


def test_default_filename():
    assert sweep.default_filename("lgi", 0.005) == "lgi_0.005.csv"


def test_lgi_threshold():
    assert sweep.min_lambda("lgi", 0.0) == pytest.approx(math.sqrt(2 / 3), abs=1e-9)
    # (3/2) l^2 + g^2 = 1
    for g in (0.1, -0.15):
        assert sweep.min_lambda("lgi", g) == pytest.approx(math.sqrt((1 - g * g) / 1.5), abs=1e-9)
    assert sweep.min_lambda("lgi", 0.5) is None


def test_chsh_threshold_singlet():
    assert sweep.min_lambda("chsh", 0.0) == pytest.approx(1 / math.sqrt(2), abs=1e-9)
    mixed = sweep.default_scenario("chsh", maximally_mixed())
    assert sweep.threshold_point(mixed, 0.0).lambda_star is None


def test_threshold_curve_serialization():
    c = sweep.threshold_curve("lgi", sweep.gamma_range(-0.2, 0.2, 0.1))
    assert c.gammas == [-0.2, -0.1, 0.0, 0.1, 0.2]
    assert all(p.monotone for p in c.points)
    text = sweep.render(c, "csv")
    assert text.splitlines()[0] == "gamma,lambda_star,monotone"
    assert json.loads(sweep.render(c, "json"))["points"][2]["lambda_star"] == pytest.approx(math.sqrt(2 / 3))


def test_nsit_threshold_near_zero():
    lam_star = sweep.min_lambda("nsit", 0.0)
    assert 0 < lam_star < 1e-3


def test_global_min_none_for_mixed():
    mixed = sweep.default_scenario("chsh", maximally_mixed())
    assert sweep.global_min_lambda("chsh", mixed, gamma_step=0.1) is None


def test_threshold_rejects_bad_gamma():
    with pytest.raises(ValidationError):
        sweep.min_lambda("lgi", 1.5)
