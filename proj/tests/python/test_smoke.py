"""End-to-end smoke checks of the python module against the bundled snapshot."""

import json
import math
import os
from pathlib import Path

import pytest

import ifm

DATA = Path(os.environ.get("IFM_DATA_DIR", Path(__file__).resolve().parents[2] / "data"))


def quick_config(model="constant"):
    cfg = ifm.RunConfig()
    cfg.dir = str(DATA)
    cfg.model = model
    cfg.paths = 128
    cfg.slice_dt = 0.5
    cfg.substeps = 1
    cfg.seed = 4
    return cfg


def test_discount_curve():
    curve = ifm.load_discounts(str(DATA / "discounts.csv"))
    assert curve.discount(0.0) == 1.0
    assert curve.discount(10.0) == pytest.approx(0.7596, rel=1e-14)
    assert curve.discount(1.5) == pytest.approx(math.sqrt(0.9656 * 0.9379), rel=1e-12)


def test_black_parity():
    curve = ifm.DiscountCurve.from_pillars([0.0, 5.0], [1.0, 0.9])
    args = dict(notional=1000.0, kbar=0.01, ref_index=100.0, reset=2.0, pay=2.0)
    cap = ifm.zc_cap_floor(ifm.ZcInstrument(kind=ifm.OptionKind.Cap, **args), curve, 105.0, 0.02)
    floor = ifm.zc_cap_floor(
        ifm.ZcInstrument(kind=ifm.OptionKind.Floor, **args), curve, 105.0, 0.02
    )
    swap = ifm.zc_swap(ifm.ZcInstrument(kind=ifm.OptionKind.Swap, **args), curve, 105.0)
    assert cap.value - floor.value == pytest.approx(swap.value, abs=1e-9)
    vol = ifm.implied_vol(cap.value, ifm.ZcInstrument(kind=ifm.OptionKind.Cap, **args), curve, 105.0)
    assert vol == pytest.approx(0.02, rel=1e-9)


def test_factor_analytics():
    p = ifm.FactorParams.two(-3.689, 3.553, 0.042)
    assert ifm.integrated_zeta(p, 20.0, 20.0, 0.0, 20.0) == pytest.approx(
        49.59630186993296, rel=1e-12
    )
    surface = ifm.load_cpi_vols(str(DATA / "cpi_vols.csv"), 100.0)
    sig = ifm.calibrate_sigmas(p, surface, 0.0)
    assert len(sig) == surface.size == 8
    want = 0.02442 * math.sqrt(1.0 / ifm.integrated_zeta(p, 1.0, 1.0, 0.0, 1.0))
    assert sig[0] == pytest.approx(want, rel=1e-12)


def test_calibrate_sigmas_command(tmp_path):
    out = tmp_path / "sigmas.csv"
    assert ifm.cmd_calibrate_sigmas(quick_config(), 0.0, str(out)) == 0
    rows = out.read_text().strip().splitlines()
    assert rows[0] == "Ti,Kbar,sigma"
    assert len(rows) == 9


def test_price_commands(tmp_path):
    inst = tmp_path / "inst.json"
    inst.write_text(json.dumps({"kind": "zc_swap", "kbar": 0.02, "Ti": 10}))
    out = tmp_path / "price.csv"
    assert ifm.cmd_price(quick_config(), str(inst), str(out)) == 0
    row = out.read_text().strip().splitlines()[1].split(",")
    assert float(row[5]) == pytest.approx(-25.605972488614768, rel=1e-10)

    inst.write_text(
        json.dumps({"kind": "zc_cap", "kbar": 0.0, "Ti": 1, "method": "mc", "notional": 1.0})
    )
    assert ifm.cmd_price(quick_config(), str(inst), str(out)) == 0
    row = out.read_text().strip().splitlines()[1].split(",")
    assert float(row[6]) > 0.0  # mc standard error


def test_errors_cross_the_boundary():
    with pytest.raises(ifm.ValidationError):
        ifm.load_discounts(str(DATA / "no_such_file.csv"))
    with pytest.raises(ifm.ValidationError):
        ifm.load_cpi_vols(str(DATA / "discounts.csv"))  # wrong schema
