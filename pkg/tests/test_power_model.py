import pytest

from socrm.power_model import (APU, PL, PowerModel, UncalibratedConfigError)

TABLE_ROWS = {
    (APU, 8): (425, 2064, 1187, 3676),
    (APU, 1024): (537, 2224, 1187, 3948),
    (PL, 2048): (965, 2024, 1365, 4354),
    (PL, 4096): (1358, 2024, 1584, 4966),
}


@pytest.fixture
def model():
    return PowerModel()


@pytest.mark.parametrize("config,row", TABLE_ROWS.items())
def test_breakdown_rows(model, config, row):
    b = model.power_breakdown(*config)
    assert (b.ddr_mw, b.apu_mw, b.pl_mw, b.total_mw) == row


@pytest.mark.parametrize("config", TABLE_ROWS)
def test_additivity(model, config):
    b = model.power_breakdown(*config)
    assert b.total_mw == b.ddr_mw + b.apu_mw + b.pl_mw


def test_static_rail_marks_non_hosting_domain(model):
    assert model.power_breakdown(APU, 8).static_rails == {PL}
    assert model.power_breakdown(PL, 2048).static_rails == {APU}


def test_inactive_rail_equals_static_constant(model):
    assert model.power_breakdown(APU, 1024).pl_mw == model.static_power(PL) == 1187
    assert model.power_breakdown(PL, 4096).apu_mw == model.static_power(APU) == 2024


def test_static_below_active(model):
    assert model.static_power(PL) < model.power_breakdown(PL, 2048).pl_mw


def test_total_monotone_in_points(model):
    totals = [model.power_breakdown(d, p).total_mw for d, p in model.configurations()]
    assert totals == sorted(totals)


def test_ddr_strictly_increasing(model):
    ddr = [model.power_breakdown(d, p).ddr_mw for d, p in model.configurations()]
    assert all(a < b for a, b in zip(ddr, ddr[1:]))


def test_uncalibrated_configuration_rejected(model):
    with pytest.raises(UncalibratedConfigError):
        model.power_breakdown(PL, 8)
    with pytest.raises(UncalibratedConfigError):
        model.power_breakdown(APU, 4096)
