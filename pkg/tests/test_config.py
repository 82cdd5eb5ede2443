import pytest
from pydantic import ValidationError

from leavitt_lab.config import Settings, get_settings
from leavitt_lab.scalar import Field as ScalarField


def test_defaults(monkeypatch):
    monkeypatch.delenv("LEAVITT_FIELD", raising=False)
    settings = Settings(_env_file=None)

    assert settings.field == "q"
    assert settings.dim_cap == 4096
    assert settings.output_format == "text"
    assert settings.log_level == "WARNING"


def test_environment_is_read(monkeypatch):
    monkeypatch.setenv("LEAVITT_FIELD", "FP:7")
    monkeypatch.setenv("LEAVITT_SAMPLES", "5")

    settings = Settings(_env_file=None)

    assert settings.field == "fp:7"
    assert settings.samples == 5


def test_overrides_win_over_environment(monkeypatch):
    monkeypatch.setenv("LEAVITT_SEED", "3")

    assert get_settings(seed=11).seed == 11
    assert get_settings(seed=11, field=None).field == "q"


@pytest.mark.parametrize(
    "overrides",
    [
        {"field": "fp:4"},
        {"field": "r"},
        {"field": "fp:2147483659"},
        {"dim_cap": 0},
        {"samples": -1},
        {"seed": -2},
        {"output_format": "yaml"},
    ],
)
def test_invalid_settings(overrides):
    with pytest.raises(ValidationError):
        Settings(_env_file=None, **overrides)


@pytest.mark.parametrize("spec", [" Q ", "fp:07", "FP:2147483647"])
def test_field_setting_matches_scalar_field(spec):
    assert Settings(_env_file=None, field=spec).field == ScalarField.from_spec(spec).spec


def test_field_setting_reports_modulus_error():
    with pytest.raises(ValidationError) as info:
        Settings(_env_file=None, field="fp:9")

    assert "prime below 2^31" in str(info.value)
