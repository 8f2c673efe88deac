import math

import pytest

from dressedspin.configfile import apply_overrides, load_config, parse_config_text
from dressedspin.errors import ConfigFileError

from conftest import KHZ

EXAMPLE = """
# anisotropy run
spin = half

[static]
x = 3.0
y = 0
z = 5.979

[dressing]
frequency = 30.0
amplitude = 55.0   # xi = 55/30

[[tuning]]
axis = y
amplitude = 0.354
harmonic = 1
phase = 90deg
"""


def test_parse_example():
    cfg = parse_config_text(EXAMPLE)
    assert cfg.spin == "half"
    assert cfg.static.omega0x == pytest.approx(3.0 * KHZ)
    assert cfg.static.omega0z == pytest.approx(5.979 * KHZ)
    assert cfg.dressing.omega == pytest.approx(30.0 * KHZ)
    assert cfg.xi() == pytest.approx(55.0 / 30.0)
    (comp,) = cfg.tuning
    assert comp.axis == "y"
    assert comp.amplitude == pytest.approx(0.354 * KHZ)
    assert comp.harmonic == 1
    assert comp.phase == pytest.approx(math.pi / 2)


def test_parse_phase_radians():
    cfg = parse_config_text(
        "[dressing]\nfrequency = 10\n[[tuning]]\naxis = z\namplitude = 1\nharmonic = 2\nphase = 1.5rad\n"
    )
    assert cfg.tuning[0].phase == pytest.approx(1.5)


def test_load_config_roundtrip(tmp_path):
    path = tmp_path / "drive.cfg"
    path.write_text(EXAMPLE)
    cfg = load_config(path)
    assert cfg.dressing.omega == pytest.approx(30.0 * KHZ)


def test_error_reports_line_and_key():
    bad = "[dressing]\nfrequency = 10\n[static]\nx = not_a_number\n"
    with pytest.raises(ConfigFileError) as err:
        parse_config_text(bad, source="drive.cfg")
    assert err.value.line == 4
    assert err.value.key == "x"
    assert "drive.cfg:4" in str(err.value)


def test_error_unknown_key():
    with pytest.raises(ConfigFileError) as err:
        parse_config_text("[dressing]\nfrequency = 10\nwobble = 3\n")
    assert err.value.key == "wobble"
    assert err.value.line == 3


def test_error_unknown_section():
    with pytest.raises(ConfigFileError) as err:
        parse_config_text("[coils]\nturns = 3\n")
    assert err.value.line == 1


def test_error_missing_dressing_frequency():
    with pytest.raises(ConfigFileError) as err:
        parse_config_text("[static]\nz = 1\n")
    assert err.value.key == "dressing.frequency"


def test_error_phase_without_suffix():
    bad = "[dressing]\nfrequency = 10\n[[tuning]]\naxis = y\namplitude = 1\nharmonic = 1\nphase = 90\n"
    with pytest.raises(ConfigFileError) as err:
        parse_config_text(bad)
    assert err.value.key == "phase"
    assert "deg" in str(err.value)


def test_error_duplicate_key():
    with pytest.raises(ConfigFileError) as err:
        parse_config_text("[dressing]\nfrequency = 10\nfrequency = 11\n")
    assert err.value.line == 3


def test_error_missing_tuning_field():
    bad = "[dressing]\nfrequency = 10\n[[tuning]]\naxis = y\namplitude = 1\n"
    with pytest.raises(ConfigFileError) as err:
        parse_config_text(bad)
    assert err.value.key == "harmonic"


def test_overrides():
    cfg = parse_config_text(EXAMPLE)
    cfg = apply_overrides(
        cfg,
        ["static.x=1.25", "dressing.frequency=9", "tuning.0.phase=45deg", "spin=one"],
    )
    assert cfg.static.omega0x == pytest.approx(1.25 * KHZ)
    assert cfg.dressing.omega == pytest.approx(9.0 * KHZ)
    assert cfg.tuning[0].phase == pytest.approx(math.pi / 4)
    assert cfg.spin == "one"


def test_shipped_configs_parse_and_validate():
    import pathlib

    from dressedspin.config import validate

    cfg_dir = pathlib.Path(__file__).resolve().parent.parent / "configs"
    paths = sorted(cfg_dir.glob("*.cfg"))
    assert len(paths) >= 4
    for path in paths:
        validate(load_config(path))


def test_override_bad_path():
    cfg = parse_config_text(EXAMPLE)
    with pytest.raises(ConfigFileError):
        apply_overrides(cfg, ["dressing.wobble=1"])
    with pytest.raises(ConfigFileError):
        apply_overrides(cfg, ["tuning.5.phase=1rad"])
    with pytest.raises(ConfigFileError):
        apply_overrides(cfg, ["just-a-token"])
