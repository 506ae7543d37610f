"""Testing config loading and merging"""
import pytest

from growthlab.config import (
    get_settings,
    load_run_config,
    merge_config,
    normalize_keys,
    read_config_file,
)
from growthlab.errors import ParameterError
from growthlab.params import CANONICAL_PARAMS, Family
from utils.digest import config_digest, verify_digest
from utils.family_names import normalize_family


def test_aliases_are_lifted_into_params():
    out = normalize_keys({"σ": 3.0, " Discount ": 0.02, "K_0": 2.0, "tmax": 50})
    assert out["params"] == {"sigma": 3.0, "rho": 0.02}
    assert out["k0"] == 2.0
    assert out["t_max"] == 50


def test_nested_params_are_normalized():
    out = normalize_keys({"params": {"β": 0.4, "depreciation": 0.05}, "family": "Two Integral"})
    assert out["params"] == {"beta": 0.4, "pi": 0.05}
    assert out["family"] == "two-integral"


@pytest.mark.parametrize(
    "raw,expected",
    [
        ("BGP", "bgp"),
        ("balanced_growth_path", "bgp"),
        ("two-integral", "two-integral"),
        ("sol3", "one-integral"),
        ("One Integral", "one-integral"),
        ("three", ""),
        ("", ""),
    ],
)
def test_normalize_family(raw, expected):
    assert normalize_family(raw) == expected


def test_canonical_parameters_by_default():
    cfg = merge_config({}, {})
    assert cfg.params.model_dump() == CANONICAL_PARAMS
    assert cfg.family == Family.BGP
    assert cfg.times() == [float(i) for i in range(11)]


def test_flags_override_file():
    file_values = normalize_keys({"sigma": 3.0, "rho": 0.03, "family": "sol2", "steps": 5})
    cfg = merge_config(file_values, {"sigma": 4.0, "rho": None, "steps": 7})
    assert cfg.params.sigma == 4.0
    assert cfg.params.rho == 0.03
    assert cfg.params.beta == CANONICAL_PARAMS["beta"]
    assert cfg.family == Family.TWO_INTEGRAL
    assert cfg.steps == 7


def test_explicit_grid_wins_over_steps():
    cfg = merge_config({"grid": [0.0, 0.5, 4.0]}, {})
    assert cfg.times() == [0.0, 0.5, 4.0]


@pytest.mark.parametrize(
    "values",
    [
        {"grid": [0.0, 2.0, 1.0]},
        {"steps": 1},
        {"t_max": -1.0},
        {"output_format": "xml"},
        {"z0": 0.1, "z0_ratio": 0.5},
        {"unknown_key": 1},
    ],
)
def test_invalid_run_config(values):
    with pytest.raises(ParameterError):
        merge_config(values, {})


def test_z0_resolution():
    assert merge_config({"z0_ratio": 0.5}, {}).resolved_z0(0.3) == pytest.approx(0.15)
    assert merge_config({"z0": 0.2}, {}).resolved_z0(0.3) == 0.2
    assert merge_config({}, {}).resolved_z0(0.3) is None


def test_read_config_file(tmp_path):
    path = tmp_path / "run.json"
    path.write_text('{"sigma": 2.5, "Family": "one_integral"}', encoding="utf-8")
    values = read_config_file(str(path))
    assert values == {"params": {"sigma": 2.5}, "family": "one-integral"}


@pytest.mark.parametrize("content", ["{not json", "[1, 2]"])
def test_bad_config_file(tmp_path, content):
    path = tmp_path / "bad.json"
    path.write_text(content, encoding="utf-8")
    with pytest.raises(ParameterError):
        read_config_file(str(path))


def test_missing_config_file(tmp_path):
    with pytest.raises(ParameterError):
        read_config_file(str(tmp_path / "absent.json"))


def test_settings_from_environment(monkeypatch):
    monkeypatch.setenv("GROWTHLAB_THREADS", "3")
    monkeypatch.setenv("GROWTHLAB_ODE_TOL", "1e-9")
    settings = get_settings()
    assert settings.threads == 3
    assert settings.ode_tol == 1e-9


def test_settings_feed_run_defaults(monkeypatch):
    monkeypatch.setenv("GROWTHLAB_QUAD_TOL", "1e-11")
    cfg = load_run_config(None, {}, get_settings())
    assert cfg.quad_tol == 1e-11
    assert load_run_config(None, {"quad_tol": 1e-9}, get_settings()).quad_tol == 1e-9


def test_config_digest_is_order_independent():
    a = {"params": dict(CANONICAL_PARAMS), "k0": 1.0}
    b = {"k0": 1.0, "params": dict(reversed(list(CANONICAL_PARAMS.items())))}
    assert config_digest(a) == config_digest(b)
    assert len(config_digest(a)) == 64
    assert verify_digest(a, config_digest(b))
    assert not verify_digest({**a, "k0": 2.0}, config_digest(a))


def test_verify_defaults_are_tighter():
    settings = get_settings()
    cfg = load_run_config(None, {}, settings, for_verify=True)
    assert (cfg.quad_tol, cfg.ode_tol) == (1e-12, 1e-11)
    assert load_run_config(None, {}, settings).ode_tol == 1e-10


def test_verify_tolerances_from_file_and_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("GROWTHLAB_VERIFY_ODE_TOL", "1e-9")
    path = tmp_path / "run.json"
    path.write_text('{"quad_tol": 1e-11}', encoding="utf-8")
    cfg = load_run_config(str(path), {}, get_settings(), for_verify=True)
    assert cfg.ode_tol == 1e-9
    assert cfg.quad_tol == 1e-11
    assert load_run_config(str(path), {"quad_tol": 1e-10}, get_settings(), for_verify=True).quad_tol == 1e-10


def test_verify_digest_rejects_non_strings():
    a = {"k0": 1.0}
    assert not verify_digest(a, 123)
    assert not verify_digest(a, None)
