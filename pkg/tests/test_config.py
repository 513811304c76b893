import pytest

from eetsim import units
from eetsim.config import ConfigError, load_config, parse_config

MODERATE_TEXT = """
# moderate clustering, reduced engine
preset = moderate-clustered
t_final = 300 ns
measure_at = 250 ns
"""

EXPLICIT_TEXT = """
omega_a = 3.0 GHz
omega_b = 3.0 GHz
omega1 = 13.115 GHz
omega2 = 13.009 GHz
omega3 = 12.991 GHz
omega4 = 13.078 GHz
g1 = 120 MHz
g2 = 990 MHz
g3 = 990 MHz
g4 = 120 MHz
g_ab = 930 MHz
"""


class TestParsing:
    def test_preset_resolves_full_parameter_set(self):
        cfg = parse_config(MODERATE_TEXT)
        p = cfg.params
        assert cfg.preset == "moderate-clustered"
        assert units.to_ghz(p.omega_a) == pytest.approx(3.0)
        assert units.to_ghz(p.omega[0]) == pytest.approx(13.115)
        assert units.to_mhz(p.g[0]) == pytest.approx(120)
        assert units.to_mhz(p.g[1]) == pytest.approx(990)
        assert units.to_mhz(p.g_ab) == pytest.approx(930)
        assert p.temperature == pytest.approx(0.020)
        assert p.gamma[0] == pytest.approx(1 / 200e-6)
        assert p.gphi[0] == pytest.approx(0.5 / 70e-9)
        assert cfg.t_final == pytest.approx(300e-9)
        assert cfg.measure_at == pytest.approx(250e-9)

    def test_explicit_parameters(self):
        cfg = parse_config(EXPLICIT_TEXT)
        assert cfg.preset is None
        assert units.to_mhz(cfg.params.g_ab) == pytest.approx(930)

    def test_missing_unit_is_fatal_and_names_field(self):
        with pytest.raises(ConfigError, match="t_final"):
            parse_config("preset = moderate-clustered\nt_final = 300\n")

    def test_unknown_key_suggests_nearest(self):
        with pytest.raises(ConfigError, match="t_final"):
            parse_config("preset = moderate-clustered\ntfinal = 300 ns\n")

    def test_preset_and_explicit_mutually_exclusive(self):
        with pytest.raises(ConfigError, match="mutually exclusive"):
            parse_config("preset = moderate-clustered\ng1 = 120 MHz\n")

    def test_unknown_preset_suggests(self):
        with pytest.raises(ConfigError, match="moderate-clustered"):
            parse_config("preset = moderate-clusterd\n")

    def test_missing_circuit_parameters_listed(self):
        with pytest.raises(ConfigError, match="g_ab"):
            parse_config("g1 = 120 MHz\n")

    def test_duplicate_key_fatal(self):
        with pytest.raises(ConfigError, match="duplicate"):
            parse_config("preset = moderate-clustered\npreset = over-clustered\n")

    def test_garbage_line(self):
        with pytest.raises(ConfigError, match="line 1"):
            parse_config("this is not a config\n")

    def test_comments_and_quotes(self):
        cfg = parse_config('preset = "moderate-clustered"  # quoted value\n')
        assert cfg.preset == "moderate-clustered"

    def test_nonpositive_time_rejected(self):
        with pytest.raises(ConfigError, match="t1"):
            parse_config("preset = moderate-clustered\nt1 = -1 us\n")

    def test_bad_engine_choice(self):
        with pytest.raises(ConfigError, match="engine"):
            parse_config("preset = moderate-clustered\nengine = quick\n")

    def test_sweep_axis_parsing(self):
        cfg = parse_config(
            "preset = moderate-clustered\n"
            "sweep_g1 = 80:240:40 MHz\n"
            "sweep_g2 = 990:990:10 MHz\n"
            "sweep_gab = 880:980:50 MHz\n"
        )
        grid = cfg.sweep_grid()
        assert grid.size == 5 * 1 * 3
        lo, hi, step = cfg.sweep_axes["sweep_g1"]
        assert units.to_mhz(lo) == pytest.approx(80)
        assert units.to_mhz(hi) == pytest.approx(240)
        assert units.to_mhz(step) == pytest.approx(40)

    def test_sweep_grid_requires_all_axes(self):
        cfg = parse_config("preset = moderate-clustered\nsweep_g1 = 80:240:40 MHz\n")
        with pytest.raises(ConfigError, match="sweep_g2"):
            cfg.sweep_grid()

    def test_malformed_axis(self):
        with pytest.raises(ConfigError, match="sweep_g1"):
            parse_config("preset = moderate-clustered\nsweep_g1 = 80:240 MHz\n")


class TestResolvedEcho:
    def test_derived_quantities_present(self):
        res = parse_config(MODERATE_TEXT).resolved()
        assert res["tphi_ns"] == pytest.approx(70.0)
        assert res["temperature_mk"] == pytest.approx(20.0)
        assert res["J12_over_J23"] == pytest.approx(1.295, abs=0.01)
        assert res["couplings_mhz"]["J12"] == pytest.approx(11.807, abs=0.01)
        assert res["eps_ghz"][0] == pytest.approx(13.116, abs=0.01)
        assert res["frame"] == "reduced"

    def test_hash_stable_and_sensitive(self):
        a = parse_config(MODERATE_TEXT).config_hash()
        b = parse_config(MODERATE_TEXT).config_hash()
        c = parse_config(MODERATE_TEXT.replace("300 ns", "301 ns")).config_hash()
        assert a == b
        assert len(a) == 16
        assert a != c


def test_load_config_from_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(MODERATE_TEXT)
    cfg = load_config(str(path))
    assert cfg.preset == "moderate-clustered"
