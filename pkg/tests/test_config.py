import numpy as np
import pytest
import yaml
from hypothesis import given, settings, strategies as st

from arofsim.config import (ConfigError, dump_config, expand_scenario, format_quantity,
                            load_config, parse_config, parse_quantity)
from arofsim.topology import DEFAULT_PLANT


class TestQuantities:
    @pytest.mark.parametrize("text,dim,value", [
        ("50 GHz", "frequency", 50e9),
        ("50ghz", "frequency", 50e9),
        ("800 MHz", "frequency", 800e6),
        ("37.64 GHz", "frequency", 37.64e9),
        ("31.5 GBd", "baud", 31.5e9),
        ("25 km", "length", 25.0),
        ("500 m", "length", 0.5),
        ("0.2 dB/km", "attenuation", 0.2),
        ("17 ps/nm/km", "dispersion", 17.0),
        ("-3 dBm", "dbm", -3.0),
        ("103.1 pA/rtHz", "current_density", 103.1e-12),
        ("8 %", "percent", 8.0),
        ("150 mV", "voltage", 0.15),
    ])
    def test_parse(self, text, dim, value):
        assert parse_quantity(text, dim) == value

    @pytest.mark.parametrize("text,dim", [
        (50e9, "frequency"), ("50", "frequency"), ("50 km", "frequency"), ("GHz", "frequency"),
        ("1 dB", "dbm"),
    ])
    def test_rejected(self, text, dim):
        with pytest.raises(ConfigError):
            parse_quantity(text, dim, "x")

    @settings(max_examples=100, deadline=None)
    @given(st.floats(1e-3, 1e3), st.sampled_from(["Hz", "MHz", "GHz"]))
    def test_format_round_trip(self, v, unit):
        value = v * {"Hz": 1, "MHz": 1e6, "GHz": 1e9}[unit]
        assert parse_quantity(format_quantity(value, "frequency", unit), "frequency") \
            == pytest.approx(value, rel=1e-15)


class TestScenario:
    def test_expand(self):
        assert expand_scenario("100G-topoB-800MHz") == {
            "coherent": {"preset": "100G"}, "topology": {"name": "B"},
            "ofdm": {"bandwidth": "800 MHz"}}

    def test_minimal_config_fully_expanded(self):
        cfg = parse_config({"scenario": "100G-topoB-800MHz"})
        assert cfg["coherent"]["preset"] == "100G"
        assert cfg["topology"]["name"] == "B"
        assert cfg["ofdm"]["bandwidth"] == 800e6
        assert cfg.provenance["ofdm.bandwidth"] == "scenario"
        assert cfg.provenance["plant.laser_power"] == "default"
        topo = cfg.topology()
        assert topo.total_length == 47.0 and topo.roadm_count == 1
        assert cfg.coherent().occupied_width == 37.64e9
        assert cfg.allocation().feasible
        assert cfg.plant() == DEFAULT_PLANT
        assert cfg.ofdm(3).seed == 3 and cfg.ofdm().sample_rate == 128e9

    def test_user_overrides_scenario(self):
        cfg = parse_config({"scenario": "400G-topoC-1.6GHz", "ofdm": {"bandwidth": "400 MHz"},
                            "plant": {"laser_power": "6 dBm"}})
        assert cfg["ofdm"]["bandwidth"] == 400e6
        assert cfg.provenance["ofdm.bandwidth"] == "user"
        assert cfg.plant().laser_power == 6.0
        assert cfg.coherent().channel_width == 100e9

    def test_bad_scenario(self):
        with pytest.raises(ConfigError, match="scenario"):
            parse_config({"scenario": "100G-topoD-800MHz"})


class TestValidation:
    def test_occupied_wider_than_channel(self):
        with pytest.raises(ConfigError, match="exceeds"):
            parse_config({"coherent": {"channel_width": "50 GHz",
                                       "occupied_width": "82.46 GHz"}})

    def test_unknown_keys(self):
        with pytest.raises(ConfigError, match="frobnicate"):
            parse_config({"frobnicate": 1})
        with pytest.raises(ConfigError, match="plant.laser_pwr"):
            parse_config({"plant": {"laser_pwr": "3 dBm"}})

    def test_bare_number_names_key_and_unit(self):
        with pytest.raises(ConfigError) as exc:
            parse_config({"plant": {"attenuation": 0.2}})
        assert "plant.attenuation" in str(exc.value) and "dB/km" in str(exc.value)

    def test_declared_feasible_contradiction(self):
        with pytest.raises(ConfigError, match="feasible"):
            parse_config({"scenario": "100G-topoA-2.4GHz", "allocation": {"feasible": True}})
        cfg = parse_config({"scenario": "100G-topoA-2.4GHz", "allocation": {"feasible": False}})
        assert not cfg.allocation().feasible

    def test_custom_topology(self):
        cfg = parse_config({"topology": {"name": "custom", "spans": ["5 km", "20 km"],
                                         "roadm_count": 1}})
        assert cfg.topology().total_length == 25.0
        with pytest.raises(ConfigError):
            parse_config({"topology": {"name": "custom"}})
        with pytest.raises(ConfigError):
            parse_config({"topology": {"name": "custom", "spans": ["5 km"], "roadm_count": 2}})
        with pytest.raises(ConfigError):
            parse_config({"topology": {"name": "B", "spans": ["5 km"]}})

    def test_types(self):
        for bad in ({"seeds": [-1]}, {"seeds": "0"}, {"output": 3},
                    {"plant": {"edfa_ase": "yes"}}, {"ofdm": {"qam_order": 32}},
                    {"sweep": {"topologies": ["D"]}}, {"sweep": {"presets": ["200G"]}},
                    {"coherent": {"preset": "1T"}}, {"plant": {"transceiver_snr": 17}}):
            with pytest.raises(ConfigError):
                parse_config(bad)

    def test_nyquist_rejected(self):
        with pytest.raises(ConfigError):
            parse_config({"ofdm": {"if_freq": "70 GHz"}})


class TestRoundTrip:
    @pytest.mark.parametrize("data", [
        {},
        {"scenario": "100G-topoB-800MHz", "seeds": [0, 1, 2]},
        {"scenario": "400G-topoC-1.6GHz", "plant": {"pd_thermal_noise": "90 pA/rtHz",
                                                    "transceiver_snr": {"100G": "18 dB"}},
         "coherent": {"rolloff": 0.2}, "output": "out"},
        {"topology": {"name": "custom", "spans": ["7.5 km"], "roadm_count": 1},
         "sweep": {"bandwidths": ["200 MHz", "1.2 GHz"]}, "allocation": {"guard": "50 MHz"}},
    ])
    def test_parse_dump_parse(self, data):
        a = parse_config(data)
        b = parse_config(yaml.safe_load(dump_config(a)))
        assert a == b
        assert a.config_hash() == b.config_hash()
        assert dump_config(a) == dump_config(b)

    def test_dump_has_units(self):
        text = dump_config(parse_config({}))
        assert "channel_width" in text
        d = yaml.safe_load(text)
        assert d["plant"]["attenuation"] == "0.2 dB/km"
        assert d["ofdm"]["bandwidth"] == "200 MHz"
        assert d["ofdm"]["subcarrier_spacing"] == "1.5625 MHz"

    def test_hash_tracks_content(self):
        a = parse_config({})
        b = parse_config({"plant": {"laser_power": "5 dBm"}})
        assert a.config_hash() != b.config_hash()
        assert len(a.config_hash()) == 64

    def test_load_file(self, tmp_path):
        p = tmp_path / "s.yaml"
        p.write_text("scenario: 100G-topoA-400MHz\nplant:\n  dispersion: 16.5 ps/nm/km\n")
        cfg = load_config(p)
        assert cfg.plant().dispersion == 16.5
        assert load_config(None) == parse_config({})
        with pytest.raises(ConfigError, match="does not exist"):
            load_config(tmp_path / "missing.yaml")
        (tmp_path / "bad.yaml").write_text("plant: [1, 2\n")
        with pytest.raises(ConfigError, match="YAML"):
            load_config(tmp_path / "bad.yaml")

    def test_rolloff_override_rederives_width(self):
        cfg = parse_config({"coherent": {"rolloff": 0.2}})
        coh = cfg.coherent()
        assert coh.occupied_width == pytest.approx(coh.baud * 1.2)
        assert np.isclose(parse_config({}).coherent().occupied_width, 37.64e9)
