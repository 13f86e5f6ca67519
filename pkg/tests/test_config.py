"""
Tests for YAML/TOML configuration parsing
"""
import math
import textwrap
from pathlib import Path

import pytest

from ki_paramp.config import Command, OutputFormat, load_config, parse_config, required
from ki_paramp.errors import ConfigParseError, ValidationError
from ki_paramp.models import CircuitKind, ModelKind, PolicyMode, ReflectionConvention, XiScale

TWO_PI = 2 * math.pi


def parse(text, **kwargs):
    return parse_config(textwrap.dedent(text), **kwargs)


def test_empty_document_gives_defaults():
    config = parse("")
    assert config.command is None
    assert config.design is None
    assert config.prototype.g1 == 0.408
    assert config.prototype.epsilon == pytest.approx(0.0625)
    assert config.output_format is OutputFormat.CSV


def test_design_preset():
    config = parse("""
        command: simulate
        design:
          preset: reference-device
    """)
    assert config.command is Command.SIMULATE
    design = config.design
    assert design.line_quarter.z_c == 80.0
    assert design.c_shunt == pytest.approx(1.0 / (TWO_PI * 8e9 * 56.0))
    assert design.ki_model.i_star2 == pytest.approx(3.25e-3)


def test_design_from_scratch():
    config = parse("""
        design:
          f0: 8 GHz
          z_quarter: 67.6 ohm
          z_half: 33.9 ohm
          z_nr: 60 ohm
          z_ki: 180 ohm
          l_geo: 100 pH
          i_star2: 3 mA
    """)
    design = config.design
    assert design.f0 == pytest.approx(TWO_PI * 8e9)
    assert design.circuit_kind is CircuitKind.THREE_STAGE
    assert design.c_shunt == pytest.approx(1.0 / (TWO_PI * 8e9 * 60.0))
    model = design.ki_model
    assert model.l_k0 + model.l_geo == pytest.approx(60.0 ** 2 * design.c_shunt)
    assert model.i_star2 == pytest.approx(3e-3)


def test_preset_with_overrides():
    config = parse("""
        design:
          preset: reference-device
          circuit: conventional
          i_c: 1 mA
    """)
    assert config.design.circuit_kind is CircuitKind.CONVENTIONAL
    assert config.design.ki_model.i_c == pytest.approx(1e-3)


def test_preset_z_nr_override_keeps_geometric_inductance():
    config = parse("""
        design:
          preset: reference-device
          z_nr: 60 ohm
          c_shunt: 330 fF
    """)
    design = config.design
    model = design.ki_model
    assert design.c_shunt == pytest.approx(330e-15)
    assert model.l_geo == pytest.approx(200e-12)
    assert math.sqrt((model.l_k0 + model.l_geo) / design.c_shunt) == pytest.approx(60.0)


def test_preset_z_nr_override_keeps_preset_capacitance():
    base = parse("design:\n  preset: reference-device\n").design
    config = parse("""
        design:
          preset: reference-device
          z_nr: 50 ohm
    """)
    design = config.design
    assert design.c_shunt == pytest.approx(base.c_shunt)
    assert design.ki_model.l_k0 + design.ki_model.l_geo == pytest.approx(50.0 ** 2 * base.c_shunt)


def test_negative_impedance_reports_location():
    with pytest.raises(ConfigParseError) as info:
        parse_config("command: simulate\ndesign:\n  z_nr: -5 ohm\n", source="amp.yaml")
    assert info.value.line == 3
    assert info.value.column == 3
    assert "design.z_nr" in str(info.value)
    assert str(info.value).startswith("amp.yaml:3:3")


def test_unknown_key_reports_location():
    with pytest.raises(ConfigParseError, match="unknown key") as info:
        parse_config("design:\n  preset: reference-device\n  z_foo: 3\n")
    assert info.value.line == 3


def test_unknown_top_level_key():
    with pytest.raises(ConfigParseError, match="unknown key"):
        parse_config("gadget: 1\n")


def test_yaml_syntax_error_has_line():
    with pytest.raises(ConfigParseError) as info:
        parse_config("design: [1, 2\nsweep: 3\n")
    assert info.value.line is not None


def test_unknown_enum_value():
    with pytest.raises(ConfigParseError, match="not one of"):
        parse_config("command: launch\n")


def test_threads_must_be_positive():
    with pytest.raises(ConfigParseError):
        parse_config("threads: 0\n")


def test_design_needs_frequency_without_preset():
    with pytest.raises(ConfigParseError, match="f0"):
        parse_config("design:\n  z_quarter: 50 ohm\n")


def test_environment_terms():
    config = parse("""
        environment:
          convention: voltage
          terms:
            - {z_n: 14.2 ohm, tau: 1.67 ns, phi: -0.7 pi}
            - {z_n: 1.9 ohm, tau: 19.3 ns}
    """)
    env = config.environment
    assert config.convention is ReflectionConvention.VOLTAGE
    assert len(env.terms) == 2
    assert env.terms[0].tau == pytest.approx(1.67e-9)
    assert env.terms[0].phi == pytest.approx(-0.7 * math.pi)
    assert env.terms[1].phi == 0.0


def test_bad_environment_term_key():
    with pytest.raises(ConfigParseError) as info:
        parse_config("environment:\n  terms:\n    - {z_n: 1 ohm, delay: 1 ns}\n")
    assert info.value.line == 3


def test_environment_preset():
    config = parse_config("environment:\n  preset: standing-wave-env\n")
    assert len(config.environment.terms) == 2


def test_pump_and_sweep_are_angular():
    config = parse("""
        pump:
          fp: 16.9 GHz
          xi3: 300 MHz
          i_dc: 0.57 mA
        sweep:
          span: 7.9GHz:8.9GHz:1MHz
          idc_span: 0mA:1mA:0.1mA
    """)
    assert config.pump.omega_p == pytest.approx(TWO_PI * 16.9e9)
    assert config.pump.xi3 == pytest.approx(TWO_PI * 300e6)
    assert config.pump.i_dc == pytest.approx(0.57e-3)
    assert config.pump.mode is PolicyMode.XI3
    assert config.sweep.span == pytest.approx((TWO_PI * 7.9e9, TWO_PI * 8.9e9, TWO_PI * 1e6))
    assert config.sweep.idc_span == pytest.approx((0.0, 1e-3, 1e-4))


def test_current_pump_policy():
    config = parse("""
        pump:
          i_p: 0.1 mA
          ramp_start: 1 uA
          step_db: 0.5
    """)
    assert config.pump.mode is PolicyMode.CURRENT
    assert config.policy.mode is PolicyMode.CURRENT
    assert config.policy.start == pytest.approx(1e-6)
    assert config.policy.step_db == 0.5
    assert math.isinf(config.policy.cap)


def test_xi_scale_selection():
    config = parse("""
        pump:
          xi3: 1.5 GHz
          xi_scale: hamiltonian
        search:
          xi_scale: hamiltonian
    """)
    assert config.pump.xi_scale is XiScale.HAMILTONIAN
    assert config.policy.xi_scale is XiScale.HAMILTONIAN
    assert config.search.xi_scale is XiScale.HAMILTONIAN
    assert parse("").policy.xi_scale is XiScale.NETWORK


def test_unknown_xi_scale():
    with pytest.raises(ConfigParseError, match="pump.xi_scale"):
        parse("pump:\n  xi_scale: linear\n")


def test_search_section():
    config = parse("""
        command: search
        search:
          preset: search-conventional
          z_nr: 2ohm:20ohm:1ohm
          aggregate: true
          fractional_bandwidth: 0.0625
    """)
    assert config.search.circuit_kind is CircuitKind.CONVENTIONAL
    assert config.search.z_nr == pytest.approx((2.0, 20.0, 1.0))
    assert config.aggregate is True
    assert config.fractional_bandwidth == 0.0625


def test_noise_and_qubit_sections():
    config = parse("""
        noise:
          g_s: 20 dB
          g_sys_eff: 70 dB
        qubit:
          f_q: 8.4 GHz
          p_ref: -80 dBm
    """)
    assert config.noise.g_s == pytest.approx(100.0)
    assert config.noise.g_sys_eff == pytest.approx(1e7)
    assert config.qubit.omega_q == pytest.approx(TWO_PI * 8.4e9)
    assert config.qubit.p_ref == pytest.approx(1e-11)


def test_fit_section():
    config = parse("""
        fit:
          model: quartic
          l_k0: 0.8 nH
          l_geo: 0.2 nH
    """)
    assert config.fit_model is ModelKind.QUARTIC
    assert config.fit_template.l_k0 == pytest.approx(0.8e-9)
    assert config.fit_template.l_geo == pytest.approx(0.2e-9)


def test_toml_document(tmp_path):
    path = tmp_path / "amp.toml"
    path.write_text('command = "synth"\n\n[synthesis]\nz_nr = "60 ohm"\n\n[output]\nformat = "structured"\n')
    config = load_config(path)
    assert config.command is Command.SYNTH
    assert config.synthesis.z_nr == 60.0
    assert config.output_format is OutputFormat.STRUCTURED


def test_toml_syntax_error():
    with pytest.raises(ConfigParseError):
        parse_config("command = \n", fmt="toml")


def test_yaml_file(tmp_path):
    path = tmp_path / "amp.yaml"
    path.write_text("command: synth\nprototype:\n  epsilon: 0.1\noutput:\n  path: out.csv\n")
    config = load_config(path)
    assert config.prototype.epsilon == 0.1
    assert config.output_path == "out.csv"


def test_required():
    assert required(3, "x") == 3
    with pytest.raises(ValidationError, match="pump.fp"):
        required(None, "pump.fp")


def test_example_config_parses():
    path = Path(__file__).resolve().parent.parent / "config.example.yaml"
    config = load_config(path)
    assert config.command is Command.SIMULATE
    assert config.threads == 4
    assert config.design.line_ki_quarter.z_c == 180.0
    assert config.environment.is_ideal
    assert config.pump.xi3 == pytest.approx(TWO_PI * 600e6)
    assert config.output_path == "gain.csv"
