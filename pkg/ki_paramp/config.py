"""
Run configuration: YAML/TOML documents parsed and validated into SI values
"""
import dataclasses
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, NamedTuple, Optional, Tuple, Union

import toml
import yaml

from .errors import ConfigParseError, ValidationError
from .models import (
    CircuitKind,
    DesignSpec,
    EnvironmentModel,
    EnvironmentTerm,
    KineticInductorModel,
    ModelKind,
    PolicyMode,
    PrototypeCoefficients,
    PumpPolicy,
    ReflectionConvention,
    SearchRanges,
    XiScale,
)
from .presets import (
    DEFAULT_PROTOTYPE,
    WORKED_SYNTHESIS,
    design_from_impedances,
    design_preset,
    environment_preset,
    prototype_preset,
    search_preset,
)
from .units import Dimension, parse_quantity, parse_span

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi


class Command(Enum):
    SYNTH = "synth"
    SIMULATE = "simulate"
    MAP = "map"
    SEARCH = "search"
    FIT_KI = "fit-ki"
    FIT_QUBIT = "fit-qubit"
    NOISE = "noise"


class OutputFormat(Enum):
    CSV = "csv"
    STRUCTURED = "structured"


class Span(NamedTuple):
    """Marks a start:stop:step value of one dimension"""
    dimension: Dimension


STR, INT, BOOL, TERMS = "str", "int", "bool", "terms"

# dimensions read as ordinary frequencies and stored as angular ones
ANGULAR_KEYS = {
    ("design", "f0"), ("pump", "fp"), ("pump", "xi3"), ("sweep", "span"), ("sweep", "fp_span"),
    ("sweep", "half_width"), ("sweep", "step"), ("search", "fp_half"), ("search", "f0"),
    ("search", "xi3_start"), ("search", "xi3_cap"), ("search", "window"),
    ("search", "freq_step"), ("synthesis", "f0"), ("qubit", "f_q"),
}

SCHEMA: Dict[str, Dict[str, Any]] = {
    "design": {
        "preset": STR, "circuit": STR, "z0": Dimension.IMPEDANCE,
        "z_quarter": Dimension.IMPEDANCE, "z_half": Dimension.IMPEDANCE,
        "z_nr": Dimension.IMPEDANCE, "z_ki": Dimension.IMPEDANCE,
        "c_shunt": Dimension.CAPACITANCE, "f0": Dimension.FREQUENCY, "model": STR,
        "l_k0": Dimension.INDUCTANCE, "l_geo": Dimension.INDUCTANCE,
        "i_star2": Dimension.CURRENT, "i_star4": Dimension.CURRENT,
        "i_star_star": Dimension.CURRENT, "n_exp": Dimension.NUMBER, "i_c": Dimension.CURRENT,
    },
    "environment": {
        "preset": STR, "z0": Dimension.IMPEDANCE, "terms": TERMS, "convention": STR,
    },
    "prototype": {
        "name": STR, "epsilon": Dimension.NUMBER, "g0": Dimension.NUMBER,
        "g1": Dimension.NUMBER, "g2": Dimension.NUMBER, "g3": Dimension.NUMBER,
    },
    "synthesis": {
        "z_nr": Dimension.IMPEDANCE, "z_ki": Dimension.IMPEDANCE, "z0": Dimension.IMPEDANCE,
        "f0": Dimension.FREQUENCY,
    },
    "pump": {
        "mode": STR, "i_dc": Dimension.CURRENT, "i_p": Dimension.CURRENT,
        "xi3": Dimension.FREQUENCY, "fp": Dimension.FREQUENCY, "phi_p": Dimension.ANGLE,
        "ramp_start": None, "ramp_cap": None, "step_db": Dimension.NUMBER,
        "gain_stop_db": Dimension.NUMBER, "xi_scale": STR,
    },
    "sweep": {
        "span": Span(Dimension.FREQUENCY), "fp_span": Span(Dimension.FREQUENCY),
        "idc_span": Span(Dimension.CURRENT), "half_width": Dimension.FREQUENCY,
        "step": Dimension.FREQUENCY, "threshold_db": Dimension.NUMBER,
        "ripple_max_db": Dimension.NUMBER,
    },
    "search": {
        "preset": STR, "circuit": STR,
        "z_quarter": Span(Dimension.IMPEDANCE), "z_half": Span(Dimension.IMPEDANCE),
        "z_nr": Span(Dimension.IMPEDANCE), "fp_half": Span(Dimension.FREQUENCY),
        "z_ki": Dimension.IMPEDANCE, "z0": Dimension.IMPEDANCE, "f0": Dimension.FREQUENCY,
        "xi3_start": Dimension.FREQUENCY, "xi3_factor": Dimension.NUMBER,
        "xi3_cap": Dimension.FREQUENCY, "window": Dimension.FREQUENCY,
        "freq_step": Dimension.FREQUENCY, "threshold_db": Dimension.NUMBER,
        "ripple_max_db": Dimension.NUMBER, "gain_stop_db": Dimension.NUMBER,
        "aggregate": BOOL, "fractional_bandwidth": Dimension.NUMBER, "xi_scale": STR,
    },
    "noise": {
        "g_s": Dimension.RATIO, "g_sys_eff": Dimension.RATIO, "n1": Dimension.NUMBER,
        "b_m": Dimension.FREQUENCY,
    },
    "qubit": {"f_q": Dimension.FREQUENCY, "p_ref": Dimension.POWER},
    "fit": {
        "model": STR, "l_k0": Dimension.INDUCTANCE, "l_geo": Dimension.INDUCTANCE,
        "n_exp": Dimension.NUMBER, "i_c": Dimension.CURRENT,
    },
    "output": {"path": STR, "format": STR},
}

TOP_LEVEL = {"command": STR, "threads": INT, "input": STR}

TERM_KEYS = {"z_n": Dimension.IMPEDANCE, "tau": Dimension.TIME, "phi": Dimension.ANGLE}

POSITIVE = {Dimension.IMPEDANCE, Dimension.CAPACITANCE, Dimension.INDUCTANCE, Dimension.FREQUENCY}
NON_NEGATIVE = {Dimension.CURRENT, Dimension.TIME, Dimension.POWER, Dimension.TEMPERATURE}

# key path -> (line, column), 1-based
Marks = Dict[Tuple[Union[str, int], ...], Tuple[int, int]]


@dataclass
class SynthesisInputs:
    z_nr: float = WORKED_SYNTHESIS["z_nr"]
    z_ki: float = WORKED_SYNTHESIS["z_ki"]
    z0: float = WORKED_SYNTHESIS["z0"]
    f0: Optional[float] = None


@dataclass
class PumpSettings:
    mode: PolicyMode = PolicyMode.XI3
    i_dc: float = 0.0
    i_p: Optional[float] = None
    xi3: Optional[float] = None
    omega_p: Optional[float] = None
    phi_p: float = 0.0
    xi_scale: XiScale = XiScale.NETWORK


@dataclass
class SweepSettings:
    span: Optional[Tuple[float, float, float]] = None
    fp_span: Optional[Tuple[float, float, float]] = None
    idc_span: Optional[Tuple[float, float, float]] = None
    half_width: Optional[float] = None
    step: Optional[float] = None
    threshold_db: float = 17.0
    ripple_max_db: float = 5.0


@dataclass
class NoiseSettings:
    g_s: Optional[float] = None
    g_sys_eff: Optional[float] = None
    n1: float = 0.5
    b_m: float = 10.0


@dataclass
class QubitSettings:
    omega_q: Optional[float] = None
    p_ref: Optional[float] = None


@dataclass
class RunConfig:
    """Validated run parameters, all in SI with angular frequencies"""
    command: Optional[Command] = None
    threads: Optional[int] = None
    input_path: Optional[str] = None
    design: Optional[DesignSpec] = None
    environment: Optional[EnvironmentModel] = None
    convention: ReflectionConvention = ReflectionConvention.POWER
    prototype: PrototypeCoefficients = field(default_factory=prototype_preset)
    prototype_name: str = DEFAULT_PROTOTYPE
    synthesis: SynthesisInputs = field(default_factory=SynthesisInputs)
    pump: PumpSettings = field(default_factory=PumpSettings)
    policy: PumpPolicy = field(default_factory=PumpPolicy)
    sweep: SweepSettings = field(default_factory=SweepSettings)
    search: SearchRanges = field(default_factory=SearchRanges)
    aggregate: bool = False
    fractional_bandwidth: Optional[float] = None
    noise: NoiseSettings = field(default_factory=NoiseSettings)
    qubit: QubitSettings = field(default_factory=QubitSettings)
    fit_model: ModelKind = ModelKind.PARABOLIC
    fit_template: Optional[KineticInductorModel] = None
    output_path: Optional[str] = None
    output_format: OutputFormat = OutputFormat.CSV


def _collect_marks(node, prefix: Tuple = (), marks: Optional[Marks] = None) -> Marks:
    if marks is None:
        marks = {}
    if isinstance(node, yaml.MappingNode):
        for key_node, value_node in node.value:
            path = prefix + (key_node.value,)
            marks[path] = (key_node.start_mark.line + 1, key_node.start_mark.column + 1)
            _collect_marks(value_node, path, marks)
    elif isinstance(node, yaml.SequenceNode):
        for index, item in enumerate(node.value):
            path = prefix + (index,)
            marks[path] = (item.start_mark.line + 1, item.start_mark.column + 1)
            _collect_marks(item, path, marks)
    return marks


def _load_document(text: str, source: str, fmt: str) -> Tuple[Any, Marks]:
    if fmt == "toml":
        try:
            return toml.loads(text), {}
        except toml.TomlDecodeError as e:
            raise ConfigParseError(e.msg, e.lineno, e.colno, source) from e
    if fmt != "yaml":
        raise ValidationError(f"unsupported config format '{fmt}'")
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
        data = yaml.safe_load(text)
    except yaml.MarkedYAMLError as e:
        mark = e.problem_mark or e.context_mark
        line = mark.line + 1 if mark else None
        column = mark.column + 1 if mark else None
        raise ConfigParseError(e.problem or str(e), line, column, source) from e
    except yaml.YAMLError as e:
        raise ConfigParseError(str(e), source=source) from e
    return data, _collect_marks(node) if node is not None else {}


class _Reader:
    """Walks the raw document, converting values and reporting errors at their location"""

    def __init__(self, data: Dict[str, Any], marks: Marks, source: str):
        self.data = data
        self.marks = marks
        self.source = source

    def error(self, path: Tuple, message: str) -> ConfigParseError:
        line, column = self.marks.get(path, (None, None))
        key = ".".join(str(p) for p in path)
        return ConfigParseError(f"{key}: {message}" if key else message, line, column, self.source)

    def check_keys(self, mapping: Dict, allowed, path: Tuple):
        for key in mapping:
            if key not in allowed:
                known = ", ".join(sorted(allowed))
                raise self.error(path + (key,), f"unknown key (expected one of: {known})")

    def section(self, name: str) -> Dict[str, Any]:
        raw = self.data.get(name)
        if raw is None:
            return {}
        if not isinstance(raw, dict):
            raise self.error((name,), "expected a mapping")
        self.check_keys(raw, SCHEMA[name], (name,))
        return raw

    def convert(self, path: Tuple, value: Any, kind: Any) -> Any:
        key = ".".join(str(p) for p in path)
        try:
            if kind == STR:
                if not isinstance(value, str):
                    raise ValidationError(f"{key}: expected a string")
                return value
            if kind == INT:
                if isinstance(value, bool) or not isinstance(value, int):
                    raise ValidationError(f"{key}: expected an integer")
                return value
            if kind == BOOL:
                if not isinstance(value, bool):
                    raise ValidationError(f"{key}: expected true or false")
                return value
            if isinstance(kind, Span):
                start, stop, step = parse_span(value, kind.dimension, key)
                if tuple(path) in ANGULAR_KEYS:
                    return TWO_PI * start, TWO_PI * stop, TWO_PI * step
                return start, stop, step
            number = parse_quantity(value, kind, key)
        except ValidationError as e:
            raise self.error(path, str(e).split(": ", 1)[-1]) from e
        if kind in POSITIVE and not number > 0:
            raise self.error(path, "must be positive")
        if kind in NON_NEGATIVE and number < 0:
            raise self.error(path, "must be non-negative")
        if tuple(path) in ANGULAR_KEYS:
            number *= TWO_PI
        return number

    def values(self, name: str, skip=()) -> Dict[str, Any]:
        raw = self.section(name)
        schema = SCHEMA[name]
        return {key: self.convert((name, key), value, schema[key])
                for key, value in raw.items() if key not in skip and value is not None}

    def enum(self, path: Tuple, value: str, enum_type):
        try:
            return enum_type(value)
        except ValueError:
            known = ", ".join(member.value for member in enum_type)
            raise self.error(path, f"'{value}' is not one of: {known}") from None

    def build(self, path: Tuple, factory, *args, **kwargs):
        try:
            return factory(*args, **kwargs)
        except ValidationError as e:
            if isinstance(e, ConfigParseError):
                raise
            raise self.error(path, str(e)) from e


def _read_design(reader: _Reader) -> Optional[DesignSpec]:
    raw = reader.section("design")
    if not raw:
        return None
    values = reader.values("design")
    base = reader.build(("design", "preset"), design_preset, values["preset"]) \
        if "preset" in values else None

    def pick(key, from_base):
        if key in values:
            return values[key]
        return from_base() if base is not None else None

    f0 = pick("f0", lambda: base.f0)
    if f0 is None:
        raise reader.error(("design",), "f0 is required without a preset")
    z0 = pick("z0", lambda: base.z0) or 50.0
    z_quarter = pick("z_quarter", lambda: base.line_quarter.z_c)
    z_half = pick("z_half", lambda: base.line_half.z_c)
    for key, value in (("z_quarter", z_quarter), ("z_half", z_half)):
        if value is None:
            raise reader.error(("design",), f"{key} is required without a preset")

    circuit = reader.enum(("design", "circuit"), values["circuit"], CircuitKind) \
        if "circuit" in values else None
    z_ki = values.get("z_ki")
    if z_ki is None and base is not None and base.line_ki_quarter is not None:
        z_ki = base.line_ki_quarter.z_c
    if circuit is CircuitKind.CONVENTIONAL:
        z_ki = None
    elif circuit is CircuitKind.THREE_STAGE and z_ki is None:
        raise reader.error(("design",), "three-stage circuit needs z_ki")

    model_keys = {"model", "l_k0", "l_geo", "i_star2", "i_star4", "i_star_star", "n_exp", "i_c"}
    overrides = {key: values[key] for key in model_keys if key in values}
    if "model" in overrides:
        overrides["model_kind"] = reader.enum(("design", "model"), overrides.pop("model"), ModelKind)

    if "z_nr" in values:
        z_nr = values["z_nr"]
        if base is not None:
            template = base.ki_model
            c_default = base.c_shunt
        else:
            template = KineticInductorModel(model_kind=ModelKind.PARABOLIC, l_k0=1.0)
            c_default = 1.0 / (f0 * z_nr)
        c_shunt = values.get("c_shunt", c_default)
        l_geo = overrides.get("l_geo", template.l_geo)
        overrides.setdefault("l_k0", z_nr ** 2 * c_shunt - l_geo)
    elif base is not None:
        c_shunt = values.get("c_shunt", base.c_shunt)
        template = base.ki_model
        z_nr = math.sqrt((template.l_k0 + template.l_geo) / c_shunt)
    else:
        raise reader.error(("design",), "z_nr is required without a preset")

    ki_model = reader.build(("design",), dataclasses.replace, template, **overrides)
    return reader.build(("design",), design_from_impedances, z_quarter=z_quarter, z_half=z_half,
                        z_nr=z_nr, f0=f0, z_ki=z_ki, z0=z0, c_shunt=c_shunt, ki_model=ki_model)


def _read_environment(reader: _Reader, config: RunConfig):
    raw = reader.section("environment")
    if not raw:
        return
    values = reader.values("environment", skip=("terms",))
    if "convention" in values:
        config.convention = reader.enum(("environment", "convention"), values["convention"],
                                        ReflectionConvention)
    if "preset" in values:
        config.environment = reader.build(("environment", "preset"), environment_preset,
                                          values["preset"])
    terms_raw = raw.get("terms")
    if terms_raw is None and "z0" not in values:
        return

    terms = config.environment.terms if config.environment is not None else ()
    if terms_raw is not None:
        if not isinstance(terms_raw, list):
            raise reader.error(("environment", "terms"), "expected a list of terms")
        terms = []
        for index, term in enumerate(terms_raw):
            path = ("environment", "terms", index)
            if not isinstance(term, dict):
                raise reader.error(path, "expected a mapping with z_n, tau and phi")
            reader.check_keys(term, TERM_KEYS, path)
            converted = {key: reader.convert(path + (key,), value, TERM_KEYS[key])
                         for key, value in term.items()}
            terms.append(reader.build(path, EnvironmentTerm, **converted))
    z0 = values.get("z0", config.environment.z0 if config.environment is not None else 50.0)
    config.environment = reader.build(("environment",), EnvironmentModel, z0=z0, terms=tuple(terms))


def _read_prototype(reader: _Reader, config: RunConfig):
    values = reader.values("prototype")
    name = values.get("name", DEFAULT_PROTOTYPE)
    base = reader.build(("prototype", "name"), prototype_preset, name,
                        values.get("epsilon", WORKED_SYNTHESIS["epsilon"]))
    coefficients = {key: values[key] for key in ("g0", "g1", "g2", "g3") if key in values}
    config.prototype = reader.build(("prototype",), dataclasses.replace, base, **coefficients)
    config.prototype_name = name


def _read_pump(reader: _Reader, config: RunConfig):
    raw = reader.section("pump")
    values = reader.values("pump", skip=("ramp_start", "ramp_cap"))
    if "mode" in values:
        mode = reader.enum(("pump", "mode"), values["mode"], PolicyMode)
    else:
        mode = PolicyMode.CURRENT if "i_p" in values and "xi3" not in values else PolicyMode.XI3
    xi_scale = reader.enum(("pump", "xi_scale"), values["xi_scale"], XiScale) \
        if "xi_scale" in values else XiScale.NETWORK
    config.pump = PumpSettings(mode=mode, i_dc=values.get("i_dc", 0.0), i_p=values.get("i_p"),
                               xi3=values.get("xi3"), omega_p=values.get("fp"),
                               phi_p=values.get("phi_p", 0.0), xi_scale=xi_scale)

    ramp_dimension = Dimension.CURRENT if mode is PolicyMode.CURRENT else Dimension.FREQUENCY
    policy = {"mode": mode, "xi_scale": xi_scale}
    for key, target in (("ramp_start", "start"), ("ramp_cap", "cap")):
        if raw.get(key) is not None:
            value = reader.convert(("pump", key), raw[key], ramp_dimension)
            policy[target] = value * TWO_PI if ramp_dimension is Dimension.FREQUENCY else value
    if mode is PolicyMode.CURRENT:
        policy.setdefault("start", 1e-6)
        policy.setdefault("cap", math.inf)
    for key in ("step_db", "gain_stop_db"):
        if key in values:
            policy[key] = values[key]
    config.policy = reader.build(("pump",), PumpPolicy, **policy)


def _read_search(reader: _Reader, config: RunConfig):
    values = reader.values("search")
    base = reader.build(("search", "preset"), search_preset, values.pop("preset")) \
        if "preset" in values else SearchRanges()
    config.aggregate = values.pop("aggregate", False)
    config.fractional_bandwidth = values.pop("fractional_bandwidth", None)
    renames = {"fp_half": "omega_p_half", "f0": "omega0"}
    overrides = {renames.get(key, key): value for key, value in values.items()}
    if "circuit" in overrides:
        overrides["circuit_kind"] = reader.enum(("search", "circuit"), overrides.pop("circuit"),
                                                CircuitKind)
    if "xi_scale" in overrides:
        overrides["xi_scale"] = reader.enum(("search", "xi_scale"), overrides["xi_scale"],
                                            XiScale)
    config.search = reader.build(("search",), dataclasses.replace, base, **overrides)


def _read_fit(reader: _Reader, config: RunConfig):
    values = reader.values("fit")
    if "model" in values:
        config.fit_model = reader.enum(("fit", "model"), values.pop("model"), ModelKind)
    if values:
        template = dict(model_kind=ModelKind.PARABOLIC, l_k0=values.pop("l_k0", 1.0))
        template.update(values)
        config.fit_template = reader.build(("fit",), KineticInductorModel, **template)


def parse_config(text: str, source: str = "<config>", fmt: str = "yaml") -> RunConfig:
    """
    Parse and validate a configuration document

    Args:
        text: YAML or TOML document
        source: name used in error locations
        fmt: 'yaml' or 'toml'

    Returns:
        RunConfig with SI-normalized values

    Raises:
        ConfigParseError: malformed document, unknown key or invalid value
    """
    data, marks = _load_document(text, source, fmt)
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigParseError("top level must be a mapping", 1, 1, source)

    reader = _Reader(data, marks, source)
    reader.check_keys(data, set(SCHEMA) | set(TOP_LEVEL), ())
    config = RunConfig()

    for key, kind in TOP_LEVEL.items():
        if data.get(key) is not None:
            value = reader.convert((key,), data[key], kind)
            if key == "command":
                config.command = reader.enum((key,), value, Command)
            elif key == "threads":
                if value < 1:
                    raise reader.error((key,), "must be at least 1")
                config.threads = value
            else:
                config.input_path = value

    config.design = _read_design(reader)
    _read_environment(reader, config)
    _read_prototype(reader, config)

    synthesis = reader.values("synthesis")
    config.synthesis = SynthesisInputs(**{**dataclasses.asdict(SynthesisInputs()), **synthesis})

    _read_pump(reader, config)
    config.sweep = SweepSettings(**reader.values("sweep"))
    _read_search(reader, config)
    config.noise = NoiseSettings(**reader.values("noise"))
    qubit = reader.values("qubit")
    config.qubit = QubitSettings(omega_q=qubit.get("f_q"), p_ref=qubit.get("p_ref"))
    _read_fit(reader, config)

    output = reader.values("output")
    config.output_path = output.get("path")
    if "format" in output:
        config.output_format = reader.enum(("output", "format"), output["format"], OutputFormat)

    logger.debug("Parsed %s: command=%s design=%s", source,
                 config.command.value if config.command else None,
                 "set" if config.design is not None else "default")
    return config


def load_config(path: Union[str, Path]) -> RunConfig:
    """Read a .yaml/.yml or .toml config file"""
    path = Path(path)
    fmt = "toml" if path.suffix.lower() == ".toml" else "yaml"
    with open(path, 'r', encoding='utf-8') as f:
        text = f.read()
    return parse_config(text, source=str(path), fmt=fmt)


def required(value, name: str):
    """Return value or raise a ValidationError naming the missing setting"""
    if value is None:
        raise ValidationError(f"{name} is required for this command")
    return value
