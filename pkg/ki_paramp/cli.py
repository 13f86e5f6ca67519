"""
Command-line interface for ki-paramp
"""
import functools
import logging
import math
import sys
import traceback
from typing import Optional

import click
from colorama import Fore, Style, init

from . import __version__
from .config import Command, RunConfig, load_config, required
from .design_search import aggregate_by_znr, capacitance_for_bandwidth, search_designs
from .engine import THREADS_ENV
from .errors import KiParampError
from .ki_material import fit_ki_curve, load_ki_curve
from .models import PolicyMode, PumpOperatingPoint, XiPump, XiScale
from .noise import fit_qubit_saturation, load_noise_spectra, load_qubit_data, noise_spectra_table
from .presets import design_preset, prototype_preset, search_preset
from .simulator import (
    DEFAULT_FREQ_STEP,
    bandwidth_report,
    centered_grid,
    gain_spectrum,
    nr_resonance,
    pump_bias_map,
    span_grid,
)
from .synthesis import predict_fractional_bandwidth, synthesize_transformer
from .units import Dimension, parse_quantity, parse_span
from .writer import (
    ResultWriter,
    aggregate_records,
    emit_results,
    fit_ki_records,
    fit_qubit_records,
    map_records,
    search_records,
    simulate_records,
    synth_records,
)

init(autoreset=True)

TWO_PI = 2.0 * math.pi
DEFAULT_DESIGN = "reference-device"

LEVEL_STYLES = {
    logging.DEBUG: (Fore.WHITE, "[.]"),
    logging.INFO: (Fore.CYAN, "[+]"),
    logging.WARNING: (Fore.YELLOW, "[!]"),
    logging.ERROR: (Fore.RED, "[X]"),
}


class ColorHandler(logging.Handler):
    """Echo log records to stderr with the status prefixes of the CLI"""

    def emit(self, record):
        color, prefix = LEVEL_STYLES.get(record.levelno, LEVEL_STYLES[logging.ERROR])
        try:
            click.echo(f"{color}{prefix} {self.format(record)}{Style.RESET_ALL}", err=True)
        except Exception:
            self.handleError(record)


def configure_logging(verbose: bool):
    package_logger = logging.getLogger("ki_paramp")
    for handler in list(package_logger.handlers):
        if isinstance(handler, ColorHandler):
            package_logger.removeHandler(handler)
    package_logger.addHandler(ColorHandler())
    package_logger.setLevel(logging.DEBUG if verbose else logging.INFO)
    package_logger.propagate = False


def print_banner():
    """Print application banner"""
    banner = f"""
{Fore.CYAN}===============================================================
              {Fore.WHITE}ki-paramp v{__version__}{Fore.CYAN}
     {Fore.WHITE}Kinetic-Inductance Parametric Amplifier Toolkit{Fore.CYAN}
==============================================================={Style.RESET_ALL}
"""
    click.echo(banner, err=True)


def print_summary(title: str, rows):
    """Print a titled block of label/value pairs"""
    click.echo(f"\n{Fore.CYAN}=== {title} ==={Style.RESET_ALL}", err=True)
    for label, value in rows:
        click.echo(f"  {label:22s}: {Fore.WHITE}{value}{Style.RESET_ALL}", err=True)


def common_options(func):
    """Options shared by every subcommand"""
    options = [
        click.option('--config', '-c', 'config_path', type=click.Path(dir_okay=False),
                     help='YAML (.yaml/.yml) or TOML (.toml) run configuration'),
        click.option('--preset', '-p', type=str,
                     help='Named design, search or prototype preset for this command'),
        click.option('--out', '-o', type=click.Path(dir_okay=False),
                     help='Output file (default: standard output)'),
        click.option('--format', '-f', 'output_format',
                     type=click.Choice(['csv', 'structured'], case_sensitive=False),
                     help='Output format: csv or structured (default: csv)'),
        click.option('--threads', '-t', type=click.IntRange(min=1), envvar=THREADS_ENV,
                     help=f'Worker threads for sweeps (default: ${THREADS_ENV} or 1)'),
        click.option('--verbose', is_flag=True, help='Enable debug output and tracebacks'),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def guarded(func):
    """Map library errors to the documented exit codes"""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        verbose = kwargs.get('verbose', False)
        configure_logging(verbose)
        print_banner()
        try:
            func(*args, **kwargs)
        except KiParampError as e:
            click.echo(f"{Fore.RED}[X] Error: {e}{Style.RESET_ALL}", err=True)
            sys.exit(e.exit_code)
        except FileNotFoundError as e:
            click.echo(f"{Fore.RED}[X] Error: {e}{Style.RESET_ALL}", err=True)
            sys.exit(3)
        except Exception as e:
            click.echo(f"{Fore.RED}[X] Unexpected error: {e}{Style.RESET_ALL}", err=True)
            if verbose:
                traceback.print_exc()
            sys.exit(2)

    return wrapper


def load_run_config(config_path: Optional[str]) -> RunConfig:
    return load_config(config_path) if config_path else RunConfig()


def write_results(records, schema: str, config: RunConfig, out: Optional[str],
                  output_format: Optional[str]):
    fmt = (output_format or config.output_format.value).lower()
    path = out or config.output_path
    if path:
        ResultWriter(fmt).save_to_file(records, schema, path)
        click.echo(f"{Fore.GREEN}[OK] Results written to {path}{Style.RESET_ALL}", err=True)
    else:
        click.echo(emit_results(records, schema, fmt).decode("utf-8"), nl=False)


def resolve_design(config: RunConfig, preset: Optional[str]):
    if preset:
        return design_preset(preset)
    return config.design or design_preset(DEFAULT_DESIGN)


def resolve_pump(config: RunConfig, design, idc, fp, xi3, ip, xi_scale=None):
    settings = config.pump
    scale = XiScale(xi_scale.lower()) if xi_scale else settings.xi_scale
    i_c = design.ki_model.i_c
    i_dc = parse_quantity(idc, Dimension.CURRENT, "--idc") if idc else settings.i_dc
    omega_p = TWO_PI * parse_quantity(fp, Dimension.FREQUENCY, "--fp") if fp else settings.omega_p
    if omega_p is None:
        omega_p = 2.0 * nr_resonance(design, i_dc)
    if xi3:
        return XiPump(xi3=TWO_PI * parse_quantity(xi3, Dimension.FREQUENCY, "--xi3"),
                      omega_p=omega_p, i_dc=i_dc, phi_p=settings.phi_p, scale=scale)
    if ip:
        return PumpOperatingPoint(i_dc=i_dc, i_p_mag=parse_quantity(ip, Dimension.CURRENT, "--ip"),
                                  omega_p=omega_p, phi_p=settings.phi_p, i_c=i_c)
    if settings.mode is PolicyMode.CURRENT or (settings.xi3 is None and settings.i_p is not None):
        return PumpOperatingPoint(i_dc=i_dc, i_p_mag=required(settings.i_p, "pump.i_p"),
                                  omega_p=omega_p, phi_p=settings.phi_p, i_c=i_c)
    return XiPump(xi3=required(settings.xi3, "pump.xi3 (or --xi3)"), omega_p=omega_p,
                  i_dc=i_dc, phi_p=settings.phi_p, scale=scale)


def angular_span(value: Optional[str], key: str):
    start, stop, step = parse_span(value, Dimension.FREQUENCY, key)
    return TWO_PI * start, TWO_PI * stop, TWO_PI * step


class KiParampGroup(click.Group):
    """Command group whose usage errors exit with the invalid-input code"""

    def main(self, *args, standalone_mode=True, **kwargs):
        if not standalone_mode:
            return super().main(*args, standalone_mode=False, **kwargs)
        try:
            rv = super().main(*args, standalone_mode=False, **kwargs)
        except click.UsageError as e:
            e.show()
            sys.exit(1)
        except click.ClickException as e:
            e.show()
            sys.exit(e.exit_code)
        except click.Abort:
            click.echo("Aborted!", err=True)
            sys.exit(1)
        sys.exit(rv if isinstance(rv, int) else 0)


@click.group(cls=KiParampGroup, invoke_without_command=True)
@click.option('--version', is_flag=True, help='Show version and exit')
@click.pass_context
def main(ctx, version):
    """
    ki-paramp - Kinetic-inductance parametric amplifier toolkit

    Synthesizes three-stage impedance transformers, simulates pumped gain
    spectra, searches the design space and reduces noise and qubit
    calibration data. Frequencies on the command line are ordinary
    frequencies with units (e.g. 16.9GHz); currents take units such as mA.

    Examples:

      # Synthesize the transformer of the worked example
      ki-paramp synth

      # Gain spectrum of the reference device
      ki-paramp simulate --xi3 600MHz --span 7.7GHz:8.3GHz:1MHz -o gain.csv

      # Run whatever the config file asks for
      ki-paramp run -c config.yaml
    """
    if version:
        click.echo(f"ki-paramp v{__version__}")
        sys.exit(0)
    if ctx.invoked_subcommand is None:
        click.echo(ctx.get_help())


@main.command()
@common_options
@click.option('--epsilon', type=float, help='Fractional bandwidth of the prototype')
@guarded
def synth(config_path, preset, out, output_format, threads, verbose, epsilon):
    """Synthesize transformer impedances from prototype coefficients"""
    config = load_run_config(config_path)
    proto = config.prototype
    if preset or epsilon is not None:
        proto = prototype_preset(preset or config.prototype_name,
                                 epsilon if epsilon is not None else proto.epsilon)
    inputs = config.synthesis
    result = synthesize_transformer(proto, inputs.z_nr, inputs.z_ki, inputs.z0)
    write_results(synth_records(result), "synth", config, out, output_format)

    rows = [
        ("Z_ref", f"{result.z_ref:.3f} ohm"),
        ("Z_quarter", f"{result.z_quarter:.3f} ohm"),
        ("Z_parallel", f"{result.z_parallel:.3f} ohm"),
        ("Z_half", f"{result.z_half:.3f} ohm"),
        ("Fractional bandwidth",
         f"{predict_fractional_bandwidth(proto.g1, result.z_nr_primed, result.r_nr_primed):.4f}"),
    ]
    if inputs.f0 is not None:
        rows.append(("Bandwidth", f"{proto.epsilon * inputs.f0 / TWO_PI / 1e6:.1f} MHz"))
    print_summary("Synthesis Summary", rows)


@main.command()
@common_options
@click.option('--idc', type=str, help='Bias current, e.g. 0.57mA')
@click.option('--fp', type=str, help='Pump frequency, e.g. 16.9GHz (default: twice the resonance)')
@click.option('--xi3', type=str, help='Three-wave mixing strength |xi3|/2pi, e.g. 600MHz')
@click.option('--ip', type=str, help='Pump current amplitude, e.g. 0.3mA')
@click.option('--span', type=str, help='Signal grid start:stop:step, e.g. 7.9GHz:8.9GHz:1MHz')
@click.option('--xi-scale', type=click.Choice([s.value for s in XiScale], case_sensitive=False),
              help='How --xi3 maps to the modulation strength (default: network)')
@guarded
def simulate(config_path, preset, out, output_format, threads, verbose, idc, fp, xi3, ip, span,
             xi_scale):
    """Pumped reflection gain spectrum of one design"""
    config = load_run_config(config_path)
    design = resolve_design(config, preset)
    pump = resolve_pump(config, design, idc, fp, xi3, ip, xi_scale)

    if span:
        freqs = span_grid(*angular_span(span, "--span"))
    elif config.sweep.span is not None:
        freqs = span_grid(*config.sweep.span)
    else:
        half = pump.omega_p / 2.0
        freqs = centered_grid(half, config.sweep.half_width or 0.1 * half,
                              config.sweep.step or DEFAULT_FREQ_STEP)

    profile = gain_spectrum(design, pump, config.environment, freqs, config.convention)
    write_results(simulate_records(profile), "simulate", config, out, output_format)

    report = bandwidth_report(profile, config.sweep.threshold_db, config.sweep.ripple_max_db)
    print_summary("Gain Summary", [
        ("Points", len(freqs)),
        ("Max gain", f"{profile.max_gain_db:.2f} dB"),
        (f"{report.threshold_db:g}-dB bandwidth", f"{report.bandwidth / TWO_PI / 1e6:.1f} MHz"),
        ("Gain peaks", report.peak_count),
        ("Ripple", f"{report.ripple_db:.2f} dB"),
        ("Oscillating points", report.oscillation_points),
    ])


@main.command(name='map')
@common_options
@click.option('--fp-span', type=str, help='Pump frequency grid start:stop:step')
@click.option('--idc-span', type=str, help='Bias current grid start:stop:step, e.g. 0mA:1mA:0.1mA')
@guarded
def map_command(config_path, preset, out, output_format, threads, verbose, fp_span, idc_span):
    """Best 17-dB bandwidth over a pump-frequency by bias-current grid"""
    config = load_run_config(config_path)
    design = resolve_design(config, preset)
    sweep = config.sweep

    if fp_span:
        omega_p_grid = span_grid(*angular_span(fp_span, "--fp-span"))
    else:
        omega_p_grid = span_grid(*required(sweep.fp_span, "sweep.fp_span (or --fp-span)"))
    if idc_span:
        i_dc_grid = span_grid(*parse_span(idc_span, Dimension.CURRENT, "--idc-span"))
    elif sweep.idc_span is not None:
        i_dc_grid = span_grid(*sweep.idc_span)
    else:
        i_dc_grid = [config.pump.i_dc]

    result = pump_bias_map(design, config.environment, omega_p_grid, i_dc_grid,
                           policy=config.policy, freq_step=sweep.step or DEFAULT_FREQ_STEP,
                           half_width=sweep.half_width, threads=threads or config.threads,
                           convention=config.convention, threshold_db=sweep.threshold_db,
                           ripple_max_db=sweep.ripple_max_db)
    write_results(map_records(result), "map", config, out, output_format)

    best = max(result.cells, key=lambda cell: cell.report.qualifying_bandwidth)
    print_summary("Map Summary", [
        ("Cells", len(result.cells)),
        ("Failed cells", len(result.warnings)),
        ("Best bandwidth", f"{best.report.qualifying_bandwidth / TWO_PI / 1e6:.1f} MHz"),
        ("  at pump", f"{best.omega_p / TWO_PI / 1e9:.4f} GHz"),
        ("  at bias", f"{best.i_dc * 1e3:.3f} mA"),
    ])


@main.command()
@common_options
@click.option('--aggregate', is_flag=True,
              help='Emit per-Z_NR statistics instead of individual designs')
@guarded
def search(config_path, preset, out, output_format, threads, verbose, aggregate):
    """Brute-force search over transformer and resonator impedances"""
    config = load_run_config(config_path)
    ranges = search_preset(preset) if preset else config.search
    records = list(search_designs(ranges, threads or config.threads))

    summaries = aggregate_by_znr(records, ranges.omega0)
    if aggregate or config.aggregate:
        write_results(aggregate_records(summaries), "aggregate", config, out, output_format)
    else:
        write_results(search_records(records), "search", config, out, output_format)

    rows = [("Circuit", ranges.circuit_kind.value), ("Qualifying designs", len(records))]
    if records:
        rows.append(("Max pump efficiency", f"{max(r.eta for r in records):.4f}"))
        rows.append(("Max bandwidth",
                     f"{max(r.max_bandwidth for r in records) / TWO_PI / 1e6:.1f} MHz"))
    if config.fractional_bandwidth is not None:
        capacitance = capacitance_for_bandwidth(summaries, ranges.omega0, config.fractional_bandwidth)
        rows.append((f"C at {config.fractional_bandwidth:.0%} bandwidth",
                     "none" if math.isnan(capacitance) else f"{capacitance * 1e15:.1f} fF"))
    print_summary("Search Summary", rows)


@main.command(name='fit-ki')
@common_options
@click.argument('input_path', required=False, type=click.Path(dir_okay=False))
@click.option('--model', type=click.Choice(['parabolic', 'quartic', 'clem']),
              help='Inductance law to fit (default: parabolic)')
@guarded
def fit_ki(config_path, preset, out, output_format, threads, verbose, input_path, model):
    """Fit a kinetic-inductance law to an `i_dc_A,dfrac` frequency-shift curve"""
    config = load_run_config(config_path)
    path = required(input_path or config.input_path, "input file")
    result = fit_ki_curve(load_ki_curve(path), model or config.fit_model, config.fit_template)
    write_results(fit_ki_records(result), "fit-ki", config, out, output_format)
    print_summary("Fit Summary", [
        ("Model", result.model.model_kind.value),
        ("I*2", f"{result.model.i_star2 * 1e3:.4g} mA"),
        ("RMS residual", f"{result.residual_rms:.3e}"),
        ("Evaluations", result.nfev),
    ])


@main.command(name='fit-qubit')
@common_options
@click.argument('input_path', required=False, type=click.Path(dir_okay=False))
@click.option('--fq', type=str, help='Qubit frequency, e.g. 8.4GHz')
@click.option('--p-ref', type=str, help='Reference source power, e.g. -80dBm')
@guarded
def fit_qubit(config_path, preset, out, output_format, threads, verbose, input_path, fq, p_ref):
    """Calibrate input attenuation from qubit saturation spectroscopy"""
    config = load_run_config(config_path)
    path = required(input_path or config.input_path, "input file")
    omega_q = TWO_PI * parse_quantity(fq, Dimension.FREQUENCY, "--fq") if fq else config.qubit.omega_q
    reference = parse_quantity(p_ref, Dimension.POWER, "--p-ref") if p_ref else config.qubit.p_ref

    data = load_qubit_data(path)
    result = fit_qubit_saturation(data.detuning, data.p_vna, data.s21,
                                  required(omega_q, "qubit.f_q (or --fq)"), reference)
    write_results(fit_qubit_records(result), "fit-qubit", config, out, output_format)
    print_summary("Qubit Calibration", [
        ("gamma1/2pi", f"{result.gamma1 / TWO_PI / 1e6:.4g} MHz"),
        ("gamma_phi/2pi", f"{result.gamma_phi / TWO_PI / 1e3:.4g} kHz"),
        ("Omega_d/2pi at p_ref", f"{result.omega_d_ref / TWO_PI / 1e3:.4g} kHz"),
        ("A_in", f"{10.0 * math.log10(result.a_in):.2f} dB"),
    ])


@main.command()
@common_options
@click.argument('input_path', required=False, type=click.Path(dir_okay=False))
@click.option('--gs', type=str, help='PA gain, e.g. 20dB (if the spectra carry no g_s_db column)')
@click.option('--gsys', type=str, help='Calibrated gain from PA output to receiver, e.g. 76dB')
@guarded
def noise(config_path, preset, out, output_format, threads, verbose, input_path, gs, gsys):
    """Added noise, SNR gain and system temperature from noise spectra"""
    config = load_run_config(config_path)
    path = required(input_path or config.input_path, "input file")
    g_s = parse_quantity(gs, Dimension.RATIO, "--gs") if gs else config.noise.g_s
    g_sys_eff = parse_quantity(gsys, Dimension.RATIO, "--gsys") if gsys else config.noise.g_sys_eff

    rows = noise_spectra_table(load_noise_spectra(path),
                               required(g_sys_eff, "noise.g_sys_eff (or --gsys)"), g_s,
                               n1=config.noise.n1, b_m=config.noise.b_m)
    write_results(rows, "noise", config, out, output_format)
    print_summary("Noise Summary", [
        ("Points", len(rows)),
        ("N_A range", f"{min(r['n_a'] for r in rows):.3f} .. {max(r['n_a'] for r in rows):.3f} quanta"),
        ("T_sys range", f"{min(r['t_sys_k'] for r in rows):.2f} .. {max(r['t_sys_k'] for r in rows):.2f} K"),
    ])


COMMANDS = {
    Command.SYNTH: synth,
    Command.SIMULATE: simulate,
    Command.MAP: map_command,
    Command.SEARCH: search,
    Command.FIT_KI: fit_ki,
    Command.FIT_QUBIT: fit_qubit,
    Command.NOISE: noise,
}


@main.command()
@click.option('--config', '-c', 'config_path', required=True, type=click.Path(dir_okay=False),
              help='Run configuration naming the command to execute')
@click.option('--verbose', is_flag=True, help='Enable debug output and tracebacks')
@click.pass_context
def run(ctx, config_path, verbose):
    """Execute the command named in a configuration file"""
    configure_logging(verbose)
    try:
        config = load_config(config_path)
        command = required(config.command, "command")
    except KiParampError as e:
        click.echo(f"{Fore.RED}[X] Error: {e}{Style.RESET_ALL}", err=True)
        sys.exit(e.exit_code)
    except FileNotFoundError as e:
        click.echo(f"{Fore.RED}[X] Error: {e}{Style.RESET_ALL}", err=True)
        sys.exit(3)
    ctx.invoke(COMMANDS[command], config_path=config_path, verbose=verbose)


if __name__ == '__main__':
    main()
