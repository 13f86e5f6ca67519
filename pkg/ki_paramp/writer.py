"""
Result serialization: per-command CSV schemas and a structured JSON mirror
"""
import csv
import io
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence, Tuple, Union

import numpy as np

from .errors import OutputError, ValidationError
from .models import (
    DesignRecord,
    GainProfile,
    KiFitResult,
    PumpBiasMap,
    QubitFitResult,
    SynthesisResult,
    ZnrSummary,
)

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
SIGNIFICANT_DIGITS = 12

SCHEMAS: Dict[str, Tuple[str, ...]] = {
    "simulate": ("freq_hz", "re_s11", "im_s11", "gain_db"),
    "map": ("fp_hz", "idc_a", "bandwidth_hz", "peaks", "ripple_db"),
    "search": ("z14", "z12", "znr", "fp2_hz", "bandwidth_hz", "xi3_hz", "eta"),
    "aggregate": ("znr", "mean_bandwidth_hz", "std_bandwidth_hz", "max_eta", "min_eta",
                  "capacitance_f"),
    "synth": ("z_ref", "z_quarter", "z_parallel", "z_half", "z_nr_primed", "r_nr_primed",
              "residual"),
    "fit-ki": ("model", "l_k0_h", "l_geo_h", "i_star2_a", "i_star4_a", "i_star_star_a", "n_exp",
               "residual_rms", "nfev"),
    "fit-qubit": ("gamma1_hz", "gamma_phi_hz", "omega_d_ref_hz", "p_ref_w", "a_in_db",
                  "residual_rms", "nfev"),
    "noise": ("freq_hz", "n_a", "g_snr_db", "t_sys_k"),
}

FORMATS = ("csv", "structured")

Record = Dict[str, Any]


def format_number(value: Any) -> str:
    """12 significant digits; inf/nan as 'inf', '-inf', 'nan'"""
    if isinstance(value, str):
        return value
    if value is None:
        return ""
    return f"{float(value):.{SIGNIFICANT_DIGITS}g}"


def _structured_value(value: Any):
    if isinstance(value, str) or value is None:
        return value
    return float(format_number(value))


def _parse_value(text: str):
    if text == "":
        return None
    try:
        return float(text)
    except ValueError:
        return text


def _schema(name: str) -> Tuple[str, ...]:
    if name not in SCHEMAS:
        raise ValidationError(f"unknown result schema '{name}'")
    return SCHEMAS[name]


def emit_results(records: Iterable[Record], schema: str, fmt: str = "csv") -> bytes:
    """
    Serialize homogeneous records in the column order of a schema

    Args:
        records: dicts keyed by the schema's columns
        schema: one of SCHEMAS
        fmt: 'csv' or 'structured'

    Returns:
        UTF-8 encoded document; identical input gives identical bytes
    """
    columns = _schema(schema)
    records = list(records)
    for index, record in enumerate(records):
        if set(record) != set(columns):
            raise ValidationError(f"record {index} does not match the '{schema}' schema")

    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(columns)
        for record in records:
            writer.writerow([format_number(record[col]) for col in columns])
        return buffer.getvalue().encode("utf-8")
    if fmt == "structured":
        document = {
            "schema": schema,
            "columns": list(columns),
            "records": [{col: _structured_value(record[col]) for col in columns}
                        for record in records],
        }
        return (json.dumps(document, indent=2) + "\n").encode("utf-8")
    raise ValidationError(f"unsupported output format '{fmt}' (use {' or '.join(FORMATS)})")


def parse_results(data: Union[bytes, str], fmt: str = "csv") -> Tuple[List[str], List[Record]]:
    """Read back an emitted document as (columns, records)"""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    if fmt == "csv":
        rows = list(csv.reader(io.StringIO(data)))
        if not rows:
            raise ValidationError("result document is empty")
        columns = rows[0]
        return columns, [dict(zip(columns, (_parse_value(v) for v in row))) for row in rows[1:]]
    if fmt == "structured":
        document = json.loads(data)
        return document["columns"], document["records"]
    raise ValidationError(f"unsupported output format '{fmt}'")


class ResultWriter:
    """Write command results to a file in the chosen format"""

    def __init__(self, output_format: str = "csv"):
        if output_format not in FORMATS:
            raise ValidationError(f"unsupported output format '{output_format}'")
        self.output_format = output_format

    def generate(self, records: Iterable[Record], schema: str) -> bytes:
        return emit_results(records, schema, self.output_format)

    def save_to_file(self, records: Iterable[Record], schema: str, output_path: str) -> Path:
        """
        Generate and save results

        Args:
            records: rows of the schema
            schema: result schema name
            output_path: destination file; parent directories are created

        Returns:
            Path written

        Raises:
            OutputError: if the file cannot be written
        """
        payload = self.generate(records, schema)
        output_file = Path(output_path)
        try:
            output_file.parent.mkdir(parents=True, exist_ok=True)
            with open(output_file, 'wb') as f:
                f.write(payload)
        except OSError as e:
            raise OutputError(str(output_file), e.strerror or str(e)) from e
        logger.info("Results saved to: %s", output_file)
        return output_file


# ---------------------------------------------------------------- record builders

def simulate_records(profile: GainProfile) -> List[Record]:
    return [
        {"freq_hz": float(f) / TWO_PI, "re_s11": float(np.real(s)), "im_s11": float(np.imag(s)),
         "gain_db": float(g)}
        for f, s, g in zip(profile.freqs, profile.s11, profile.gain_db)
    ]


def map_records(result: PumpBiasMap) -> List[Record]:
    return [
        {"fp_hz": cell.omega_p / TWO_PI, "idc_a": cell.i_dc,
         "bandwidth_hz": cell.report.qualifying_bandwidth / TWO_PI,
         "peaks": float(cell.report.peak_count), "ripple_db": cell.report.ripple_db}
        for cell in result.cells
    ]


def search_records(records: Sequence[DesignRecord]) -> List[Record]:
    return [
        {"z14": r.z_quarter, "z12": r.z_half, "znr": r.z_nr, "fp2_hz": r.omega_p_half / TWO_PI,
         "bandwidth_hz": r.max_bandwidth / TWO_PI, "xi3_hz": r.optimal_xi3 / TWO_PI, "eta": r.eta}
        for r in records
    ]


def aggregate_records(summaries: Sequence[ZnrSummary]) -> List[Record]:
    return [
        {"znr": s.z_nr, "mean_bandwidth_hz": s.mean_bandwidth / TWO_PI,
         "std_bandwidth_hz": s.std_bandwidth / TWO_PI, "max_eta": s.max_eta,
         "min_eta": s.min_eta, "capacitance_f": s.capacitance}
        for s in summaries
    ]


def synth_records(result: SynthesisResult) -> List[Record]:
    return [{col: getattr(result, col) for col in SCHEMAS["synth"]}]


def fit_ki_records(result: KiFitResult) -> List[Record]:
    model = result.model

    def optional(value):
        return math.nan if value is None else value

    return [{
        "model": model.model_kind.value, "l_k0_h": model.l_k0, "l_geo_h": model.l_geo,
        "i_star2_a": model.i_star2, "i_star4_a": optional(model.i_star4),
        "i_star_star_a": optional(model.i_star_star), "n_exp": model.n_exp,
        "residual_rms": result.residual_rms, "nfev": float(result.nfev),
    }]


def fit_qubit_records(result: QubitFitResult) -> List[Record]:
    return [{
        "gamma1_hz": result.gamma1 / TWO_PI, "gamma_phi_hz": result.gamma_phi / TWO_PI,
        "omega_d_ref_hz": result.omega_d_ref / TWO_PI, "p_ref_w": result.p_ref,
        "a_in_db": 10.0 * math.log10(result.a_in), "residual_rms": result.residual_rms,
        "nfev": float(result.nfev),
    }]
