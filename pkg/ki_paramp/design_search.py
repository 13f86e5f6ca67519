"""
Brute-force design-space search over transformer and resonator impedances
"""
import logging
import math
from collections import defaultdict
from itertools import product
from typing import Iterable, Iterator, List, Optional, Tuple

import numpy as np

from .engine import SweepEngine
from .models import CircuitKind, DesignRecord, SearchRanges, XiPump, ZnrSummary
from .presets import design_from_impedances
from .simulator import (
    ReflectionModel,
    bandwidth_report,
    centered_grid,
    modulated_inductor,
    span_grid,
)

logger = logging.getLogger(__name__)

GridPoint = Tuple[float, float, float, float]


def search_grid(ranges: SearchRanges) -> List[GridPoint]:
    """(z_quarter, z_half, z_nr, omega_p_half) in lexicographic order"""
    return list(product(
        span_grid(*ranges.z_quarter),
        span_grid(*ranges.z_half),
        span_grid(*ranges.z_nr),
        span_grid(*ranges.omega_p_half),
    ))


def xi3_ramp(ranges: SearchRanges) -> Iterator[float]:
    """Multiplicative ramp of |xi3| up to the configured cap"""
    limit = min(ranges.xi3_cap, ranges.xi_scale.ceiling(ranges.omega0) * (1.0 - 1e-9))
    xi3 = ranges.xi3_start
    while xi3 <= limit:
        yield xi3
        xi3 *= ranges.xi3_factor


def evaluate_design(point: GridPoint, ranges: SearchRanges) -> Optional[DesignRecord]:
    """
    Ramp |xi3| for one grid point until the gain passes gain_stop_db

    Returns:
        DesignRecord for the widest qualifying profile, or None
    """
    z_quarter, z_half, z_nr, omega_p_half = point
    z_ki = ranges.z_ki if ranges.circuit_kind is CircuitKind.THREE_STAGE else None
    design = design_from_impedances(z_quarter=z_quarter, z_half=z_half, z_nr=z_nr,
                                    f0=ranges.omega0, z_ki=z_ki, z0=ranges.z0)
    omega_p = 2.0 * omega_p_half
    freqs = centered_grid(omega_p_half, ranges.window, ranges.freq_step)
    model = ReflectionModel(design, None, omega_p, freqs)

    best_bandwidth = 0.0
    best_xi3 = 0.0
    for xi3 in xi3_ramp(ranges):
        pump = XiPump(xi3=xi3, omega_p=omega_p, scale=ranges.xi_scale)
        ind, _ = modulated_inductor(design, pump)
        profile = model.profile(ind)
        report = bandwidth_report(profile, ranges.threshold_db, ranges.ripple_max_db,
                                  require_two_peaks=True)
        if report.accepted and report.bandwidth > best_bandwidth:
            best_bandwidth, best_xi3 = report.bandwidth, xi3
        if profile.max_gain_db > ranges.gain_stop_db:
            break

    if best_bandwidth <= 0:
        return None
    return DesignRecord(z_quarter=float(z_quarter), z_half=float(z_half), z_nr=float(z_nr),
                        omega_p_half=float(omega_p_half), max_bandwidth=best_bandwidth,
                        optimal_xi3=best_xi3, eta=best_bandwidth / best_xi3)


def search_designs(ranges: SearchRanges, threads: Optional[int] = None) -> Iterator[DesignRecord]:
    """
    Qualifying designs of the grid, in lexicographic grid order

    Args:
        ranges: search grid and ramp settings
        threads: worker count for the sweep engine

    Yields:
        DesignRecord per qualifying grid point
    """
    points = search_grid(ranges)
    sweep = SweepEngine(threads).run(lambda p: evaluate_design(p, ranges), points,
                                     label=f"{ranges.circuit_kind.value} design search")
    found = 0
    for record in sweep.outputs:
        if record is None:
            continue
        if not 0 < record.eta < 1:
            logger.warning("Pump efficiency %.3f outside (0, 1) at z_nr=%.1f ohm",
                           record.eta, record.z_nr)
        found += 1
        yield record
    logger.info("%d of %d grid points qualify", found, len(points))


def aggregate_by_znr(records: Iterable[DesignRecord], omega0: float) -> List[ZnrSummary]:
    """
    Bandwidth and pump-efficiency statistics per resonator impedance

    Args:
        records: qualifying designs
        omega0: design frequency fixing C = 1 / (omega0 z_nr)

    Returns:
        ZnrSummary list sorted by z_nr
    """
    groups = defaultdict(list)
    for record in records:
        groups[record.z_nr].append(record)

    summaries = []
    for z_nr in sorted(groups):
        group = groups[z_nr]
        bandwidths = np.array([r.max_bandwidth for r in group])
        etas = np.array([r.eta for r in group])
        summaries.append(ZnrSummary(
            z_nr=z_nr,
            mean_bandwidth=float(np.mean(bandwidths)),
            std_bandwidth=float(np.std(bandwidths)),
            max_eta=float(np.max(etas)),
            min_eta=float(np.min(etas)),
            capacitance=1.0 / (omega0 * z_nr),
            count=len(group),
        ))
    return summaries


def capacitance_for_bandwidth(summaries: List[ZnrSummary], omega0: float,
                              fractional_bandwidth: float) -> float:
    """
    Shunt capacitance of the smallest-capacitance z_nr bin reaching a target bandwidth

    Returns math.nan when no bin reaches it.
    """
    target = fractional_bandwidth * omega0
    reaching = [s for s in summaries if s.mean_bandwidth >= target]
    if not reaching:
        return math.nan
    return min(s.capacitance for s in reaching)
