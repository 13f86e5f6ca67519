"""
Sweep engine that evaluates independent grid cells and merges them in grid order
"""
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Generic, Iterable, List, Optional, TypeVar

from .errors import KiParampError, ValidationError

logger = logging.getLogger(__name__)

THREADS_ENV = "KI_PARAMP_THREADS"

CellT = TypeVar("CellT")
ResultT = TypeVar("ResultT")


def resolve_threads(threads: Optional[int] = None) -> int:
    """Explicit thread count, else KI_PARAMP_THREADS, else 1"""
    if threads is None:
        raw = os.environ.get(THREADS_ENV)
        if not raw:
            return 1
        try:
            threads = int(raw)
        except ValueError:
            raise ValidationError(f"{THREADS_ENV} must be an integer, got {raw!r}")
    if threads < 1:
        raise ValidationError(f"thread count must be at least 1, got {threads}")
    return threads


@dataclass
class SweepResult(Generic[ResultT]):
    """Per-cell outputs in grid order; failed cells hold None"""
    outputs: List[Optional[ResultT]] = field(default_factory=list)
    errors: List[str] = field(default_factory=list)

    def add_error(self, error: str):
        """Add an error message"""
        self.errors.append(error)


class SweepEngine:
    """Runs a pure cell function over a grid, optionally on a thread pool"""

    def __init__(self, threads: Optional[int] = None):
        """
        Args:
            threads: worker count; None reads KI_PARAMP_THREADS
        """
        self.threads = resolve_threads(threads)

    def run(self, func: Callable[[CellT], ResultT], cells: Iterable[CellT],
            label: str = "sweep") -> SweepResult[ResultT]:
        """
        Evaluate func on every cell

        Numerical failures in one cell are recorded and do not stop the sweep.
        Output order always follows the input order.
        """
        cells = list(cells)
        result: SweepResult[ResultT] = SweepResult()
        logger.info("Running %s over %d cells on %d thread(s)", label, len(cells), self.threads)

        def guarded(indexed):
            index, cell = indexed
            try:
                return func(cell), None
            except KiParampError as e:
                return None, f"{label} cell {index}: {e}"

        if self.threads == 1:
            evaluated = map(guarded, enumerate(cells))
        else:
            executor = ThreadPoolExecutor(max_workers=self.threads)
            evaluated = executor.map(guarded, enumerate(cells))

        try:
            for output, error in evaluated:
                result.outputs.append(output)
                if error is not None:
                    logger.warning(error)
                    result.add_error(error)
        finally:
            if self.threads > 1:
                executor.shutdown(wait=True)

        logger.info("Finished %s: %d cells, %d failed", label, len(cells), len(result.errors))
        return result
