"""Process pool for sweep points."""

import logging
import sys
from collections.abc import Callable, Sequence
from concurrent.futures import ProcessPoolExecutor
from typing import Any

from nemsim.progress.events import (
    capture_point_finished,
    capture_point_started,
    install_stderr_printer,
)

logger = logging.getLogger(__name__)


def _init_worker(log_level: int) -> None:
    logging.basicConfig(
        level=log_level,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s [%(processName)s] %(name)s: %(message)s",
    )
    install_stderr_printer()


def map_points(
    fn: Callable[[dict[str, float]], Any],
    points: Sequence[dict[str, float]],
    workers: int,
    experiment: str = "",
) -> list[Any]:
    """Apply ``fn`` to every point; results come back in input order.

    One worker (or one point) runs in-process. ``fn`` must be picklable.
    """
    total = len(points)
    if workers <= 1 or total <= 1:
        results = []
        for index, point in enumerate(points):
            capture_point_started(experiment, index, point)
            results.append(fn(point))
            capture_point_finished(experiment, index, total)
        return results

    size = min(workers, total)
    logger.debug("dispatching %d points to %d processes", total, size)
    with ProcessPoolExecutor(
        max_workers=size,
        initializer=_init_worker,
        initargs=(logging.getLogger().getEffectiveLevel(),),
    ) as executor:
        futures = []
        for index, point in enumerate(points):
            capture_point_started(experiment, index, point)
            futures.append(executor.submit(fn, point))
        results = []
        for index, future in enumerate(futures):
            results.append(future.result())
            capture_point_finished(experiment, index, total)
    return results
