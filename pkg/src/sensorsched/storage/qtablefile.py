import logging
import pathlib

import numpy as np

from sensorsched.models.scheduling import QTable, ScheduleError

logger = logging.getLogger(__name__)


def _fmt(value: float) -> str:
    return format(value, ".17g")


def write_qtable(path: pathlib.Path | str, table: QTable) -> None:
    """Header ``K A_max``, then one ``class prev q_1 .. q_Amax`` line per state."""
    lines = [f"{table.num_classes} {table.a_max}"]
    for class_id in range(table.num_classes):
        for prev in range(1, table.a_max + 1):
            row = table.weights[class_id * table.a_max + prev - 1]
            lines.append(" ".join([str(class_id), str(prev), *map(_fmt, row)]))
    pathlib.Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    logger.info(f"Wrote Q-table ({table.num_classes}x{table.a_max}) to {path}")


def read_qtable(path: pathlib.Path | str) -> QTable:
    lines = pathlib.Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise ScheduleError(f"{path}: empty Q-table file")
    try:
        num_classes, a_max = (int(v) for v in lines[0].split())
    except ValueError as e:
        raise ScheduleError(f"{path}: bad header {lines[0]!r}") from e

    weights = np.zeros((num_classes * a_max, a_max), dtype=np.float64)
    rows = [line for line in lines[1:] if line.strip()]
    if len(rows) != num_classes * a_max:
        raise ScheduleError(f"{path}: expected {num_classes * a_max} rows, got {len(rows)}")
    for line in rows:
        fields = line.split()
        if len(fields) != a_max + 2:
            raise ScheduleError(f"{path}: row has {len(fields)} fields, expected {a_max + 2}")
        class_id, prev = int(fields[0]), int(fields[1])
        if not (0 <= class_id < num_classes and 1 <= prev <= a_max):
            raise ScheduleError(f"{path}: state ({class_id}, {prev}) outside table")
        weights[class_id * a_max + prev - 1] = [float(v) for v in fields[2:]]
    return QTable(num_classes, a_max, weights)
