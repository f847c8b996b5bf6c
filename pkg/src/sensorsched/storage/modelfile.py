import logging
import pathlib

import numpy as np

from sensorsched.models.openworld import EVMError, EVMParams
from sensorsched.openworld.evm import EVMModel, Standardizer

logger = logging.getLogger(__name__)


def _fmt(values) -> str:
    return " ".join(format(float(v), ".17g") for v in values)


def write_model(path: pathlib.Path | str, model: EVMModel) -> None:
    """Plain-text EVM: a header, the parameters, the standardizer, then one
    ``class shape scale v_1 .. v_d`` line per extreme vector."""
    p = model.params
    lines = [
        f"evm {model.dim} {len(model)}",
        f"params {p.tail_size} {_fmt([p.cover_threshold, p.distance_multiplier])} "
        f"{_fmt([p.rejection_threshold])} {int(p.standardize)}",
        f"mean {_fmt(model.standardizer.mean)}",
        f"scale {_fmt(model.standardizer.scale)}",
    ]
    for label, shape, scale, anchor in zip(model.labels, model.shapes, model.scales, model.anchors):
        lines.append(f"{int(label)} {_fmt([shape, scale])} {_fmt(anchor)}")
    pathlib.Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    logger.info(f"Wrote EVM with {len(model)} extreme vectors to {path}")


def _tagged(line: str, tag: str) -> list[str]:
    fields = line.split()
    if not fields or fields[0] != tag:
        raise ValueError(f"expected a '{tag}' line, got {line!r}")
    return fields[1:]


def read_model(path: pathlib.Path | str) -> EVMModel:
    lines = [line for line in pathlib.Path(path).read_text(encoding="utf-8").splitlines() if line]
    if len(lines) < 4:
        raise EVMError(f"{path}: truncated model file")
    try:
        dim, n_evs = (int(v) for v in _tagged(lines[0], "evm"))
        tail, cover, mult, delta, standardize = _tagged(lines[1], "params")
        params = EVMParams(
            tail_size=int(tail),
            cover_threshold=float(cover),
            distance_multiplier=float(mult),
            rejection_threshold=float(delta),
            standardize=bool(int(standardize)),
        )
        mean = np.array(_tagged(lines[2], "mean"), dtype=np.float64)
        scale = np.array(_tagged(lines[3], "scale"), dtype=np.float64)
        rows = np.array([line.split() for line in lines[4:]], dtype=np.float64)
    except ValueError as e:
        raise EVMError(f"{path}: {e}") from e

    if rows.shape != (n_evs, dim + 3):
        raise EVMError(f"{path}: expected {n_evs} rows of {dim + 3} fields, got {rows.shape}")
    return EVMModel(
        params,
        anchors=rows[:, 3:],
        shapes=rows[:, 1],
        scales=rows[:, 2],
        labels=rows[:, 0].astype(np.int64),
        standardizer=Standardizer(mean, scale),
    )
