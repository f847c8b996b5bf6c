import logging
import pathlib

import pandas as pd

from sensorsched import config

logger = logging.getLogger(__name__)


def get_absolute_path(path: pathlib.Path | str) -> pathlib.Path:
    if isinstance(path, str):
        path = pathlib.Path(path)
    return path if path.is_absolute() else config.DATA_ROOT / path


class CsvStore:
    """A directory of CSV artifacts, one per name: <dir>/<name>.csv

    Files use LF line endings, '.' decimals and no index column, so the same frame always
    produces the same bytes.
    """

    def __init__(self, dir: pathlib.Path | str, create_dir: bool = True):
        self._dir = get_absolute_path(dir)

        if create_dir and not self._dir.exists():
            logger.info(f"Creating directory: {self._dir}")
            self._dir.mkdir(parents=True, exist_ok=True)

    @property
    def dir(self) -> pathlib.Path:
        return self._dir

    def _get_file_name(self, name: str, extension: str = "csv") -> str:
        return f"{name}.{extension}" if not name.endswith(f".{extension}") else name

    def path(self, name: str, extension: str = "csv") -> pathlib.Path:
        return self._dir / self._get_file_name(name, extension)

    def write(self, name: str, frame: pd.DataFrame) -> pathlib.Path:
        file_path = self.path(name)
        frame.to_csv(file_path, index=False, lineterminator="\n", encoding="utf-8")
        logger.debug(f"Wrote {len(frame)} rows to {file_path}")
        return file_path

    def read(self, name: str) -> pd.DataFrame | None:
        file_path = self.path(name)
        if not file_path.exists():
            logger.warning(f"File not found: {file_path}")
            return None
        frame = pd.read_csv(file_path)
        logger.debug(f"Read {len(frame)} rows from {file_path}")
        return frame
