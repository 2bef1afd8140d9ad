# ricci_mcmc/util.py

"""
Shared plumbing: the package logger and the CSV writer/reader used by every
module that exports numbers.

CSV format:
    # key=value          (zero or more metadata lines)
    t,col_a,col_b        (header)
    0.0,0.5,0.25         (rows, shortest round-trip decimals)
"""

from __future__ import annotations
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .errors import IoError, ParseError

TRACE = 5
logging.addLevelName(TRACE, "TRACE")

logger = logging.getLogger("ricci_mcmc")
logger.addHandler(logging.NullHandler())

_LEVELS = {
    "ERROR": logging.ERROR,
    "WARNING": logging.WARNING,
    "INFO": logging.INFO,
    "DEBUG": logging.DEBUG,
    "TRACE": TRACE,
}


def set_verbose(verbose: str = "ERROR") -> None:
    """
    Set the verbosity of the package logger and attach a stderr handler.

    Args:
        verbose: one of "ERROR", "WARNING", "INFO", "DEBUG", "TRACE"

    Raises:
        ValueError: on an unknown level name
    """
    level = _LEVELS.get(verbose.upper())
    if level is None:
        raise ValueError(f"Unknown verbosity {verbose!r}. Allowed: {', '.join(_LEVELS)}")
    logger.setLevel(level)
    if not any(getattr(h, "_ricci_mcmc", False) for h in logger.handlers):
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
        handler._ricci_mcmc = True  # type: ignore[attr-defined]
        logger.addHandler(handler)


def format_float(x: float) -> str:
    # repr of a Python float is the shortest string that round-trips
    return repr(float(x))


def write_csv(
    path: Union[str, Path],
    header: Sequence[str],
    rows: Iterable[Sequence[float]],
    metadata: Optional[Mapping[str, Any]] = None,
) -> None:
    """
    Write a metadata-headed CSV file.

    Raises:
        IoError: if the parent directory is missing or the file cannot be written
    """
    path = Path(path)
    if not path.parent.exists():
        raise IoError(path, f"directory {path.parent} does not exist")

    lines: List[str] = []
    for key, value in (metadata or {}).items():
        lines.append(f"# {key}={value}")
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(format_float(v) for v in row))

    try:
        with path.open("w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as e:
        raise IoError(path, str(e)) from e


def read_csv(path: Union[str, Path]) -> Tuple[Dict[str, str], Dict[str, List[float]]]:
    """
    Read a file produced by write_csv.

    Returns:
        (metadata, columns) where columns maps header name -> list of floats

    Raises:
        ParseError: on a malformed row
    """
    metadata: Dict[str, str] = {}
    header: List[str] = []
    columns: Dict[str, List[float]] = {}

    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            metadata[key.strip()] = value.strip()
            continue
        if not header:
            header = [h.strip() for h in line.split(",")]
            columns = {h: [] for h in header}
            continue
        cells = line.split(",")
        if len(cells) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(cells)}", line=lineno)
        for name, cell in zip(header, cells):
            try:
                columns[name].append(float(cell))
            except ValueError as e:
                raise ParseError(f"not a number: {cell!r}", line=lineno) from e

    return metadata, columns
