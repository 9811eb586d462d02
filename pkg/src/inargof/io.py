"""Reading count series from text and writing outputs atomically."""

from __future__ import annotations

import os
import tempfile
from pathlib import Path

from .core import CountSeries, InarError, validate_series


class InputFormatError(InarError, ValueError):
    """A line of an input file is not a non-negative integer."""

    def __init__(self, line: int, text: str, reason: str, source: str = "input"):
        self.line = line
        self.text = text
        super().__init__(f"{source}, line {line}: {reason}: {text!r}")


def _parse_count(token: str) -> int | None:
    try:
        return int(token)
    except ValueError:
        pass
    try:
        v = float(token)
    except ValueError:
        return None
    return int(v) if v.is_integer() else None


def parse_counts(text: str, source: str = "input") -> CountSeries:
    """One non-negative integer per line.

    Blank lines and ``#`` comments are skipped. A single-column CSV is accepted:
    surrounding quotes are stripped and a non-numeric first entry is read as a
    header.
    """
    values = []
    seen_content = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "," in line.rstrip(","):
            raise InputFormatError(lineno, raw, "expected a single column", source)
        token = line.rstrip(",").strip().strip('"').strip()
        v = _parse_count(token)
        if v is None:
            if not seen_content:
                seen_content = True
                continue
            raise InputFormatError(lineno, raw, "not an integer", source)
        seen_content = True
        if v < 0:
            raise InputFormatError(lineno, raw, "negative count", source)
        values.append(v)
    return validate_series(values, name=source)


def read_counts(path: str | os.PathLike) -> CountSeries:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot read {p}: {exc.strerror or exc}") from None
    return parse_counts(text, source=str(p))


def write_counts(series, path: str | os.PathLike | None = None) -> str:
    text = "".join(f"{int(v)}\n" for v in validate_series(series).values)
    if path is not None:
        atomic_write(path, text)
    return text


def atomic_write(path: str | os.PathLike, text: str) -> None:
    """Write via a temporary file in the target directory and rename into place."""
    p = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{p.name}.", suffix=".tmp", dir=p.parent or ".")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, p)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
