"""Plain-text integer matrices: one row per line, whitespace separated, ``#`` comments."""

from __future__ import annotations

from pathlib import Path


class MatrixFormatError(ValueError):
    pass


def parse_matrix(text: str) -> list[list[int]]:
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            rows.append([int(tok) for tok in line.replace(",", " ").split()])
        except ValueError:
            raise MatrixFormatError(f"line {lineno}: non-integer entry in {line!r}") from None
    if not rows:
        raise MatrixFormatError("no matrix rows found")
    if any(len(r) != len(rows) for r in rows):
        raise MatrixFormatError(f"matrix is not square ({len(rows)} rows)")
    return rows


def parse_inline(spec: str) -> list[list[int]]:
    """Rows separated by ``;``, e.g. ``"2 3; 1 2"``."""
    return parse_matrix("\n".join(spec.split(";")))


def format_inline(rows) -> str:
    return "; ".join(" ".join(str(int(x)) for x in row) for row in rows)


def read_matrix(path) -> list[list[int]]:
    return parse_matrix(Path(path).read_text())


def format_matrix(rows, comments: list[str] = ()) -> str:
    lines = [f"# {c}" for c in comments]
    width = max(len(str(int(x))) for row in rows for x in row)
    lines += [" ".join(str(int(x)).rjust(width) for x in row) for row in rows]
    return "\n".join(lines) + "\n"


def write_matrix(path, rows, comments: list[str] = ()):
    Path(path).write_text(format_matrix(rows, comments))
