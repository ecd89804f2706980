"""CSV and configuration-file input/output.

File formats
------------
Subgroup data (monitor input, simulator output)::

    sample,obs_index,x,y

one row per observation, ``obs_index`` running ``1..n`` inside each sample
and ``n`` the same for all samples.

Phase I series (estimation input)::

    t,x,y

one row per time point in time order.

Any line starting with ``#`` is a comment.  Files written by this package
begin with ``# key=value`` lines echoing the full resolved configuration.
"""
from __future__ import annotations

import configparser
import csv
import io
import math
from pathlib import Path

import numpy as np

from .errors import ConfigError, DataError
from .estimation import PhaseISeries

SUBGROUP_HEADER = ["sample", "obs_index", "x", "y"]
SERIES_HEADER = ["t", "x", "y"]


def format_number(x) -> str:
    """At least 7 significant digits, and always enough to round-trip exactly."""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if not math.isfinite(x):
        return repr(x)
    s = f"{x:#.7g}"
    return s if float(s) == x else repr(x)


def _strip_comments(text: str) -> list[str]:
    return [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]


def read_csv_records(text: str) -> list[dict]:
    """Rows of a comment-tolerant CSV as dicts of strings."""
    return list(csv.DictReader(_strip_comments(text)))


def read_echo(text: str) -> dict:
    """Parse the ``# key=value`` header lines of a file written by this package."""
    out = {}
    for ln in text.splitlines():
        s = ln.strip()
        if s.startswith("#") and "=" in s:
            k, v = s[1:].split("=", 1)
            out[k.strip()] = v.strip()
    return out


def _parse_float(value: str, where: str) -> float:
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise DataError(f"{where}: {value!r} is not a number") from None
    if not math.isfinite(v):
        raise DataError(f"{where}: non-finite value {value!r}")
    return v


def _parse_int(value: str, where: str) -> int:
    try:
        return int(value)
    except (TypeError, ValueError):
        raise DataError(f"{where}: {value!r} is not an integer") from None


def parse_subgroups_csv(text: str):
    """Return ``(samples, data)`` with ``data`` of shape ``(m, n, 2)``.

    Raises ``DataError`` on a wrong header, non-numeric cells, gaps in
    ``obs_index`` or unequal subgroup sizes.
    """
    lines = _strip_comments(text)
    reader = csv.reader(lines)
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != SUBGROUP_HEADER:
        raise DataError(f"subgroup CSV header must be {','.join(SUBGROUP_HEADER)}, got {header}")
    groups: dict[int, list] = {}
    order: list[int] = []
    for lineno, row in enumerate(reader, start=2):
        if len(row) != 4:
            raise DataError(f"row {lineno}: expected 4 fields, got {len(row)}")
        s = _parse_int(row[0], f"row {lineno} sample")
        j = _parse_int(row[1], f"row {lineno} obs_index")
        x = _parse_float(row[2], f"row {lineno} x")
        y = _parse_float(row[3], f"row {lineno} y")
        if s not in groups:
            groups[s] = []
            order.append(s)
        elif order[-1] != s:
            raise DataError(f"row {lineno}: rows of sample {s} are not contiguous")
        if j != len(groups[s]) + 1:
            raise DataError(f"row {lineno}: sample {s} obs_index {j}, expected {len(groups[s]) + 1}")
        groups[s].append((x, y))
    if not order:
        raise DataError("subgroup CSV has no data rows")
    sizes = {len(g) for g in groups.values()}
    if len(sizes) != 1:
        raise DataError(f"subgroup sizes are not constant: {sorted(sizes)}")
    data = np.array([groups[s] for s in order], dtype=float)
    return order, data


def read_subgroups_csv(path):
    return parse_subgroups_csv(Path(path).read_text())


def read_series_csv(path) -> PhaseISeries:
    text = Path(path).read_text()
    lines = _strip_comments(text)
    reader = csv.reader(lines)
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != SERIES_HEADER:
        raise DataError(f"series CSV header must be {','.join(SERIES_HEADER)}, got {header}")
    obs = []
    for lineno, row in enumerate(reader, start=2):
        if len(row) != 3:
            raise DataError(f"row {lineno}: expected 3 fields, got {len(row)}")
        obs.append((_parse_float(row[1], f"row {lineno} x"), _parse_float(row[2], f"row {lineno} y")))
    return PhaseISeries(np.array(obs).reshape(-1, 2))


def echo_lines(config: dict) -> list[str]:
    return [f"# {k}={_echo_value(v)}" for k, v in config.items()]


def _echo_value(v) -> str:
    if isinstance(v, (list, tuple, np.ndarray)):
        return " ".join(_echo_value(e) for e in np.ravel(v))
    if v is None:
        return "none"
    if isinstance(v, str):
        return v
    return format_number(v)


def render_table(columns, rows, config: dict | None = None) -> str:
    buf = io.StringIO()
    for ln in echo_lines(config or {}):
        buf.write(ln + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([v if isinstance(v, str) else format_number(v) for v in r])
    return buf.getvalue()


def write_table(path, columns, rows, config: dict | None = None) -> None:
    Path(path).write_text(render_table(columns, rows, config))


def render_subgroups(samples, data, config: dict | None = None) -> str:
    data = np.asarray(data, dtype=float)
    rows = [(int(s), j + 1, g[j, 0], g[j, 1]) for s, g in zip(samples, data) for j in range(g.shape[0])]
    return render_table(SUBGROUP_HEADER, rows, config)


def write_subgroups_csv(path, samples, data, config: dict | None = None) -> None:
    Path(path).write_text(render_subgroups(samples, data, config))


def load_config(path, section: str) -> dict:
    """Key/value pairs for one command from an INI file.

    Values from ``[defaults]`` apply to every command and are overridden by
    the command's own section.  Keys use the long flag names with dashes or
    underscores (``arl0``, ``gamma-x``, ...).
    """
    parser = configparser.ConfigParser(default_section="defaults", interpolation=None)
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    except configparser.Error as exc:
        raise ConfigError(f"malformed config file {path}: {exc}") from None
    if parser.has_section(section):
        items = parser.items(section)
    else:
        items = parser.items(parser.default_section)
    return {k.replace("-", "_"): v for k, v in items}
