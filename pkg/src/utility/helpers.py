# This file is part of viewsync.
# Licensed under the GNU GPL v3 or later – see LICENSE.md for details.

import logging
import os
from fractions import Fraction

from src.core.errors import ConfigError
from src.core.types import to_time

logger = logging.getLogger('helpers')

_TRUE = {'1', 'true', 'yes', 'on'}
_FALSE = {'0', 'false', 'no', 'off'}


def env_int(name, default):
    """
    Reads an integer setting from the environment.

    Args:
        name (str): Environment variable name.
        default (int): Value used when the variable is unset or empty.

    Returns:
        int: The configured value.

    Raises:
        ConfigError: If the variable is set but not an integer.
    """
    raw = os.getenv(name) or str(default)
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{name} must be an integer, got '{raw}'")


def parse_time(text, field):
    """
    Parses a duration or time point written as an integer, a decimal or a
    fraction ("9/2").

    Raises:
        ConfigError: Naming the field when the text is not a number.
    """
    try:
        return to_time(text)
    except (TypeError, ValueError, ZeroDivisionError):
        raise ConfigError(f"{field} must be a number or fraction, got '{text}'")


def parse_int(text, field):
    """
    Parses an integer setting.

    Raises:
        ConfigError: When ``text`` is not an integer, naming ``field``.
    """
    try:
        return int(str(text).strip())
    except ValueError:
        raise ConfigError(f"{field} must be an integer, got '{text}'")


def parse_bool(text, field):
    """Parses a boolean setting from a bool or one of the accepted spellings."""
    if isinstance(text, bool):
        return text
    lowered = str(text).strip().lower()
    if lowered in _TRUE:
        return True
    if lowered in _FALSE:
        return False
    raise ConfigError(f"{field} must be true or false, got '{text}'")


def parse_values(text):
    """Splits a comma separated list, dropping blanks."""
    return [item.strip() for item in str(text).split(',') if item.strip()]


def format_time(value):
    """
    Renders an exact time for tables: integers stay integers, other values
    show as a fraction followed by a rounded decimal.
    """
    if value is None:
        return "none"
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value} (~{float(value):.3f})"


def format_table(header, rows):
    """
    Aligns rows of strings into a plain text table.

    Args:
        header (tuple): Column titles.
        rows (list): Sequences of cell strings, one per row.

    Returns:
        str: The header, a rule and the rows, left aligned.
    """
    widths = [len(title) for title in header]
    for row in rows:
        widths = [max(width, len(cell)) for width, cell in zip(widths, row)]
    lines = ["  ".join(cell.ljust(width) for cell, width in zip(header, widths)).rstrip()]
    lines.append("  ".join("-" * width for width in widths))
    lines.extend("  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip() for row in rows)
    return "\n".join(lines)
