"""Round-trip-safe number formatting shared by the CSV and JSON writers."""

import math

SIG_DIGITS = 17


def fmt17(v) -> str:
    """Decimal text with 17 significant digits; empty for missing values."""
    if v is None:
        return ""
    v = float(v)
    if math.isnan(v):
        return ""
    return format(v, f".{SIG_DIGITS}g")
