"""Numeric formatting shared by the CSV emitters."""

from __future__ import annotations


def fmt(x: float) -> str:
    """Plain decimal notation with 12 significant digits (never scientific)."""
    x = float(x)
    if x == 0.0:
        return "0.000000000000"
    mantissa, _, exponent = f"{x:.11e}".partition("e")
    neg = mantissa.startswith("-")
    digits = mantissa.replace("-", "").replace(".", "")  # 12 digits
    exp = int(exponent)
    if exp >= 11:
        body = digits + "0" * (exp - 11)
    elif exp >= 0:
        body = digits[: exp + 1] + "." + digits[exp + 1 :]
    else:
        body = "0." + "0" * (-exp - 1) + digits
    return "-" + body if neg else body
