"""Quarterly date arithmetic on plain integer indices (year*4 + quarter - 1).

Integer indices make horizon windows and publication lags exact; labels use
the ``YYYY-Qn`` form everywhere in files and on the CLI.
"""

from __future__ import annotations

import re

_QUARTER_RE = re.compile(r"^(\d{4})-Q([1-4])$")


def quarter_index(label: str) -> int:
    """Parse ``YYYY-Qn`` into an absolute quarter index."""
    m = _QUARTER_RE.match(label.strip())
    if m is None:
        raise ValueError(f"bad quarter {label!r}, expected YYYY-Qn")
    year, q = int(m.group(1)), int(m.group(2))
    return year * 4 + (q - 1)


def quarter_label(index: int) -> str:
    if index < 0:
        raise ValueError("quarter index must be nonnegative")
    return f"{index // 4:04d}-Q{index % 4 + 1}"
