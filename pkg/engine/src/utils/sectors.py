"""
Helpers for hierarchical industry codes of the form ``G46.7.1``.

The first character is the section letter, the rest the division/group/class
levels separated by dots. ``Z`` marks an unknown sector.
"""

from typing import Iterable, List, Sequence

import numpy as np
import pandas as pd

UNKNOWN_SECTOR = "Z"


def normalize_sector(code: object) -> str:
    """Return a trimmed sector code, mapping blanks and NaN to ``Z``."""
    if code is None or (isinstance(code, float) and np.isnan(code)):
        return UNKNOWN_SECTOR
    text = str(code).strip()
    return text if text else UNKNOWN_SECTOR


def section_of(code: str) -> str:
    """Section letter (1-character prefix) of a sector code."""
    return code[0] if code else UNKNOWN_SECTOR


def sector_hierarchy(code: str) -> List[str]:
    """
    All prefixes of ``code`` from the most to the least specific.

    ``"G46.7.1"`` -> ``["G46.7.1", "G46.7", "G46", "G"]``
    """
    parts = code.split(".")
    levels = [".".join(parts[:k]) for k in range(len(parts), 0, -1)]
    if len(parts[0]) > 1:
        levels.append(parts[0][0])
    return levels


def prefix_mask(sectors: Sequence[str], prefixes: Iterable[str]) -> np.ndarray:
    """Boolean mask of sectors that start with any of ``prefixes``."""
    prefix_tuple = tuple(prefixes)
    if not prefix_tuple:
        return np.zeros(len(sectors), dtype=bool)
    return pd.Series(sectors, dtype="object").str.startswith(prefix_tuple).to_numpy(
        dtype=bool
    )


def sections(sectors: Sequence[str]) -> np.ndarray:
    """Vector of section letters for a vector of sector codes."""
    return pd.Series(sectors, dtype="object").str[0].fillna(UNKNOWN_SECTOR).to_numpy()


__all__ = [
    "UNKNOWN_SECTOR",
    "normalize_sector",
    "section_of",
    "sector_hierarchy",
    "prefix_mask",
    "sections",
]
