from __future__ import annotations

import re
from typing import Iterable

IDENTIFIER_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
IDENTIFIER_MAX_LENGTH = 64


def sanitize_identifier(
    value: str,
    *,
    pattern: re.Pattern[str] = IDENTIFIER_RE,
    max_length: int = IDENTIFIER_MAX_LENGTH,
    strip: bool = True,
) -> str:
    """Ensure identifiers use safe characters and length."""
    if strip:
        value = value.strip()
    if not value:
        raise ValueError("identifier cannot be empty")
    if len(value) > max_length:
        raise ValueError(f"identifier exceeds maximum length of {max_length}")
    if not pattern.fullmatch(value):
        raise ValueError(f"identifier '{value}' contains invalid characters")
    return value


def find_duplicates(values: Iterable[str]) -> list[str]:
    seen: set[str] = set()
    duplicates: list[str] = []
    for value in values:
        if value in seen and value not in duplicates:
            duplicates.append(value)
        seen.add(value)
    return sorted(duplicates)


__all__ = ["IDENTIFIER_RE", "find_duplicates", "sanitize_identifier"]
