"""
Utility functions and formatters for the epiwit engine.
"""

import json
from collections.abc import Sequence
from pathlib import Path
from typing import Any


def format_duration(seconds: float) -> str:
    """
    Format duration in seconds to human-readable string.

    Args:
        seconds: Duration in seconds

    Returns:
        str: Formatted duration (e.g., "1m 23s", "45.0s", "120ms")
    """
    if seconds < 1:
        return f"{seconds * 1000:.0f}ms"

    if seconds < 60:
        return f"{seconds:.1f}s"

    minutes = int(seconds // 60)
    remaining_seconds = seconds % 60

    if minutes < 60:
        return f"{minutes}m {remaining_seconds:.0f}s"

    hours = minutes // 60
    minutes = minutes % 60
    return f"{hours}h {minutes}m"


def format_partition(parts: Sequence[int]) -> str:
    """
    Render a partition as a sum of Jordan blocks.

    Args:
        parts: Block sizes in any order

    Returns:
        str: e.g. "J2^2+J1^4" for (2, 2, 1, 1, 1, 1)
    """
    if not parts:
        return "0"
    counts: dict[int, int] = {}
    for size in parts:
        counts[size] = counts.get(size, 0) + 1
    terms = []
    for size in sorted(counts, reverse=True):
        k = counts[size]
        terms.append(f"J{size}" if k == 1 else f"J{size}^{k}")
    return "+".join(terms)


def format_list(items: list[str], max_items: int = 5, prefix: str = "- ") -> str:
    """
    Format list of items as bullet points.

    Args:
        items: List of items
        max_items: Maximum items to show
        prefix: Bullet prefix

    Returns:
        str: Formatted list
    """
    if not items:
        return ""

    shown = items[:max_items]
    lines = [f"{prefix}{item}" for item in shown]

    if len(items) > max_items:
        lines.append(f"{prefix}... and {len(items) - max_items} more")

    return "\n".join(lines)


def canonical_json(data: Any) -> str:
    """
    Render data as canonical JSON: sorted keys, two-space indent, LF endings.

    Args:
        data: JSON-compatible data

    Returns:
        str: The rendering, with a trailing newline
    """
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_canonical_json(data: Any, file_path: Path) -> None:
    """
    Write canonical JSON to a file, creating parent directories.

    Args:
        data: JSON-compatible data
        file_path: Destination
    """
    file_path = Path(file_path)
    file_path.parent.mkdir(parents=True, exist_ok=True)
    with open(file_path, "w", encoding="utf-8", newline="\n") as f:
        f.write(canonical_json(data))


def load_json(file_path: Path) -> Any:
    """
    Load JSON from file.

    Args:
        file_path: Path to JSON file

    Returns:
        Loaded JSON data

    Raises:
        FileNotFoundError: If file doesn't exist
        json.JSONDecodeError: If JSON is invalid
    """
    with open(file_path, "r", encoding="utf-8") as f:
        return json.load(f)
