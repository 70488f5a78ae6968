"""
Read-shared memo table for expensive pure computations.
Root systems, structure constants and formal characters are built once per
key and then shared between concurrent verification tasks.
"""

import hashlib
import json
import threading
import time
from dataclasses import dataclass
from typing import Any, Callable, Optional, TypeVar

from .config import get_config
from .logging_config import get_logger

# Get logger for cache module
_logger = get_logger(__name__)

T = TypeVar("T")


@dataclass
class CacheEntry:
    """A memoized value."""

    key: str
    value: Any
    created_at: float
    hit_count: int = 0

    def increment_hits(self) -> None:
        """Increment hit counter."""
        self.hit_count += 1

    def to_dict(self) -> dict:
        """Describe the entry without its (possibly large) value."""
        return {
            "key": self.key,
            "created_at": self.created_at,
            "hit_count": self.hit_count,
        }


class MemoCache:
    """
    In-memory memo table for immutable results.

    Features:
    - Deterministic hashed keys
    - Eviction of the oldest entry when max size is reached
    - Hit/miss statistics
    - Lock around mutation so worker threads can share it
    """

    def __init__(self, max_size: int = 256, enabled: bool = True):
        """
        Initialize the cache.

        Args:
            max_size: Maximum number of entries to store
            enabled: When False every lookup misses and nothing is stored
        """
        self.max_size = max_size
        self.enabled = enabled
        self._cache: dict[str, CacheEntry] = {}
        self._hits = 0
        self._misses = 0
        self._lock = threading.RLock()

    def _make_key(self, prefix: str, data: dict) -> str:
        """
        Create a cache key from prefix and data.

        Args:
            prefix: Key prefix (e.g., 'rootsys', 'character')
            data: JSON-serializable data to hash

        Returns:
            str: Cache key
        """
        serialized = json.dumps(data, sort_keys=True)
        hash_hex = hashlib.sha256(serialized.encode()).hexdigest()[:16]
        return f"{prefix}:{hash_hex}"

    def get(self, key: str) -> Optional[Any]:
        """
        Get value from cache.

        Args:
            key: Cache key

        Returns:
            Cached value or None if not found
        """
        with self._lock:
            entry = self._cache.get(key) if self.enabled else None

            if entry is None:
                self._misses += 1
                _logger.log_cache_event("miss", key)
                return None

            entry.increment_hits()
            self._hits += 1
            _logger.log_cache_event("hit", key, hit_count=entry.hit_count)
            return entry.value

    def set(self, key: str, value: Any) -> None:
        """
        Set value in cache.

        Args:
            key: Cache key
            value: Value to cache
        """
        if not self.enabled:
            return

        with self._lock:
            evicted = False
            if key not in self._cache and len(self._cache) >= self.max_size:
                self._evict_oldest()
                evicted = True

            self._cache[key] = CacheEntry(key=key, value=value, created_at=time.time())

            _logger.log_cache_event(
                "set",
                key,
                cache_size=len(self._cache),
                evicted=evicted,
            )

    def get_or_compute(self, prefix: str, data: dict, compute: Callable[[], T]) -> T:
        """
        Return the memoized value for (prefix, data), computing it on a miss.

        Two threads missing at once may both compute; the values are equal
        because every memoized computation is pure.

        Args:
            prefix: Key prefix
            data: Key data
            compute: Zero-argument producer

        Returns:
            The cached or freshly computed value
        """
        key = self._make_key(prefix, data)
        value = self.get(key)
        if value is None:
            value = compute()
            self.set(key, value)
        return value

    def _evict_oldest(self) -> None:
        """Evict the oldest (least recently created) entry."""
        if not self._cache:
            return

        oldest_key = min(self._cache.keys(), key=lambda k: self._cache[k].created_at)
        del self._cache[oldest_key]
        _logger.log_cache_event("evict", oldest_key)

    def clear(self) -> None:
        """Clear all cache entries."""
        with self._lock:
            self._cache.clear()
            self._hits = 0
            self._misses = 0

    def get_stats(self) -> dict:
        """Get cache statistics."""
        total_requests = self._hits + self._misses
        hit_rate = self._hits / total_requests if total_requests > 0 else 0

        return {
            "size": len(self._cache),
            "max_size": self.max_size,
            "hits": self._hits,
            "misses": self._misses,
            "hit_rate": hit_rate,
            "total_requests": total_requests,
        }


# Global cache instance
_global_cache: Optional[MemoCache] = None
_global_lock = threading.Lock()


def get_global_cache() -> MemoCache:
    """
    Get or create the global memo table, sized from the configuration.

    Returns:
        MemoCache: Global cache instance
    """
    global _global_cache

    with _global_lock:
        if _global_cache is None:
            config = get_config()
            _global_cache = MemoCache(
                max_size=config.cache_max_size,
                enabled=config.enable_cache,
            )

    return _global_cache


def clear_global_cache() -> None:
    """Clear the global cache."""
    global _global_cache
    with _global_lock:
        if _global_cache:
            _global_cache.clear()
        _global_cache = None
