import os


def worker_count(default: int = 1) -> int:
    """Worker threads allowed by ``RSL_THREADS`` (defaults to single-threaded)."""
    raw = os.environ.get("RSL_THREADS")
    if not raw:
        return default
    try:
        return max(1, int(raw))
    except ValueError:
        return default
