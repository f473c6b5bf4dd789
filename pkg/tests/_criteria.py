"""Bookkeeping for the acceptance gate: one recorded PASS/FAIL line per criterion."""

import time
from contextlib import contextmanager
from dataclasses import dataclass


@dataclass
class Record:
    number: int
    description: str
    elapsed: float
    limit: float
    passed: bool


RESULTS: dict[int, Record] = {}


@contextmanager
def criterion(number: int, limit_s: float, description: str):
    """Record outcome and wall time; the runtime bound is part of the check."""
    start = time.perf_counter()
    ok = False
    try:
        yield
        ok = True
    finally:
        elapsed = time.perf_counter() - start
        RESULTS[number] = Record(number, description, elapsed, limit_s,
                                 ok and elapsed <= limit_s)
    assert elapsed <= limit_s, (
        f"criterion {number} exceeded its runtime bound: {elapsed:.2f}s > {limit_s:g}s")
