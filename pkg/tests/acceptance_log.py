"""Collects one result line per acceptance criterion for the terminal summary."""
import time
from contextlib import contextmanager

LINES: list[str] = []


@contextmanager
def criterion(number: int, title: str, budget: float | None = None):
    """Time the block and record PASS/FAIL; over-budget runs fail too."""
    t0 = time.perf_counter()
    ok = False
    try:
        yield
        ok = True
    finally:
        dt = time.perf_counter() - t0
        over = budget is not None and dt >= budget
        status = "PASS" if ok and not over else "FAIL"
        note = f" (budget {budget:g} s exceeded)" if ok and over else ""
        line = f"AC{number:<2} {status}  {title} [{dt:.2f} s]{note}"
        LINES.append(line)
        print(line)
    assert not over, line
