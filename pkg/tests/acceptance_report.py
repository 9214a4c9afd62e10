"""Shared recorder for the acceptance suite's one-line verdicts.

Each criterion calls ``record`` exactly once. The line is printed immediately
(visible with ``pytest -s``) and stashed so conftest can repeat all lines in
the terminal summary, which pytest never captures.
"""

LINES = []


def record(number: int, name: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    line = f"[{status}] criterion {number:2d}: {name}"
    if detail:
        line += f" | {detail}"
    LINES.append(line)
    print(line, flush=True)
    assert ok, line
