"""Collects one pass/fail line per acceptance criterion."""

RESULTS: dict[int, tuple[bool, str]] = {}


def record(number: int, passed: bool, detail: str) -> None:
    RESULTS[number] = (passed, detail)
    print(format_line(number))


def format_line(number: int) -> str:
    passed, detail = RESULTS[number]
    return f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}"


def summary_lines() -> list[str]:
    return [format_line(n) for n in sorted(RESULTS)]
