from fractions import Fraction as F

import pytest

from pwaffine.contraction import build_map
from pwaffine.exactnum import champernowne_stream, offset_add


def champernowne_digits_oracle(base, n):
    """Independent digit source: join numerals produced by repeated division."""
    out = []
    k = 1
    while len(out) < n:
        m, num = k, []
        while m:
            m, r = divmod(m, base)
            num.append(r)
        out.extend(reversed(num))
        k += 1
    return out[:n]


def champ_breakpoints():
    c = champernowne_stream(4)
    return offset_add(c, F(-1, 4)), c, offset_add(c, F(1, 2))


@pytest.fixture
def f111():
    return build_map(2, -1, (0, F(1, 6), F(1, 2), F(5, 6), 1), (1, 2, 1, 2))


@pytest.fixture
def plus_half():
    return build_map(2, 1, (0, F(1, 2), 1), (1, 2))


@pytest.fixture
def champ_map():
    return build_map(2, -1, (0, *champ_breakpoints(), 1), (1, 2, 1, 2))


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        ok, detail = results[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
