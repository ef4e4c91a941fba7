import random
from fractions import Fraction

import pytest
from hypothesis import strategies as st

TWO_QUBITS = """\
# two direct-coupled floating transmons, drive on island 1
node d 1 2 3 4
cap d 1 0.1        # C_d
cap 1 2 70         # C_q
cap 3 4 70
cap 1 gnd 50       # C_g1..C_g4
cap 2 gnd 50
cap 3 gnd 50
cap 4 gnd 50
cap 1 3 6          # C_c1
cap 2 4 2          # C_c2
jj 1 2 EJ=15
jj 3 4 EJ=15
drive xy d
"""


def rand_cap(rng: random.Random, lo: int = 1, hi: int = 200) -> Fraction:
    return Fraction(rng.randint(lo, hi * 8), rng.randint(1, 8))


@pytest.fixture
def rng():
    return random.Random(20240612)


positive_caps = st.fractions(min_value=Fraction(1, 10), max_value=200, max_denominator=50)


# acceptance criterion -> (passed, detail); filled by tests/test_acceptance.py
ACCEPTANCE: dict[str, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE, key=lambda k: int(k.split()[0])):
        ok, detail = ACCEPTANCE[name]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
