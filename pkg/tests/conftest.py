import numpy as np
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from qbroadcast.qcore import DensityOp

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

seeds = st.integers(min_value=0, max_value=2**32 - 1)
unit = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


def ginibre_state(seed, wires=2, rank=None):
    """Random mixed state of the given rank from a seeded Ginibre draw."""
    rng = np.random.default_rng(seed)
    d = 2**wires
    r = rank or d
    g = rng.normal(size=(d, r)) + 1j * rng.normal(size=(d, r))
    m = g @ g.conj().T
    m = m / np.trace(m).real
    return DensityOp(0.5 * (m + m.conj().T))


def haar_unitary(seed, d=2):
    rng = np.random.default_rng(seed)
    z = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


@st.composite
def states(draw, wires=2):
    seed = draw(seeds)
    rank = draw(st.integers(min_value=1, max_value=2**wires))
    return ginibre_state(seed, wires, rank)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[0][1:])):
            terminalreporter.write_line(line)
