import numpy as np
from hypothesis import strategies as st

from wpinv.testkit import complex_gaussian, make_rng

seeds = st.integers(min_value=0, max_value=2**32 - 1)
dims = st.integers(min_value=1, max_value=6)


def random_complex(n, seed, m=None):
    return complex_gaussian(make_rng(seed, 99), (n, n if m is None else m))


def penrose_four(M, B):
    MB, BM = M @ B, B @ M
    return (
        np.linalg.norm(MB @ M - M, 2),
        np.linalg.norm(BM @ B - B, 2),
        np.linalg.norm(MB.conj().T - MB, 2),
        np.linalg.norm(BM.conj().T - BM, 2),
    )


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[number])
