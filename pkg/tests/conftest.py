import os
import sys
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from twostep.algebra import LieAlgebra
from twostep.catalog import default_catalog

settings.register_profile(
    "repo",
    deadline=None,
    max_examples=40,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "repo"))

small_ints = st.integers(min_value=-3, max_value=3)
small_fracs = st.builds(Fraction, st.integers(-6, 6), st.integers(1, 4))


@st.composite
def two_step_algebras(draw, max_dim=6):
    """Random algebras whose brackets land in the last ``c`` basis vectors."""
    n = draw(st.integers(3, max_dim))
    c = draw(st.integers(1, n - 2))
    gens = n - c
    brackets = {}
    for i in range(1, gens + 1):
        for j in range(i + 1, gens + 1):
            vec = {k: draw(small_ints) for k in range(gens + 1, n + 1)}
            vec = {k: v for k, v in vec.items() if v}
            if vec and draw(st.booleans()):
                brackets[(i, j)] = vec
    return LieAlgebra(n, brackets)


@st.composite
def invertible_matrices(draw, n, entries=small_ints):
    """P L U with unit-lower L and nonzero-diagonal upper U."""
    from twostep import linalg

    perm = draw(st.permutations(range(n)))
    diag = st.sampled_from([1, -1, 2, Fraction(1, 2), -3])
    lower = [[Fraction(1 if i == j else (draw(entries) if j < i else 0)) for j in range(n)] for i in range(n)]
    upper = [[Fraction(draw(diag) if i == j else (draw(entries) if j > i else 0)) for j in range(n)] for i in range(n)]
    p = [[Fraction(int(perm[i] == j)) for j in range(n)] for i in range(n)]
    return linalg.matmul(p, linalg.matmul(lower, upper))


@pytest.fixture(scope="session")
def catalog():
    return default_catalog()


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
