"""Backend equivalence: the compiled kernels must be bit-identical twins of
the pure-Python ones."""

import importlib.util
import random

import pytest

from rankderiv import _kernels_py as pure

compiled_available = importlib.util.find_spec("rankderiv._kernels") is not None
if compiled_available:
    from rankderiv import _kernels as compiled

pytestmark = pytest.mark.skipif(
    not compiled_available, reason="compiled kernels not built")


def _random_matrix(rng, rows, cols, p):
    return [[rng.randrange(p) for _ in range(cols)] for _ in range(rows)]


@pytest.mark.parametrize("p", [2, 3, 7, 101])
def test_backends_agree(p):
    rng = random.Random(f"kernels|{p}")
    for _ in range(150):
        n = rng.randint(1, 6)
        a = _random_matrix(rng, n, n, p)
        b = _random_matrix(rng, n, n, p)
        assert compiled.mat_add(a, b, p) == pure.mat_add(a, b, p)
        assert compiled.mat_sub(a, b, p) == pure.mat_sub(a, b, p)
        assert compiled.mat_mul(a, b, p) == pure.mat_mul(a, b, p)
        assert compiled.mat_rank(a, p) == pure.mat_rank(a, p)
        assert compiled.mat_rref(a, p) == pure.mat_rref(a, p)
        assert compiled.mat_nullspace(a, p) == pure.mat_nullspace(a, p)
        assert compiled.mat_rnf(a, p) == pure.mat_rnf(a, p)


@pytest.mark.parametrize("p", [2, 5])
def test_backends_agree_rectangular(p):
    rng = random.Random(f"kernels-rect|{p}")
    for _ in range(100):
        rows = rng.randint(1, 5)
        cols = rng.randint(1, 5)
        a = _random_matrix(rng, rows, cols, p)
        b = _random_matrix(rng, cols, rows, p)
        assert compiled.mat_mul(a, b, p) == pure.mat_mul(a, b, p)
        assert compiled.mat_rank(a, p) == pure.mat_rank(a, p)
        assert compiled.mat_rref(a, p) == pure.mat_rref(a, p)
        assert compiled.mat_nullspace(a, p) == pure.mat_nullspace(a, p)


def test_rnf_postconditions_both_backends():
    rng = random.Random("kernels-rnf")
    for backend in (pure, compiled):
        for _ in range(60):
            n = rng.randint(1, 5)
            p = rng.choice([2, 3, 7])
            a = _random_matrix(rng, n, n, p)
            P, k, Q = backend.mat_rnf(a, p)
            assert k == backend.mat_rank(a, p)
            j = [[1 if (i == t and i < k) else 0 for t in range(n)] for i in range(n)]
            recomposed = backend.mat_mul(backend.mat_mul(P, j, p), Q, p)
            assert recomposed == [list(map(lambda v: v % p, row)) for row in a]
            assert backend.mat_rank(P, p) == n
            assert backend.mat_rank(Q, p) == n
