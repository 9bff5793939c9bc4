import itertools
import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from nbcrit import linalg

small = st.integers(-6, 6)


def k_matrix(K, rows):
    return [[K(Fraction(x)) for x in row] for row in rows]


@given(st.lists(st.lists(small, min_size=3, max_size=3), min_size=3, max_size=3))
def test_det_matches_sympy(Q2, rows):
    got = linalg.det(k_matrix(Q2, rows), Q2.zero, Q2.one)
    want = sympy.Matrix(rows).det()
    assert got == Q2(Fraction(int(want)))


@given(st.lists(st.lists(small, min_size=3, max_size=3), min_size=3, max_size=3))
def test_charpoly_matches_sympy(Q2, rows):
    got = linalg.charpoly(k_matrix(Q2, rows), Q2.zero, Q2.one)
    lam = sympy.symbols("lam")
    want = sympy.Poly(sympy.Matrix(rows).charpoly(lam).as_expr(), lam).all_coeffs()[::-1]
    assert got == [Q2(Fraction(int(c))) for c in want]


@given(st.lists(st.lists(small, min_size=4, max_size=4), min_size=3, max_size=3))
def test_rank_and_kernel(Q2, rows):
    M = k_matrix(Q2, rows)
    assert linalg.rank(M) == sympy.Matrix(rows).rank()
    x = linalg.kernel_vector(M, Q2.one)
    assert x is not None  # 3 x 4 always has a kernel
    for row in M:
        acc = Q2.zero
        for a, b in zip(row, x):
            acc = acc + a * b
        assert acc.is_zero()


def test_inverse_round_trip(Q2):
    M = k_matrix(Q2, [[2, 1], [1, 1]])
    inv = linalg.inverse(M, Q2.zero, Q2.one)
    assert inv == k_matrix(Q2, [[1, -1], [-1, 2]])


def test_singular_inverse(Q2):
    with pytest.raises(ZeroDivisionError):
        linalg.inverse(k_matrix(Q2, [[1, 2], [2, 4]]), Q2.zero, Q2.one)


def test_det_of_singular(F2):
    t = F2.uniformizer
    M = [[t, 1 + t], [t * t, t * (1 + t)]]
    assert linalg.det(M, F2.zero, F2.one).is_zero()


@pytest.mark.parametrize(
    "rows,p,expected",
    [
        ([[1, 1], [2, 2]], 3, ((1, 1),)),
        ([[0, 1], [1, 0]], 2, ((1, 0), (0, 1))),
        ([[0, 0]], 5, ()),
        ([], 2, ()),
    ],
)
def test_fp_rref_examples(rows, p, expected):
    assert linalg.fp_rref(rows, p) == expected


@given(
    p=st.sampled_from([2, 3, 5]),
    rows=st.lists(st.lists(st.integers(0, 4), min_size=3, max_size=3), max_size=3),
)
def test_annihilator_is_orthogonal_complement(p, rows):
    ann = linalg.fp_annihilator(rows, 3, p)
    basis = linalg.fp_rref(rows, p)
    assert len(ann) + len(basis) == 3
    for a in ann:
        for c in rows:
            assert sum(x * y for x, y in zip(a, c)) % p == 0


def test_annihilator_brute_force():
    rng = random.Random(4)
    p, n = 3, 3
    for _ in range(20):
        rows = [[rng.randrange(p) for _ in range(n)] for _ in range(rng.randrange(3))]
        span = {
            tuple(sum(c * a for c, a in zip(coef, col)) % p for col in zip(*rows)) if rows else (0,) * n
            for coef in itertools.product(range(p), repeat=len(rows))
        }
        ann = {
            a for a in itertools.product(range(p), repeat=n)
            if all(sum(x * y for x, y in zip(a, s)) % p == 0 for s in span)
        }
        got = linalg.fp_annihilator(rows, n, p)
        assert p ** len(got) == len(ann)
        assert all(tuple(a) in ann for a in got)
