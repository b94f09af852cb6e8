from fractions import Fraction

import pytest

from cpslice.builtins import builtin, builtin_list, random_mackey
from cpslice.qz import stable_is_zero, stable_piece, truncated
from cpslice.spheres import VirtualRep, parse_rep
from cpslice.tower import (
    collapses,
    coslice_tower,
    is_single_slice,
    negative_ladder,
    positive_ladder,
    slice_parameters,
    slice_predicates,
    slice_tower,
    tower_consistency_check,
)


def rep(p, m, n=0):
    return VirtualRep.simple(p, m, n)


def stable_zero(p, star):
    return lambda key: stable_is_zero(p, key, star=star)


@pytest.mark.parametrize("p,m,n,expected", [
    (2, 6, 0, (6, 3)),
    (3, 2, 0, (4, 2)),
    (3, 2, 2, (0, 0)),
    (5, 1, 2, (0, 0)),
    (2, 1, Fraction(1, 2), (0, 0)),
    (2, 0, Fraction(3, 2), (-3, -2)),
    (3, -4, 1, (-10, -4)),
    (5, 3, -1, (14, 3)),
])
def test_slice_parameters(p, m, n, expected):
    assert slice_parameters(rep(p, m, n)) == expected


def test_suspension_of_integers_is_a_six_slice():
    Z = builtin("Z", 2)
    assert 6 in positive_ladder(Z)
    V = rep(2, 6)
    assert slice_parameters(V) == (6, 3)
    assert is_single_slice(V, Z).single
    T = slice_tower(V, Z)
    assert all(s.coefficient.is_zero() for s in T.hats)


@pytest.mark.parametrize("N", [5, 6, 7])
def test_desuspension_of_dual_rationals_is_a_minus_six_slice(N):
    M = truncated(2, N, star=True)
    zero = lambda key: stable_is_zero(2, key, star=True, N=N)
    assert -6 in negative_ladder(M, zero)
    cert = is_single_slice(rep(2, -6), M, zero)
    assert cert.single, cert.reason


def test_truncation_alone_is_not_stable():
    # each truncation has a nonzero coker(N); only the colimit kills it
    M = truncated(2, 6)
    assert not slice_predicates(M)["coker_N_zero"]
    assert slice_predicates(M, stable_zero(2, False))["coker_N_zero"]


@pytest.mark.parametrize("N", [4, 6])
def test_stable_values_do_not_depend_on_truncation(N):
    for p in (2, 3):
        for key in ("ker_N_hat", "coker_N_hat", "ker_R_hat", "coker_tr_hat", "im_N"):
            for star in (False, True):
                assert stable_piece(p, key, star, N) == stable_piece(p, key, star, N + 1)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_integer_towers_collapse_exactly_for_small_k(p):
    Z = builtin("Z", p)
    seen = set()
    for m in range(-8, 9):
        for n in range(-4, 5):
            V = rep(p, m, n)
            _, k = slice_parameters(V)
            assert collapses(V, Z) == (0 <= k <= 3), (m, n, k)
            seen.add(k)
    assert {0, 1, 2, 3, 4, -1} <= seen


def test_integer_tower_for_large_k():
    # past k = 3 the fibers are suspended copies of hat(Z/p) in odd steps
    p = 3
    V = rep(p, 6, 1)
    r, k = slice_parameters(V)
    assert k >= 4
    T = slice_tower(V, builtin("Z", p))
    live = [(s.d, s.key) for s in T.hats if not s.coefficient.is_zero()]
    assert live == [(6 - j, "coker_N_hat") for j in range(3, k, 2)]


@pytest.mark.parametrize("p", [2, 3])
def test_dual_rationals_collapse_exactly_for_small_negative_k(p):
    M = builtin("Q/Zstar", p)
    zero = stable_zero(p, True)
    for m in range(-8, 9):
        for n in range(-4, 5):
            V = rep(p, m, n)
            _, k = slice_parameters(V)
            assert collapses(V, M, zero) == (-3 <= k <= 0), (m, n, k)


@pytest.mark.parametrize("p", [2, 3, 5])
@pytest.mark.parametrize("m", range(-4, 5))
def test_hat_functors_are_single_slices(p, m):
    for name in ("hat(Z/p)", "hat(Z)"):
        V = rep(p, m)
        T = slice_tower(V, builtin(name, p))
        live = [s for s in T.slices if not s.coefficient.is_zero()]
        assert len(live) == 1 and live[0].t == p * m
        assert is_single_slice(V, builtin(name, p)).single


@pytest.mark.parametrize("p", [2, 3, 5])
def test_tower_shape_and_consistency(p):
    coeffs = builtin_list(p, truncation=3) + [random_mackey(p, s) for s in range(5)]
    ns = [Fraction(k, 2) for k in range(-8, 9)] if p == 2 else range(-4, 5)
    for M in coeffs:
        for m in range(-4, 5):
            for n in ns:
                V = rep(p, m, n)
                r, k = slice_parameters(V)
                T = slice_tower(V, M)
                assert tower_consistency_check(T).ok, (M.name, m, n)
                assert len(T.hats) == abs(k)
                assert T.terminal.t == V.dim
                if r > 0:
                    assert (T.lo, T.hi) == (V.dim, p * m)
                elif r < 0:
                    assert (T.lo, T.hi) == (p * m, V.dim)


def test_first_fibers_and_cofibers():
    M = builtin("generic", 3)
    T = slice_tower(rep(3, 4), M)
    assert [s.key for s in T.hats][:3] == ["ker_R_hat", "coker_R_hat", "ker_N_hat"]
    T = slice_tower(rep(3, -4), M)
    assert [s.key for s in T.hats][:3] == ["coker_tr_hat", "ker_tr_hat", "coker_N_hat"]
    T = slice_tower(rep(3, 1), M)
    assert [s.key for s in T.slices] == ["ker_R_hat", "im_R"]


def test_terminal_form_can_be_rewritten():
    M = builtin("generic", 3)
    V = rep(3, 2)
    F = slice_tower(V, M)
    O = slice_tower(V, M, form="O")
    assert F.terminal.key == "F" and O.terminal.key == "O"
    # Sigma^lambda HO = Sigma^2 HF
    assert O.terminal.d == F.terminal.d - 2 and O.terminal.lam == F.terminal.lam + 1
    assert tower_consistency_check(O).ok
    W = rep(3, -3)
    back = slice_tower(W, M, form="F")
    assert slice_tower(W, M).terminal.key == "O" and back.terminal.key == "F"
    assert back.terminal.d == slice_tower(W, M).terminal.d + 2
    assert tower_consistency_check(back).ok


def test_coslice_tower_reverses_the_slices():
    M = builtin("generic", 3)
    V = rep(3, 4)
    S, C = slice_tower(V, M), coslice_tower(V, M)
    assert [s.t for s in C.slices] == sorted(s.t for s in S.slices)
    assert tower_consistency_check(C).ok
    W = rep(3, -4)
    assert coslice_tower(W, M).slices == slice_tower(W, M).slices


def test_r_zero_is_a_single_slice():
    for p, text in [(3, "2+λ^2"), (2, "1+σ"), (5, "0")]:
        V = parse_rep(text, p)
        T = slice_tower(V, random_mackey(p, 1))
        assert T.direction == "single" and len(T.slices) == 1
        assert is_single_slice(V, random_mackey(p, 1)).reason == "r = 0"


@pytest.mark.parametrize("p", [2, 3, 5])
def test_slice_criteria_are_sound(p):
    for s in range(20):
        M = random_mackey(p, s)
        for m in range(-3, 4):
            for n in range(-2, 3):
                cert = is_single_slice(rep(p, m, n), M)
                if cert.reason.startswith("r in [0,p]"):
                    assert M.res.is_injective()
                if cert.reason.startswith("r in [-p,0]"):
                    assert M.tr.is_surjective()


def test_twisted_tower_uses_untwisted_coefficient():
    p = 5
    M = random_mackey(p, 2)
    V = parse_rep("3+λ(2)", p)
    T = slice_tower(V, M)
    assert T.V == V
    assert slice_parameters(V) == (10, 2)
    assert T.coefficient.levels() == M.levels()
