from math import gcd

import pytest
from hypothesis import given, settings, strategies as st

from baerml.linalg import Mat, snf
from baerml.modules import FPModule, ModuleMap, direct_sum
from baerml.rings import INTEGERS, PolyGF
from baerml.towers import (
    TRUNCATED,
    Periodic,
    Tower,
    delta_matrix,
    hstack_rel,
    image_chain,
    lim_and_lim1,
    ml_check,
    family_uniformity_check,
    satisfies_sequence,
    lifting_harness,
    tower_power,
    tower_product,
    tower_sum,
)

from oracles import tower_l

Z = INTEGERS


def diag(orders):
    return FPModule(Z, len(orders), Mat.diag(Z, orders))


def scalar_tower(H, r):
    return Tower.periodic(H, ModuleMap.scalar(H, r))


def random_map(draw, src, dst):
    return [[(b // gcd(a, b)) * draw(st.integers(0, 3)) for a in src] for b in dst]


@st.composite
def finite_towers(draw, orders=(2, 3, 4, 6, 8), max_levels=3):
    d = draw(st.integers(1, max_levels))
    levels = [[draw(st.sampled_from(orders)) for _ in range(draw(st.integers(1, 2)))] for _ in range(d)]
    maps = [random_map(draw, levels[n + 1], levels[n]) for n in range(d - 1)]
    tail = random_map(draw, levels[-1], levels[-1])
    mods = [diag(o) for o in levels]
    T = Tower(
        mods,
        [ModuleMap(mods[n + 1], mods[n], Mat.from_rows(maps[n])) for n in range(d - 1)],
        Periodic(mods[-1], ModuleMap(mods[-1], mods[-1], Mat.from_rows(tail)), ModuleMap(mods[-1], mods[-1], Mat.from_rows(tail))),
    )
    return T, levels, maps, tail


@given(finite_towers())
def test_finite_towers_match_element_oracle(data):
    T, levels, maps, tail = data
    rep = ml_check(T, depth=6)
    assert rep.verdict == "Stationary"
    oracle = tower_l(levels, maps, tail)
    for m, v in oracle.items():
        assert rep.l_of(m) == v, (m, rep.l, oracle)


@given(finite_towers(orders=(2, 4)), finite_towers(orders=(2, 4)))
@settings(max_examples=40)
def test_sum_index_is_levelwise_max(a, b):
    T1, T2 = a[0], b[0]
    r1, r2, rs = ml_check(T1), ml_check(T2), ml_check(tower_sum([T1, T2]))
    for m in range(1, max(T1.d, T2.d) + 3):
        assert rs.l_of(m) == max(r1.l_of(m), r2.l_of(m))


def test_cyclic_two_power_towers_frozen():
    for k in range(1, 6):
        H = FPModule.cyclic(2**k)
        rep = ml_check(scalar_tower(H, 2))
        assert rep.stationary
        assert all(rep.l_of(m) == m + k for m in range(1, 6))


def test_multiplication_by_two_on_integers():
    T = scalar_tower(FPModule.free(1), 2)
    rep = ml_check(T, depth=10)
    assert rep.verdict == "NotML"
    assert rep.delta == 2
    steps = rep.witness.steps
    assert len(steps) == 10
    for s in steps:
        assert s.element == (1,) and s.image == (2**s.j,) and s.level == 1 + s.j
    chain = image_chain(T, 1, 3)
    assert [e.gens.col(0) for e in chain.entries] == [(1,), (2,), (4,), (8,)]


def test_unimodular_tail_is_stationary():
    H = FPModule.free(2)
    lam = ModuleMap(H, H, Mat.from_rows([[1, 1], [0, 1]]))
    rep = ml_check(Tower.periodic(H, lam))
    assert rep.stationary and rep.tail_offset == 1
    rep = ml_check(Tower.periodic(H, ModuleMap(H, H, Mat.from_rows([[1, 0], [0, 0]]))))
    assert rep.stationary


def test_mixed_free_and_torsion_tail():
    H = direct_sum(FPModule.cyclic(8), FPModule.free(1))
    lam = ModuleMap(H, H, Mat.from_rows([[2, 0], [0, 1]]))
    rep = ml_check(Tower.periodic(H, lam))
    assert rep.stationary and rep.tail_offset == 3
    lim = lim_and_lim1(Tower.periodic(H, lam))
    assert lim.exact and lim.lim.describe() == "Z" and lim.lim1.is_zero_module()


def test_polynomial_towers():
    F = PolyGF(2)
    x = F.parse("x")
    cube = FPModule.cyclic(F.parse("x^3"), F)
    rep = ml_check(Tower.periodic(cube, ModuleMap.scalar(cube, x)))
    assert rep.stationary and rep.tail_offset == 3
    free = FPModule.free(1, F)
    rep = ml_check(Tower.periodic(free, ModuleMap.scalar(free, x)))
    assert rep.verdict == "NotML" and F.format(rep.delta) == "x"


def test_truncated_towers_are_undecided():
    H = FPModule.cyclic(4)
    T = Tower((H, H, H), (ModuleMap.scalar(H, 2), ModuleMap.scalar(H, 2)), TRUNCATED)
    rep = ml_check(T)
    assert rep.verdict == "UndecidedAtDepth"
    # the chain at level 1 reaches zero after two steps, so l(1) = 3 is certain
    assert rep.l == {1: 3} and rep.certified == {1: True}
    assert satisfies_sequence(rep, [2]) is False
    assert satisfies_sequence(rep, [3]) is None


def test_uniformity_violator_frozen():
    fam = [scalar_tower(FPModule.cyclic(2**k), 2) for k in (1, 2, 3)]
    r = family_uniformity_check(fam, [3, 4, 5])
    assert r.violators == (2,)
    assert r.factors_ok == (True, True, False)
    assert r.sum_ok is False and r.product_ok is False
    assert r.minimal_uniform == {1: 4, 2: 5, 3: 6}
    assert r.equivalent
    assert family_uniformity_check(fam, [4, 5, 6]).sum_ok is True


def test_satisfies_sequence_validation():
    rep = ml_check(scalar_tower(FPModule.cyclic(2), 2))
    with pytest.raises(ValueError):
        satisfies_sequence(rep, [])
    with pytest.raises(ValueError):
        satisfies_sequence(rep, [1])


def test_product_and_power_shapes():
    T = scalar_tower(FPModule.cyclic(4), 2)
    P = tower_power(T, 3)
    assert P.module(1).describe() == "Z/4 ⊕ Z/4 ⊕ Z/4"
    assert tower_product([T, T]).module(5).describe() == tower_sum([T, T]).module(5).describe()


def test_delta_matrix_forms():
    T = scalar_tower(FPModule.free(1), 2)
    sq = delta_matrix(T, 4)
    assert sq.matrix.tolist() == [[1, -2, 0, 0], [0, 1, -2, 0], [0, 0, 1, -2], [0, 0, 0, 1]]
    rect = delta_matrix(T, 3, rectangular=True)
    assert rect.matrix.cols == 4 and rect.matrix.rows == 3
    # square truncations are unitriangular, so their cokernels vanish
    coker = snf(hstack_rel(sq.matrix, sq.target))
    assert coker.factors == () and coker.rank == 4


def test_lim_of_integer_towers():
    Zm = FPModule.free(1)
    rep = lim_and_lim1(scalar_tower(Zm, 2))
    assert not rep.exact and rep.lim.is_zero_module() and rep.lim1 is None
    assert rep.truncated["square_cokernel"] == "0"
    H = FPModule.free(2)
    rep = lim_and_lim1(Tower.periodic(H, ModuleMap(H, H, Mat.from_rows([[2, 0], [0, 1]]))))
    assert rep.lim.describe() == "Z"
    rep = lim_and_lim1(Tower.periodic(H, ModuleMap(H, H, Mat.from_rows([[1, 1], [1, 2]]))))
    assert rep.exact and rep.lim.describe() == "Z^2"
    rep = lim_and_lim1(Tower.constant(Zm))
    assert rep.exact and rep.lim.describe() == "Z"


def test_harness_on_finite_tower():
    H = FPModule.cyclic(4)
    h = lifting_harness(scalar_tower(H, 2), copies=3)
    assert h.verdict == "Stationary"
    assert h.targets_checked > 0 and h.targets_solved == h.targets_checked
    assert all(ok for _, ok in h.stable_lifts)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_harness_growth_profile(p):
    h = lifting_harness(scalar_tower(FPModule.free(1), p), copies=3, depth=10)
    sizes = [s for _, _, s in h.profile]
    assert len(sizes) == 10
    assert sizes == [(p ** (n + 1) - 1) // (p - 1) for n in range(10)]
    assert all(b >= p * a for a, b in zip(sizes, sizes[1:]))
