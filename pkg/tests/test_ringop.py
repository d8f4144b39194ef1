import random

import pytest

from tfmodlab.exactfield import Poly
from tfmodlab.pairs import direct_sum, free_pair, is_isomorphic, psi_pair
from tfmodlab.ringop import (M0, FamilyRecord, GenusDescriptor, GenusMismatch, IdealOfR, LocalClass, LocalFree,
                             MaximalIdealDesc, ModuleDescriptor, NotFullRank, NotLocalSubmodule, RankMismatch, RingError,
                             RingR, SupportMismatch, UnitIdeal, UnrepresentableDescriptor, ZeroElement, ZeroIdeal,
                             comaximal_factorization, coprime_obstruction, crt_idempotents, factor_element,
                             genus_of, genus_realizable, glue_submodule, in_R, iso_from_genus, local_pair_submodule,
                             local_power_submodule, localize_check, match_decompositions, min_generators,
                             realizability_conditions, same_genus, support, validate_trace_chain, verify_glue)


@pytest.fixture(scope="module")
def P1(T):
    return MaximalIdealDesc.poly(Poly([1, 1], T), T)


def rand_R(T, rng, deg=3):
    """Random element of R: rational constant term, L coefficients above."""
    cs = [T(rng.randint(-3, 3))] + [T([rng.randint(-2, 2) for _ in range(2)]) for _ in range(deg)]
    return Poly(cs, T)


def test_membership_in_R(T, th, X):
    assert in_R(1 + th * X)
    assert not in_R(Poly.const(th, T))
    R = RingR(T)
    assert R.conductor == IdealOfR.maximal(M0, T)
    with pytest.raises(RingError):
        R.element(th)


def test_maximal_ideal_descriptors(T, X):
    assert MaximalIdealDesc.poly(2 + 2 * X, T).q == 1 + X
    with pytest.raises(ValueError):
        MaximalIdealDesc.poly((1 + X) ** 2, T)
    with pytest.raises(ValueError):
        MaximalIdealDesc.poly(X, T)
    d = MaximalIdealDesc.poly(1 + X * X, T)
    assert MaximalIdealDesc.from_json(d.to_json(), T) == d


def test_conductor_membership(T, th, X):
    m = IdealOfR.maximal(M0, T)
    assert th * X in m and X ** 5 * th ** 3 in m
    assert 1 not in m and 1 + X not in m


def test_ideal_from_generators(T, th, X):
    I = IdealOfR.from_generators([X, th * X, th * th * X], T)
    assert I.e == 1 and I.coeff_dim == 3
    assert th * th * X + X in I and th ** 3 * X not in I
    assert X * X * th ** 3 in I
    assert IdealOfR.from_generators([X * X, X], T) == IdealOfR.principal(X, T)
    assert IdealOfR.zero(T).is_zero and 0 in IdealOfR.zero(T)


def test_ideal_arithmetic(T, th, X):
    m = IdealOfR.maximal(M0, T)
    P = IdealOfR.principal(1 + X, T)
    assert (m * P).generator == X * (1 + X)
    assert m * m == IdealOfR.principal(X * X, T) * IdealOfR.maximal(M0, T) or (m * m).e == 2
    assert (m + P).is_unit
    assert m * m <= m and not m <= m * m
    assert P ** 3 == IdealOfR.principal((1 + X) ** 3, T)
    assert IdealOfR.from_json(m.to_json(), T) == m


def test_ideal_products_contain_element_products(T):
    rng = random.Random(7)
    for _ in range(20):
        a, b = rand_R(T, rng), rand_R(T, rng)
        if not (a and b):
            continue
        A, B = IdealOfR.principal(a, T), IdealOfR.principal(b, T)
        assert a * b in A * B
        assert a in A + B and b in A + B


def test_factor_element_example(T, th, X):
    fe = factor_element(X * X * th, T)
    assert (fe.unit, fe.e, fe.factors) == (th, 2, ())
    with pytest.raises(ZeroElement):
        factor_element(0, T)
    with pytest.raises(RingError):
        factor_element(th, T)


def test_factor_round_trips(T):
    rng = random.Random(3)
    for _ in range(15):
        r = rand_R(T, rng)
        if not r:
            continue
        fe = factor_element(r, T)
        assert fe.expand() == r
        for q, _ in fe.factors:
            assert q[0] == 1


def test_support_and_comaximal_factorization(T, X, P1):
    I = IdealOfR.principal(X * (1 + X) ** 2, T)
    assert support(I) == [M0, P1]
    parts = comaximal_factorization(I)
    assert [p.generator for p in parts] == [X, (1 + X) ** 2]
    with pytest.raises(ZeroIdeal):
        support(IdealOfR.zero(T))
    with pytest.raises(UnitIdeal):
        comaximal_factorization(IdealOfR.unit(T))


def test_min_generators(T, th, X, P1):
    m = IdealOfR.maximal(M0, T)
    assert min_generators(m, M0) == 7
    I = IdealOfR.from_generators([X, th * X, th * th * X], T)
    assert min_generators(I, M0) == 3
    assert min_generators(IdealOfR.principal(1 + X, T), P1) == 1


def test_crt_example(T, X, P1):
    c = crt_idempotents([P1], IdealOfR.principal(X * (1 + X), T))
    assert c.b_targets == [-X]
    assert c.b == 1 + X
    c0 = crt_idempotents([M0], IdealOfR.principal(X * (1 + X), T))
    assert c0.b_targets == [1 + X]


def test_crt_congruences_with_nontrivial_coefficients(T, th, X, P1):
    I = IdealOfR(2, (1 + X) ** 2, [T.one(), th], [], T)
    c = crt_idempotents([M0, P1], I)
    comps = comaximal_factorization(I)
    for target, b in zip([M0, P1], c.b_targets):
        assert in_R(b)
        for s, comp in zip(support(I), comps):
            assert comp.contains(b - (1 if s == target else 0))
    with pytest.raises(SupportMismatch):
        crt_idempotents([MaximalIdealDesc.poly(1 + 2 * X, T)], I)


def test_trace_chains(T, X):
    R1 = IdealOfR.unit(T)
    m = IdealOfR.maximal(M0, T)
    assert validate_trace_chain([R1, R1, R1]).valid
    assert validate_trace_chain([m, R1]).valid
    rep = validate_trace_chain([IdealOfR.principal(X, T), IdealOfR.principal(X, T)])
    assert not rep.valid and rep.first_violation == 1
    assert rep.product == IdealOfR.principal(X * X, T)
    assert validate_trace_chain([R1, m]).first_violation == 1


def test_coprime_obstruction():
    assert coprime_obstruction(4, 6).closure_fails and coprime_obstruction(2, 2).closure_fails
    assert not coprime_obstruction(1, 9).closure_fails and not coprime_obstruction(2, 3).closure_fails
    with pytest.raises(ValueError):
        coprime_obstruction(0, 3)


def test_module_descriptors(T, th, X):
    M = ModuleDescriptor.free(2, T)
    assert M.contains([1 + X, th * X]) and not M.contains([th, 0])
    N = ModuleDescriptor.from_pair(psi_pair(2, 0, tower=T))
    assert M <= N and not N <= M
    assert local_pair_submodule(M, N.pair) <= M
    assert M.localize(M0).n == 2
    with pytest.raises(NotFullRank):
        ModuleDescriptor.from_generators([[1, 0], [2, 0]], 2, T)
    with pytest.raises(RankMismatch):
        ModuleDescriptor([[1]], free_pair(2, T))
    back = ModuleDescriptor.from_json(N.to_json(), T)
    assert back.same_module(N)


def test_ideal_as_module(T, th, X):
    I = IdealOfR.from_generators([X * (1 + X), th * X * (1 + X)], T)
    assert ModuleDescriptor.from_ideal(I).to_ideal() == I


@pytest.mark.parametrize("n", [2, 3])
def test_glue_psi_localizes_correctly(T, n):
    M = ModuleDescriptor.free(n, T)
    psi = psi_pair(n, 1, tower=T)
    assign = {M0: local_pair_submodule(M, psi)}
    res = glue_submodule(M, assign)
    probes = RingR(T).probe_primes(3, seed=1)
    assert verify_glue(res, assign, probes)
    assert is_isomorphic(localize_check(res.module, M0), psi)[0]
    for p in probes:
        assert localize_check(res.module, p) == LocalFree(n, 0)
    other = glue_submodule(M, assign, variant=1)
    assert same_genus(res.module, other.module)
    assert iso_from_genus(res.module, other.module) is not None


def test_glue_at_two_primes_gives_product_ideal(T, X, P1):
    M = ModuleDescriptor.free(1, T)
    m = IdealOfR.maximal(M0, T)
    assign = {M0: ModuleDescriptor.from_ideal(m), P1: local_power_submodule(M, P1, 2)}
    res = glue_submodule(M, assign)
    assert res.module.to_ideal() == m * IdealOfR.principal((1 + X) ** 2, T)
    assert localize_check(res.module, P1) == LocalFree(1, 2)


def test_glue_errors(T, X, P1):
    M = ModuleDescriptor.free(2, T)
    with pytest.raises(RankMismatch):
        glue_submodule(M, {M0: ModuleDescriptor.free(1, T)})
    big = ModuleDescriptor.free(2, T).scaled(Poly([1], T))
    small = M.scaled(1 + X)
    with pytest.raises(NotLocalSubmodule):
        glue_submodule(small, {P1: big})
    assert glue_submodule(M, {P1: M}).module is M


def test_genus_of_psi_sum(T):
    p = direct_sum(psi_pair(2, 0, tower=T), free_pair(1, T))
    g = genus_of(p)
    assert g.rank == 3 and g.local[M0].free_rank == 1 and len(g.local[M0].nonfree) == 1
    assert genus_of(free_pair(2, T)).local == {}
    back = GenusDescriptor.from_json(g.to_json(), T)
    assert back.local[M0].free_rank == 1


def test_iso_from_genus_maps_generators(T, X):
    psi = psi_pair(2, 2, tower=T)
    M = ModuleDescriptor.from_pair(psi)
    ambient = ModuleDescriptor.free(2, T).scaled(1 + X)
    N = glue_submodule(ambient, {M0: local_pair_submodule(ambient, psi)}).module
    assert same_genus(M, N)
    iso = iso_from_genus(M, N)
    assert iso is not None
    inv = iso.denominator[0].inverse()
    assert iso.denominator.degree == 0
    for g in M.generators():
        assert N.contains([c * inv for c in iso.apply(g, T)])
    assert iso_from_genus(M, ModuleDescriptor.from_pair(psi_pair(2, 0, tower=T))) is None


def test_realizability(T):
    finite = GenusDescriptor(2, {M0: LocalClass(1, [psi_pair(2, 0, tower=T)])})
    assert genus_realizable(finite)
    countable = GenusDescriptor("countable", families=[FamilyRecord("countable", 1)])
    assert realizability_conditions(countable) == (True, False)
    assert not genus_realizable(countable)
    assert genus_realizable(GenusDescriptor("countable", families=[FamilyRecord("countable", "unbounded")]))
    assert not genus_realizable(GenusDescriptor("countable", families=[FamilyRecord("uncountable", "unbounded")]))
    with pytest.raises(UnrepresentableDescriptor):
        genus_realizable(GenusDescriptor(1, families=[FamilyRecord("many", 1)]))
    with pytest.raises(UnrepresentableDescriptor):
        GenusDescriptor.from_json({"families": [{"count": "finite"}]}, T)


def test_match_decompositions(T):
    p0, p1 = psi_pair(2, 0, tower=T), psi_pair(2, 1, tower=T)
    blocks = match_decompositions([direct_sum(p0, p1)], [p1, p0])
    assert len(blocks) == 1 and blocks[0].a == [0] and blocks[0].b == [0, 1]
    blocks = match_decompositions([p0, p1], [p1, p0])
    assert sorted((b.a, b.b) for b in blocks) == [([0], [1]), ([1], [0])]
    with pytest.raises(GenusMismatch):
        match_decompositions([p0], [free_pair(2, T)])
