import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from nilpadic import lattice as lat, linalg, unipotent
from nilpadic.errors import InvalidInput
from nilpadic.examples import example, random_corpus
from nilpadic.lie import elementary as e, from_vec
from nilpadic.model import IDENTITY, spec_from_dict, matrix_to_json
from nilpadic.scalar import PadicContext, teichmuller
from nilpadic.structure import (
    delta, delta_plus, fnp, isolator, nio_bounds, normal_core, normal_subgroups_containing,
    orbitally_sound_check, structure_report, xi_scalars,
)

P = 5
ZETA = teichmuller(2, PadicContext(P))


def line(v, p, d):
    return lat.hnf([v], p, d)


def test_delta_examples():
    assert delta(example("heisenberg")).lattice == line(e(3, 1, 3), P, 3)
    D = delta(example("dihedral"))
    assert D.cosets == (IDENTITY,) and D.rank == 1
    W = example("wreath")
    D = delta(W)
    assert D.lattice == W.lie and D.cosets == (IDENTITY,)


def test_delta_plus_examples():
    assert delta_plus(example("dihedral")).order == 1
    assert delta_plus(example("wreath")).order == 1
    B = delta_plus(example("block"))
    assert B.order == 2 and B.cosets == (IDENTITY, "t")
    t = B.element("t")
    assert linalg.mat_equal(linalg.mat_mul(t, t), linalg.identity(3))


def test_fnp_examples():
    assert fnp(example("dihedral")).subgroup.cosets == (IDENTITY,)
    assert fnp(example("dihedral")).subgroup.rank == 1
    W = fnp(example("wreath")).subgroup
    assert W.cosets == (IDENTITY,) and W.rank == 2
    H = fnp(example("heisenberg_c4")).subgroup
    assert H.cosets == (IDENTITY,) and H.rank == 3
    # finite central factor is absorbed: Delta+ sits inside FN_p
    assert set(fnp(example("heisenberg_times_c2")).subgroup.cosets) == {IDENTITY, "t"}


def test_fnp_with_p_power_quotient():
    # p = 2: the sign coset is a 2-element, but -1 on the line is not nilpotent
    D = example("dihedral")
    res = fnp(D)
    passing = [set(P) for P, ok in res.candidates if ok]
    assert passing == [{IDENTITY}]
    assert len(normal_subgroups_containing(D, frozenset({IDENTITY}))) == 2


def test_xi_examples():
    assert xi_scalars(example("heisenberg")).rows == {}
    t = xi_scalars(example("dihedral"))
    assert t.xi1 == {"s": -1}
    t = xi_scalars(example("heisenberg_c4"))
    assert t.layer_ranks == [2, 1]
    z1, z2 = t.rows["s"][0].zeta, t.rows["s"][1].zeta
    assert z1 == ZETA and z2 == ZETA * ZETA
    assert t.power_law["s"] and t.multiplicative
    assert t.xi1["s2"] == -1


def test_nio_examples():
    nb = nio_bounds(example("dihedral"))
    assert nb.exact and nb.certificate == "abelian"
    assert nb.lower.cosets == (IDENTITY,) and set(nb.upper.cosets) == {IDENTITY, "s"}
    nb = nio_bounds(example("wreath"))
    assert nb.exact and nb.certificate == "abelian" and nb.upper.cosets == (IDENTITY,)
    nb = nio_bounds(example("heisenberg"))
    assert nb.exact and nb.certificate == "bounds-coincide"
    nb = nio_bounds(example("heisenberg_c4"))
    assert not nb.exact and len(nb.upper.cosets) == 4


def test_isolator_examples():
    W = example("wreath")
    K = line(tuple(P * x for x in e(3, 1, 2)), P, 3)
    iso = isolator(W, K)
    assert iso.subgroup.lattice == line(e(3, 1, 2), P, 3)
    assert iso.orbital and list(iso.divisors.exponents) == [1]
    again = isolator(W, iso.subgroup.lattice)
    assert again.subgroup.lattice == iso.subgroup.lattice and again.divisors.is_trivial()
    H = example("heisenberg")
    iso = isolator(H, [unipotent.exp(from_vec(e(3, 1, 2), 3))])
    assert iso.subgroup.lattice == line(e(3, 1, 2), P, 3)
    assert not iso.orbital and iso.normalizer_rank == 2
    with pytest.raises(InvalidInput):
        isolator(W, line((F(1, 5), F(0), F(0)), P, 3))


def test_normal_core_examples():
    W = example("wreath")
    res = normal_core(W, line(e(3, 1, 2), P, 3))
    assert res.core.rank == 0 and res.rank_drop == 1 and len(res.conjugates) == 2
    res = normal_core(W, W.lie)
    assert res.core.lattice == W.lie and res.divisors.is_trivial()
    D = example("dihedral")
    K = lat.hnf([tuple(2 * x for x in D.lie.basis[0])], 2, 1)
    assert normal_core(D, K).core.lattice == K
    with pytest.raises(InvalidInput):
        normal_core(example("heisenberg"), line(e(3, 1, 2), P, 3))


def test_verdict_examples():
    assert orbitally_sound_check(example("heisenberg_times_c2")).answer == "yes"
    assert orbitally_sound_check(example("dihedral")).answer == "yes"
    v = orbitally_sound_check(example("wreath"))
    assert v.answer == "no" and v.moved_by == "s"
    assert v.witness == line(e(3, 1, 2), P, 3)
    assert orbitally_sound_check(example("heisenberg_c4")).answer == "unknown"


def test_structure_report_examples():
    r = structure_report(example("dihedral"))
    assert r.delta_plus.order == 1 and r.delta.rank == 1 and r.fnp.rank == 1
    assert set(r.nio.upper.cosets) == {IDENTITY, "s"} and r.scalars.xi1["s"] == -1
    r = structure_report(example("wreath"))
    assert r.delta.lattice == r.fnp.lattice == r.nio.upper.lattice
    assert r.nio.upper.cosets == (IDENTITY,)
    r = structure_report(example("heisenberg_c4"))
    assert r.delta.lattice == line(e(3, 1, 3), P, 3) and r.fnp.rank == 3
    assert r.layer_ranks == [2, 1]
    assert all(r.checks.values())


def test_isolator_correspondence_through_open_subgroup():
    """i_G(i_H(K ∩ H)) = K for saturated orbital K and H = exp(pL)."""
    rng = random.Random(5)
    for spec in random_corpus(12, seed=3, primes=(3, 5)):
        L, p = spec.lie, spec.p
        if L.rank == 0:
            continue
        sub = spec_from_dict({"p": p, "m": spec.m, "N_generators": [
            matrix_to_json(unipotent.exp(from_vec(tuple(p * x for x in b), spec.m)))
            for b in L.basis]})
        assert sub.lie == lat.hnf([tuple(p * x for x in b) for b in L.basis], p, L.dim)
        for _ in range(3):
            b = rng.choice(L.basis)
            iso = isolator(spec, line(b, p, L.dim))
            if not iso.orbital:
                continue
            K = iso.subgroup.lattice
            KH = lat.intersect(K, sub.lie)
            inner = isolator(sub, KH).subgroup.lattice
            assert isolator(spec, inner).subgroup.lattice == K


CORPUS = random_corpus(30, seed=21)


@settings(max_examples=30)
@given(st.sampled_from(range(len(CORPUS))))
def test_report_invariants_on_corpus(i):
    spec = CORPUS[i]
    r = structure_report(spec)        # raises InvariantViolation on any failed check
    assert all(r.checks.values())
    nb = r.nio
    if nb.exact and nb.certificate == "bounds-coincide":
        assert set(nb.lower.cosets) == set(nb.upper.cosets)
    v = r.verdict
    if v.answer == "yes":
        assert nb.exact and len(nb.upper.cosets) == spec.order_Q
    if v.witness is not None:
        assert lat.saturate(v.witness, spec.lie) == v.witness
