import copy
import json
import os
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from nilpadic import linalg, unipotent
from nilpadic.errors import InvalidInput, NotInGroup, SpecValidationError
from nilpadic.examples import dihedral, example, heisenberg
from nilpadic.lattice import hnf
from nilpadic.lie import elementary as e, from_vec
from nilpadic.model import (
    IDENTITY, Subgroup, coset_of, ensure_valid, load_spec, matrix_to_json, member_of_N,
    spec_from_dict, spec_to_dict, subgroup_leq, validate, whole_group,
)

S_DIHEDRAL = ((F(1), F(0)), (F(0), F(-1)))


def unit(m, entries=()):
    M = [[F(int(i == j)) for j in range(m)] for i in range(m)]
    for (i, j), x in entries:
        M[i - 1][j - 1] = F(x)
    return tuple(tuple(r) for r in M)


def test_examples_validate():
    for name in ("dihedral", "wreath", "heisenberg_c4", "block", "trivial"):
        rep = validate(example(name))
        assert rep.ok, (name, rep.to_json())


def test_rep_leaving_N_fails_with_witness():
    d = dihedral()
    d["coset_reps"]["s"] = [["1/1", "0/1"], ["0/1", "2/1"]]
    d["table"] = {"s,s": "1"}
    rep = validate(spec_from_dict(d))
    assert not rep.ok
    bad = rep.first_failure()
    assert bad in ("normalizes", "table")
    assert rep.witnesses[bad] is not None
    with pytest.raises(SpecValidationError) as exc:
        ensure_valid(spec_from_dict(d))
    assert exc.value.check == bad


def test_non_unipotent_generator_fails():
    d = heisenberg()
    d["N_generators"][0][1][1] = "2/1"
    rep = validate(spec_from_dict(d))
    assert not rep.checks["unipotent"]


def test_malformed_inputs():
    d = dihedral()
    d["N_generators"][0][0][1] = "1/0"
    with pytest.raises(InvalidInput):
        spec_from_dict(d)
    with pytest.raises(InvalidInput):
        spec_from_dict([])
    d = dihedral()
    del d["m"]
    with pytest.raises(InvalidInput):
        spec_from_dict(d)
    d = dihedral()
    d["coset_reps"] = {"1": d["coset_reps"]["s"]}
    with pytest.raises(InvalidInput):
        spec_from_dict(d)


def test_build_lie_examples():
    H = example("heisenberg")
    assert H.lie == hnf([e(3, 1, 2), e(3, 2, 3), e(3, 1, 3)], 5, 3)
    assert example("dihedral").lie.rank == 1
    one = spec_from_dict({"p": 5, "m": 3, "N_generators": [matrix_to_json(unit(3, [((1, 2), 1)]))]})
    assert one.lie == hnf([e(3, 1, 2)], 5, 3)
    closed = spec_from_dict({"p": 5, "m": 3, "N_generators": [
        matrix_to_json(unipotent.exp(from_vec(v, 3))) for v in H.lie.basis]})
    assert closed.lie == H.lie


def test_build_lie_independent_of_order():
    d = heisenberg()
    r = copy.deepcopy(d)
    r["N_generators"] = list(reversed(r["N_generators"]))
    assert spec_from_dict(d).lie == spec_from_dict(r).lie


def test_membership_and_cosets():
    D = example("dihedral")
    for g in D.n_generators:
        assert member_of_N(g, D) and coset_of(g, D) == IDENTITY
    assert coset_of(S_DIHEDRAL, D) == "s"
    g = linalg.mat_mul(S_DIHEDRAL, unit(2, [((1, 2), 4)]))
    assert coset_of(g, D) == "s"
    with pytest.raises(NotInGroup):
        coset_of(unit(2, [((1, 2), F(1, 2))]), D)
    with pytest.raises(NotInGroup):
        coset_of(((F(3), F(0)), (F(0), F(1))), D)


def test_table_products_reverified():
    for name in ("heisenberg_c4", "wreath", "block"):
        spec = example(name)
        for a in spec.elements:
            for b in spec.elements:
                g = linalg.mat_mul(spec.rep(a), spec.rep(b))
                assert coset_of(g, spec) == spec.qmul(a, b)


def test_spec_files_roundtrip(spec_dir):
    for fn in sorted(os.listdir(spec_dir)):
        path = os.path.join(spec_dir, fn)
        with open(path) as fh:
            raw = json.load(fh)
        assert spec_to_dict(load_spec(path)) == raw, fn


def test_precision_override(spec_dir):
    spec = load_spec(os.path.join(spec_dir, "dihedral.json"), precision=12)
    assert spec.ctx.precision == 12


def test_subgroup_order():
    W = example("wreath")
    G = whole_group(W)
    N = Subgroup(W.lie, (IDENTITY,))
    assert subgroup_leq(N, G, W) and not subgroup_leq(G, N, W)
    assert G.contains(W, W.rep("s"))
    assert not N.contains(W, W.rep("s"))


@given(st.integers(-20, 20))
def test_dihedral_reps_normalise_N(a):
    D = example("dihedral")
    g = unit(2, [((1, 2), a)])
    conj = linalg.mat_mul(linalg.mat_mul(S_DIHEDRAL, g), S_DIHEDRAL)
    assert conj == unit(2, [((1, 2), -a)])
    assert member_of_N(conj, D)

