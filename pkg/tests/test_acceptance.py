"""The nine acceptance criteria, each at its stated tolerance.

Every test prints a single "criterion N: PASS/FAIL" line (visible with -s);
the conftest hook repeats the verdicts in the terminal summary.
"""
import json
import os
import random
import subprocess
import sys
from fractions import Fraction as F

import pytest

from nilpadic import lattice as lat, lie, linalg, unipotent
from nilpadic.errors import OracleCapExceeded
from nilpadic.examples import EXAMPLES, example, random_corpus
from nilpadic.lie import elementary as e
from nilpadic.model import IDENTITY, subgroup_leq, whole_group
from nilpadic.oracle import compare
from nilpadic.scalar import INFINITY, PadicContext, residue, teichmuller
from nilpadic.structure import (
    centre_contains, centre_lattice, delta, delta_plus, fnp, nio_bounds, normal_core,
    orbitally_sound_check, structure_report, xi_scalars,
)

from conftest import SPEC_DIR
from helpers import lattice_corpus, random_sublattice


def announce(n, ok, detail=""):
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}".rstrip())
    assert ok, f"criterion {n} failed: {detail}"


def full_corpus():
    specs = [example(name) for name in sorted(EXAMPLES)]
    specs += random_corpus(150, seed=2024)
    return specs


def test_criterion_1_dihedral():
    D = example("dihedral")
    nb = nio_bounds(D)
    H = fnp(D).subgroup
    ok = (delta_plus(D).order == 1
          and nb.exact and nb.certificate == "abelian"
          and set(nb.upper.cosets) == set(D.elements)
          and H.cosets == (IDENTITY,) and H.lattice == D.lie and D.lie.rank == 1
          and xi_scalars(D).xi1 == {"s": -1})
    announce(1, ok, "Delta+ = 1, nio = G (abelian), FN_2 = Z_2, xi_1(s) = -1")


def test_criterion_2_wreath():
    W = example("wreath")
    H = lat.hnf([e(3, 1, 2)], W.p, 3)
    core = normal_core(W, H)
    v = orbitally_sound_check(W)
    nb = nio_bounds(W)
    ok = (core.core.rank == 0 and core.rank_drop == 1
          and v.answer == "no" and v.witness == H
          and nb.exact and nb.certificate == "abelian"
          and nb.upper.cosets == (IDENTITY,) and nb.upper.lattice.rank == 2
          and nb.upper.lattice == W.lie)
    announce(2, ok, "core(Z_p x 0) = 1, verdict no with that witness, nio = Z_p^2")


def test_criterion_3_scalar_law():
    S = example("heisenberg_c4")
    p, k = 5, 40
    zeta = teichmuller(2, PadicContext(p, k))
    table = xi_scalars(S)
    z1, z2 = table.rows["s"][0].zeta, table.rows["s"][1].zeta
    law = residue(z2, p, k) == residue(z1 * z1, p, k)
    fb = table.filtered
    M = lie.adjoint_matrix(S.rep("s"), S.lie, fb.vectors)
    tri = lie.is_block_lower_triangular(M, fb.layers)
    expect = [zeta, zeta * zeta]
    blocks = True
    for i, (a, b) in enumerate(fb.layers):
        blk = fb.block(M, i)
        for r in range(b - a):
            for c in range(b - a):
                target = expect[i] if r == c else 0
                blocks &= residue(blk[r][c] - target, p, k) == 0
    ok = law and tri and blocks and fb.layers == [(0, 2), (2, 3)]
    announce(3, ok, "zeta_2 = zeta_1^2 mod 5^40, blocks (zeta I_2, zeta^2 I_1)")


def test_criterion_4_isolator_laws():
    rng = random.Random(4)
    corpus = lattice_corpus(220, seed=4)
    assert len(corpus) >= 200 and all(m <= 5 for _, m, _ in corpus)
    failures = []
    for idx, (p, m, L) in enumerate(corpus):
        assert lie.bracket_lattice(L, L) <= L
        for _ in range(2):
            K = random_sublattice(rng, L)
            S = lat.saturate(K, L)
            if lat.saturate(S, L) != S:
                failures.append((idx, "idempotence"))
            div = lat.quotient_divisors(K, S)
            if S.rank != K.rank or not lat.contains(S, K) or div.index < 1:
                failures.append((idx, "open in isolator"))
        s = lie.isolated_series(L)
        T = s.terms
        for i in range(1, len(T)):
            for j in range(1, len(T)):
                if i + j <= len(T):
                    Tij = T[i + j - 1] if i + j - 1 < len(T) else lat.zero_lattice(p, L.dim)
                    if not lat.contains(Tij, lie.bracket_lattice(T[i - 1], T[j - 1])):
                        failures.append((idx, f"[G_{i}, G_{j}]"))
        if not all(d.is_trivial() for d in s.divisors):
            failures.append((idx, "layer divisors"))
    announce(4, not failures, f"{len(corpus)} lattices, failures {failures[:5]}")


def test_criterion_5_zeta_laws():
    checked, bad = 0, []
    for spec in full_corpus():
        t = xi_scalars(spec)
        rows = [n for n, r in t.rows.items() if r and t.all_scalar(n)]
        if not rows:
            continue
        checked += 1
        if not all(t.power_law[n] for n in rows) or not t.multiplicative:
            bad.append(spec.name)
    announce(5, checked > 0 and not bad, f"{checked} specs with scalar rows, violations {bad}")


def test_criterion_6_chain():
    bad = []
    count = 0
    for spec in full_corpus():
        count += 1
        Dp, D, H, nb = delta_plus(spec), delta(spec), fnp(spec).subgroup, nio_bounds(spec)
        G = whole_group(spec)
        ok = (all(D.contains(spec, g) for _, g in Dp.elements)
              and subgroup_leq(D, H, spec) and subgroup_leq(H, nb.lower, spec)
              and subgroup_leq(nb.lower, nb.upper, spec) and subgroup_leq(nb.upper, G, spec))
        if Dp.order == 1:
            ok &= centre_contains(spec, H, D) and centre_lattice(spec, H) == D.lattice
        if not ok:
            bad.append(spec.name)
    announce(6, not bad, f"{count} specs, violations {bad}")


def test_criterion_7_oracle():
    bad, done = [], 0
    for name in sorted(EXAMPLES):
        for k in (1, 2):
            rep = compare(example(name), k, cap=300000)
            if not rep.agrees:
                bad.append((name, k, rep.checks))
    randoms = 0
    for spec in random_corpus(40, seed=77, primes=(2, 3, 5)):
        try:
            reps = [compare(spec, k, cap=300000) for k in (1, 2)]
        except OracleCapExceeded:
            continue
        randoms += 1
        bad += [(spec.name, r.k, r.checks) for r in reps if not r.agrees]
        if randoms >= 25:
            break
    done = randoms
    announce(7, not bad and done >= 20,
             f"{len(EXAMPLES)} examples + {done} random specs, disagreements {bad[:3]}")


def _omega_samples(rng, p, n):
    eps = 2 if p == 2 else 1
    out = []
    for _ in range(n):
        m = rng.randint(2, 4)
        M = [[F(int(i == j)) for j in range(m)] for i in range(m)]
        if rng.random() > 0.03:
            for i in range(m):
                for j in range(i + 1, m):
                    if rng.random() < 0.7:
                        M[i][j] = F(p ** (eps + rng.randint(0, 2)) * rng.randint(-6, 6))
        out.append(tuple(tuple(r) for r in M))
    return out


def test_criterion_8_omega_axioms():
    rng = random.Random(8)
    bad = []
    for p in (2, 3, 5, 7):
        ctx = PadicContext(p)
        xs = _omega_samples(rng, p, 1000)
        ident = {len(x): linalg.identity(len(x)) for x in xs}
        for x in xs:
            m = len(x)
            y = rng.choice([z for z in xs if len(z) == m])
            wx, wy = unipotent.omega(x, ctx), unipotent.omega(y, ctx)
            if (wx == INFINITY) != linalg.mat_equal(x, ident[m]):
                bad.append((p, "infinity iff identity"))
            if not wx > F(1, p - 1):
                bad.append((p, "lower bound"))
            if not unipotent.omega(unipotent.mul(unipotent.inv(x), y), ctx) >= min(wx, wy):
                bad.append((p, "ultrametric"))
            if not unipotent.omega(unipotent.commutator(x, y), ctx) >= wx + wy:
                bad.append((p, "commutator"))
            if not unipotent.omega(linalg.mat_pow(x, p), ctx) == wx + 1:
                bad.append((p, "p-th power"))
    announce(8, not bad, f"4 x 1000 samples, failures {bad[:5]}")


def test_criterion_9_cli_determinism(tmp_path):
    files = sorted(os.path.join(SPEC_DIR, f) for f in os.listdir(SPEC_DIR))
    runs = []
    for i in range(2):
        out_dir = tmp_path / f"run{i}"
        cmd = [sys.executable, "-m", "nilpadic.cli", *files, "--oracle", "1",
               "--out-dir", str(out_dir), "--dot", "--jobs", "3"]
        subprocess.run(cmd, check=True, capture_output=True)
        text = subprocess.run([sys.executable, "-m", "nilpadic.cli", *files, "--format", "text"],
                              check=True, capture_output=True).stdout
        blobs = {f: (out_dir / f).read_bytes() for f in sorted(os.listdir(out_dir))}
        runs.append((blobs, text))
    (a, ta), (b, tb) = runs
    ok = a == b and ta == tb and len(a) == 2 * len(files)
    ok &= all(json.loads(a[f])["certification"]["precision"] > 0 for f in a if f.endswith(".json"))
    announce(9, ok, f"{len(a)} report files byte-identical across two runs")
