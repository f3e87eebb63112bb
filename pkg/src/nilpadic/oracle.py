"""Brute-force cross-checks in the finite quotients G mod p^k.

Every element of the image group is enumerated, and conjugacy classes,
centralizers and normal cores are computed naively.  The comparisons only
test consequences that survive reduction (class sizes, normality, cores);
orbital-ness of the infinite group is never claimed from a finite quotient.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from . import kernels, linalg, unipotent
from . import lattice as lat
from .errors import InvalidInput
from .lie import from_vec
from .model import IDENTITY
from .structure import (
    delta, delta_plus, fnp, isolator, nio_bounds, normal_core, orbitally_sound_check,
)
from .scalar import is_zero, residue, valuation

DEFAULT_CAP = 10 ** 6


def reduce_matrix(M, p, k):
    q = p ** k
    out = []
    for row in M:
        for x in row:
            if not is_zero(x) and valuation(x, p) < 0:
                raise InvalidInput("matrix is not p-integral; it has no image mod p^k",
                                   witness=M)
            out.append(residue(x, p, k) % q)
    return tuple(out)


@dataclass
class FiniteQuotient:
    p: int
    k: int
    m: int
    elements: list
    generators: dict  # label -> flat matrix
    index: dict = field(default_factory=dict)
    cap: int = DEFAULT_CAP

    @property
    def q(self):
        return self.p ** self.k

    @property
    def order(self):
        return len(self.elements)

    def __contains__(self, g):
        return g in self.index

    def reduce(self, M):
        return reduce_matrix(M, self.p, self.k)

    def inverse(self, g):
        return kernels.mat_inv_mod(g, self.m, self.q, self.p)

    def mul(self, a, b):
        return kernels.mat_mul_mod(a, b, self.m, self.q)


def finite_quotient(spec, k, cap=DEFAULT_CAP):
    """The image of G in GL_m(Z/p^k)."""
    if k < 1 or k > spec.ctx.precision:
        raise InvalidInput(f"oracle depth {k} must lie in 1..{spec.ctx.precision}")
    p, m = spec.p, spec.m
    gens = {}
    for i, g in enumerate(spec.n_generators):
        gens[f"n{i}"] = reduce_matrix(g, p, k)
    for i, b in enumerate(spec.lie.basis):
        gens[f"l{i}"] = reduce_matrix(unipotent.exp(from_vec(b, m)), p, k)
    for name in spec.elements[1:]:
        gens[f"r:{name}"] = reduce_matrix(spec.rep(name), p, k)
    labels = sorted(gens)
    elements = kernels.closure([gens[x] for x in labels], m, p ** k, cap)
    fq = FiniteQuotient(p, k, m, elements, gens, cap=cap)
    fq.index = {g: i for i, g in enumerate(elements)}
    return fq


def _gen_lists(fq):
    gs = [fq.generators[x] for x in sorted(fq.generators)]
    return gs, [fq.inverse(g) for g in gs]


def oracle_class(g, fq):
    gs, gi = _gen_lists(fq)
    return kernels.conjugates(g, gs, gi, fq.m, fq.q)


def oracle_centralizer(g, fq):
    return [fq.elements[i] for i in kernels.centralizer_indices(g, fq.elements, fq.m, fq.q)]


def subgroup_closure(gens, fq, cap=None):
    return set(kernels.closure(list(gens), fq.m, fq.q, fq.cap if cap is None else cap))


def oracle_core(K, fq):
    """Largest normal subgroup of the quotient inside the subgroup K (a set)."""
    K = set(K)
    gs, gi = _gen_lists(fq)
    core = set()
    rejected = set()
    for x in K:
        if x in core or x in rejected:
            continue
        cls = kernels.conjugates(x, gs, gi, fq.m, fq.q)
        if cls <= K:
            core |= cls
        else:
            rejected |= cls & K
    return core


# -- comparisons with the main path -----------------------------------------------------

def lattice_image(spec, L, fq):
    """Image of exp(L) in the quotient."""
    gens = [fq.reduce(unipotent.exp(from_vec(b, spec.m))) for b in L.basis]
    return subgroup_closure(gens, fq)


def subgroup_image(spec, H, fq):
    gens = [fq.reduce(unipotent.exp(from_vec(b, spec.m))) for b in H.lattice.basis]
    gens += [fq.reduce(H.element(spec, c)) for c in H.cosets if c != IDENTITY]
    return subgroup_closure(gens, fq)


def predicted_class_size(spec, g, fq):
    """Size of the class of an N-centralising g: distinct images of r^-1 g r."""
    imgs = set()
    for name in spec.elements:
        h = linalg.mat_mul(linalg.mat_mul(spec.rep_inv(name), g), spec.rep(name))
        imgs.add(fq.reduce(h))
    return len(imgs)


@dataclass
class OracleReport:
    k: int
    order: int
    checks: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    @property
    def agrees(self):
        return all(v == "agrees" for v in self.checks.values())

    def to_json(self):
        return {"k": self.k, "group_order": self.order,
                "checks": dict(sorted(self.checks.items())),
                "details": dict(sorted(self.details.items()))}


def core_test_lattices(spec):
    """Orbital saturated lattices used for core comparisons."""
    L = spec.lie
    out = []
    v = orbitally_sound_check(spec)
    if v.witness is not None:
        out.append(v.witness)
    out.append(L)
    for b in L.basis:
        iso = isolator(spec, lat.hnf([b], L.p, L.dim))
        if iso.orbital and iso.subgroup.lattice not in out:
            out.append(iso.subgroup.lattice)
    return out


def compare(spec, k, cap=DEFAULT_CAP):
    """Check structure-module predictions against enumeration mod p^k."""
    fq = finite_quotient(spec, k, cap)
    rep = OracleReport(k, fq.order)

    def verdict(ok):
        return "agrees" if ok else "disagrees"

    D, Dp = delta(spec), delta_plus(spec)
    n_imgs = [fq.reduce(unipotent.exp(from_vec(b, spec.m))) for b in spec.lie.basis]
    n_imgs += [fq.reduce(g) for g in spec.n_generators]

    # Delta centralises N: images commute with the image of N
    d_elems = [unipotent.exp(from_vec(b, spec.m)) for b in D.lattice.basis]
    d_elems += [D.element(spec, c) for c in D.cosets if c != IDENTITY]
    ok = all(fq.mul(fq.reduce(g), n) == fq.mul(n, fq.reduce(g)) for g in d_elems for n in n_imgs)
    rep.checks["delta_centralizes_N"] = verdict(ok)

    # conjugacy class sizes of Delta elements
    sizes = []
    ok = True
    for g in d_elems:
        pred = predicted_class_size(spec, g, fq)
        got = len(oracle_class(fq.reduce(g), fq))
        sizes.append([pred, got])
        ok &= pred == got
    rep.checks["delta_class_sizes"] = verdict(ok)
    rep.details["delta_class_sizes"] = sizes

    # Delta+ is a normal subgroup of the image
    dp = {fq.reduce(g) for _, g in Dp.elements}
    ok = all(fq.mul(a, b) in dp for a in dp for b in dp)
    gs, gi = _gen_lists(fq)
    ok &= all(fq.mul(fq.mul(hi, x), h) in dp for x in dp for h, hi in zip(gs, gi))
    rep.checks["delta_plus_normal"] = verdict(ok)

    # normal cores: conjugation commutes with reduction, so the core of the
    # image is the intersection of the images of the predicted conjugates.
    # The image of the core itself can be smaller (distinct conjugate lines
    # may coincide mod p^k); that is reported, not compared.
    cores = []
    ok = True
    for K in core_test_lattices(spec):
        res = normal_core(spec, K)
        predicted = None
        for X in res.conjugates:
            img = lattice_image(spec, X, fq)
            predicted = img if predicted is None else predicted & img
        got = oracle_core(lattice_image(spec, K, fq), fq)
        reduced = lattice_image(spec, res.core.lattice, fq)
        cores.append({"rank": K.rank, "conjugates": len(res.conjugates),
                      "predicted": len(predicted), "oracle": len(got),
                      "image_of_core": len(reduced)})
        ok &= predicted == got and reduced <= got
    rep.checks["normal_cores"] = verdict(ok)
    rep.details["normal_cores"] = cores

    # chain of images
    H = fnp(spec).subgroup
    nb = nio_bounds(spec)
    imgs = [dp, subgroup_image(spec, D, fq), subgroup_image(spec, H, fq),
            subgroup_image(spec, nb.lower, fq), subgroup_image(spec, nb.upper, fq),
            set(fq.elements)]
    ok = all(a <= b for a, b in zip(imgs, imgs[1:]))
    rep.checks["chain_images"] = verdict(ok)
    rep.details["chain_orders"] = [len(x) for x in imgs]
    return rep
