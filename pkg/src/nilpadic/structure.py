"""Structure theory of a validated spec: the chain

    1 <= Delta+ <= Delta <= FN_p(G) <= nio(G) <= G

together with the torsion-unit scalar table, isolators, normal cores and
the orbitally-sound verdict.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import lattice as lat
from . import linalg, unipotent
from .errors import ClosureFailure, InvalidInput, InvariantViolation
from .lie import (
    Action, adjoint_matrix, bracket_lattice, bracket_vec, center, centralizer,
    filtered_basis, from_vec, is_block_lower_triangular, isolated_series,
    normalizer, to_vec,
)
from .model import (
    IDENTITY, Subgroup, coset_of, ensure_valid, matrix_to_json, subgroup_leq,
    whole_group,
)
from .scalar import format_scalar, is_zero

SUBGROUP_CAP = 10_000
ORBIT_CAP = 10_000


# -- helpers -------------------------------------------------------------------------

def _combine(coeffs, vectors, dim):
    out = [Fraction(0)] * dim
    for c, v in zip(coeffs, vectors):
        if not is_zero(c):
            out = [o + c * x for o, x in zip(out, v)]
    return tuple(out)


def integral_representative(L, v, K):
    """Some w in L with w - v in the Q_p-span of K (K saturated in L), or None."""
    comp = lat.complement_basis(K, L)
    basis = list(K.basis) + comp
    c = lat.coordinates_in_basis(basis, v, L.p, integral=False)
    if c is None:
        raise InvalidInput("vector is not in the span of the lattice")
    tail = c[K.rank:]
    if any(not is_zero(x) and lat.valuation(x, L.p) < 0 for x in tail):
        return None
    return _combine(tail, comp, L.dim)


def _is_identity(M):
    return linalg.mat_equal(M, linalg.identity(len(M)))


def _nilpotent_part_log(D):
    """log of a unipotent operator D (exact), or None if D is not unipotent."""
    n = len(D)
    if n == 0:
        return ()
    X = linalg.mat_sub(D, linalg.identity(n))
    if not linalg.mat_is_zero(linalg.mat_pow(X, n)):
        return None
    out = linalg.zeros(n)
    power = X
    for k in range(1, n):
        out = linalg.mat_add(out, linalg.mat_scale(Fraction((-1) ** (k + 1), k), power))
        power = linalg.mat_mul(power, X)
    return out


def _centralizes(spec, g, L):
    g_inv = linalg.mat_inv(g, spec.p)
    for b in L.basis:
        X = from_vec(b, spec.m)
        if not linalg.mat_equal(linalg.mat_mul(linalg.mat_mul(g_inv, X), g), X):
            return False
    return True


def _cached(spec, key, fn):
    if key not in spec._cache:
        spec._cache[key] = fn()
    return spec._cache[key]


# -- Delta -----------------------------------------------------------------------------

def inner_translation(spec, name):
    """t in N with rep(name) * t centralising N, or None.

    Ad(exp Y) has logarithm X -> [X, Y], which is linear in Y, so Ad(r) is
    inner iff log Ad(r) = [., Y] has a solution Y in L.  Solutions form a
    coset of the centre, and an integral one exists iff the non-central
    coordinates are p-integral.
    """
    L, m, p = spec.lie, spec.m, spec.p
    r = spec.rep(name)
    if not L.basis:
        return linalg.identity(m)
    D = adjoint_matrix(r, L, g_inv=spec.rep_inv(name))
    logD = _nilpotent_part_log(D)
    if logD is None:
        return None
    n = L.rank
    rows, rhs = [], []
    for j, b in enumerate(L.basis):
        target = _combine([logD[i][j] for i in range(n)], L.basis, L.dim)
        cols = [bracket_vec(b, bk, m) for bk in L.basis]
        for t in range(L.dim):
            rows.append(tuple(col[t] for col in cols))
            rhs.append(target[t])
    y = linalg.solve(rows, rhs, p)
    if y is None:
        return None
    Y0 = _combine(y, L.basis, L.dim)
    Y = integral_representative(L, Y0, center(L))
    if Y is None:
        return None
    t = unipotent.exp(from_vec(tuple(-x for x in Y), m))
    if not _centralizes(spec, linalg.mat_mul(r, t), L):
        raise InvariantViolation(f"translation for {name!r} does not centralise N")
    return t


def delta(spec):
    """Delta = C_G(N): centre of L plus every coset holding an N-centralising element."""
    def compute():
        ensure_valid(spec)
        Z = center(spec.lie)
        cosets, trans = [IDENTITY], []
        for name in spec.elements[1:]:
            t = inner_translation(spec, name)
            if t is not None:
                cosets.append(name)
                if not _is_identity(t):
                    trans.append((name, t))
        return Subgroup(Z, tuple(cosets), tuple(trans))
    return _cached(spec, "delta", compute)


@dataclass(frozen=True)
class FiniteSubgroup:
    """An explicit finite subgroup: one matrix per coset of N it meets."""

    elements: tuple  # ((coset name, matrix), ...)

    @property
    def order(self):
        return len(self.elements)

    @property
    def cosets(self):
        return tuple(c for c, _ in self.elements)

    def element(self, name):
        return dict(self.elements)[name]

    def contains_matrix(self, g):
        return any(linalg.mat_equal(g, h) for _, h in self.elements)

    def to_json(self):
        return {"order": self.order,
                "elements": {c: matrix_to_json(h) for c, h in self.elements}}


def delta_plus(spec):
    """Torsion elements of Delta, one per coset at most."""
    def compute():
        D = delta(spec)
        Z = D.lattice
        m = spec.m
        found = []
        for name in D.cosets:
            if name == IDENTITY:
                found.append((name, linalg.identity(m)))
                continue
            h = D.element(spec, name)
            e = spec.qorder(name)
            he = linalg.mat_pow(h, e)
            v = to_vec(unipotent.log(he))
            zlog = tuple(-x / e for x in v)
            if not lat.member(zlog, Z):
                continue
            g = linalg.mat_mul(h, unipotent.exp(from_vec(zlog, m)))
            if not _is_identity(linalg.mat_pow(g, e)):
                raise InvariantViolation(f"torsion solution in coset {name!r} has wrong order")
            found.append((name, g))
        F = FiniteSubgroup(tuple(found))
        _check_finite_normal(spec, F)
        return F
    return _cached(spec, "delta_plus", compute)


def _check_finite_normal(spec, F):
    for (a, g), (b, h) in ((x, y) for x in F.elements for y in F.elements):
        if not F.contains_matrix(linalg.mat_mul(g, h)):
            raise InvariantViolation(f"finite radical not closed under {a}*{b}")
    for name in spec.elements[1:]:
        r, ri = spec.rep(name), spec.rep_inv(name)
        for _, g in F.elements:
            if not F.contains_matrix(linalg.mat_mul(linalg.mat_mul(ri, g), r)):
                raise InvariantViolation(f"finite radical not normalised by {name!r}")


# -- FN_p ------------------------------------------------------------------------------

def _normal_closure(spec, gens):
    """Smallest normal subgroup of Q containing ``gens``."""
    S = {IDENTITY} | set(gens)
    frontier = list(S)
    while frontier:
        x = frontier.pop()
        new = set()
        for y in list(S):
            new.add(spec.qmul(x, y))
            new.add(spec.qmul(y, x))
        for c in spec.elements:
            new.add(spec.qmul(spec.qmul(spec.qinv(c), x), c))
        for z in new - S:
            S.add(z)
            frontier.append(z)
    return frozenset(S)


def normal_subgroups_containing(spec, base):
    base = _normal_closure(spec, base)
    seen = {base}
    queue = [base]
    while queue:
        S = queue.pop()
        for x in spec.elements:
            if x in S:
                continue
            T = _normal_closure(spec, S | {x})
            if T not in seen:
                seen.add(T)
                queue.append(T)
                if len(seen) > SUBGROUP_CAP:
                    raise ClosureFailure("more than 10^4 normal subgroups of the finite quotient")
    return sorted(seen, key=lambda s: (len(s), sorted(s)))


def _is_p_power(n, p):
    while n % p == 0:
        n //= p
    return n == 1


def _ordered(spec, names):
    return tuple(c for c in spec.elements if c in names)


def nilpotent_chain(spec, names):
    """Isolated central chain of L under N and the cosets ``names``."""
    acts = [spec.action(c) for c in _ordered(spec, names) if c != IDENTITY]
    return isolated_series(spec.lie, "central", acts)


@dataclass
class FNpResult:
    subgroup: Subgroup
    candidates: list      # (frozenset of cosets, passes) in enumeration order
    series: object        # SeriesReport of the winning chain


def fnp(spec):
    """The largest normal P containing Delta+ with P/Delta+ a nilpotent pro-p group.

    Torsion-freeness of H/Delta+ follows from nilpotency (its torsion is a
    finite normal subgroup of G, hence inside Delta+), so only the p-power
    index and the saturated nilpotency chain are tested.
    """
    def compute():
        Dp = delta_plus(spec)
        base = frozenset(Dp.cosets)
        cands = []
        for P in normal_subgroups_containing(spec, base):
            ok = _is_p_power(len(P) // len(base), spec.p) and \
                nilpotent_chain(spec, P).terminated
            cands.append((P, ok))
        join = set()
        for P, ok in cands:
            if ok:
                join |= P
        join = _normal_closure(spec, join)
        series = nilpotent_chain(spec, join)
        if not (_is_p_power(len(join) // len(base), spec.p) and series.terminated):
            raise InvariantViolation("join of nilpotent candidates fails the test")
        return FNpResult(Subgroup(spec.lie, _ordered(spec, join)), cands, series)
    return _cached(spec, "fnp", compute)


# -- scalar table ----------------------------------------------------------------------

@dataclass
class LayerEntry:
    zeta: object
    witness: tuple = None
    reason: str = "scalar"

    @property
    def scalar(self):
        return self.zeta is not None


@dataclass
class ScalarTable:
    layers: list                     # [(start, stop)] in the filtered basis
    layer_ranks: list
    rows: dict                       # name -> [LayerEntry]
    in_H: dict                       # name -> bool
    power_law: dict                  # name -> bool (only for all-scalar rows)
    multiplicative: bool = True
    failures: list = field(default_factory=list)
    blocks_lower_triangular: dict = field(default_factory=dict)
    filtered: object = None

    @property
    def xi1(self):
        return {n: r[0].zeta for n, r in self.rows.items() if r and r[0].scalar}

    def all_scalar(self, name):
        return all(e.scalar for e in self.rows[name])

    def to_json(self):
        rows = {}
        for n, entries in self.rows.items():
            rows[n] = [{"zeta": format_scalar(e.zeta)} if e.scalar else
                       {"zeta": None, "reason": e.reason,
                        "witness": [format_scalar(x) for x in e.witness]}
                       for e in entries]
        return {"layer_ranks": self.layer_ranks, "rows": rows,
                "in_FNp": self.in_H, "power_law": self.power_law,
                "multiplicative": self.multiplicative}


def _close(a, b, ctx):
    return lat.close_to_zero(a - b, ctx)


def xi_scalars(spec, H=None):
    """Per-coset, per-layer eigenvalues of the conjugation action on the
    layers of the isolated central chain of H (default FN_p)."""
    if H is None:
        res = fnp(spec)
        H, series = res.subgroup, res.series
    else:
        series = nilpotent_chain(spec, H.cosets)
    ctx, L = spec.ctx, spec.lie
    fb = filtered_basis(list(series.terms))
    ranks = [b - a for a, b in fb.layers]
    table = ScalarTable(fb.layers, ranks, {}, {}, {}, filtered=fb)
    for name in spec.elements[1:]:
        M = adjoint_matrix(spec.rep(name), L, fb.vectors, g_inv=spec.rep_inv(name)) \
            if fb.vectors else ()
        table.blocks_lower_triangular[name] = is_block_lower_triangular(M, fb.layers) \
            if fb.vectors else True
        entries = []
        for i, (a, b) in enumerate(fb.layers):
            block = fb.block(M, i)
            std = lat.standard_lattice(spec.p, b - a)
            act = lat.scalar_action(block, std, ctx)
            if act:
                entries.append(LayerEntry(act.zeta))
            else:
                w = _combine(act.witness, fb.vectors[a:b], L.dim)
                entries.append(LayerEntry(None, w, act.reason))
        table.rows[name] = entries
        table.in_H[name] = name in H.cosets
        if all(e.scalar for e in entries) and entries:
            z1 = entries[0].zeta
            table.power_law[name] = all(_close(e.zeta, z1 ** (i + 1), ctx)
                                        for i, e in enumerate(entries))
        elif not entries:
            table.power_law[name] = True
    names = [n for n in spec.elements[1:] if table.rows[n] and table.all_scalar(n)]
    xi = table.xi1
    for a in names:
        for b in names:
            c = spec.qmul(a, b)
            zc = 1 if c == IDENTITY else xi.get(c)
            if zc is None:
                continue
            if not _close(xi[a] * xi[b], zc, ctx):
                table.multiplicative = False
                table.failures.append((a, b))
    return table


# -- nio bounds ------------------------------------------------------------------------

@dataclass
class NioBounds:
    lower: Subgroup
    upper: Subgroup
    exact: bool
    certificate: str  # "abelian" | "bounds-coincide" | "none"


def nio_bounds(spec):
    def compute():
        H = fnp(spec).subgroup
        table = xi_scalars(spec, H)
        up = set(H.cosets)
        for name in spec.elements[1:]:
            if table.all_scalar(name) and table.power_law.get(name, False):
                up.add(name)
        up = _ordered(spec, up)
        upper = Subgroup(spec.lie, up)
        abelian = bracket_lattice(spec.lie, spec.lie).rank == 0
        if abelian and len(table.layers) <= 1:
            return NioBounds(H, upper, True, "abelian")
        if set(up) == set(H.cosets):
            return NioBounds(H, upper, True, "bounds-coincide")
        return NioBounds(H, upper, False, "none")
    return _cached(spec, "nio", compute)


# -- isolators and cores ---------------------------------------------------------------

@dataclass
class IsolatorResult:
    subgroup: Subgroup
    orbital: bool
    divisors: lat.ElementaryDivisors
    normalizer_rank: int


def _as_lattice(spec, K):
    if isinstance(K, Subgroup):
        return K.lattice
    if isinstance(K, lat.Lattice):
        return K
    vecs = []
    for g in K:
        if unipotent.is_unipotent(g):
            vecs.append(to_vec(unipotent.log(g)))
        else:
            raise InvalidInput("generator is not in N", witness=g)
    return lat.hnf(vecs, spec.p, spec.lie.dim)


def isolator(spec, K):
    """i_G(K) = Sat(K) ∩ G for K inside N, with the orbital flag."""
    L = spec.lie
    KL = _as_lattice(spec, K)
    if not lat.contains(L, KL):
        raise InvalidInput("subgroup is not contained in N")
    S = lat.saturate(KL, L)
    div = lat.quotient_divisors(KL, S)
    nrm = normalizer(L, S)
    return IsolatorResult(Subgroup(S, (IDENTITY,)), nrm.rank == L.rank, div, nrm.rank)


def _group_actions(spec):
    acts = []
    m = spec.m
    for b in spec.lie.basis:
        g = unipotent.exp(from_vec(b, m))
        acts.append(Action(g, spec.p, g_inv=unipotent.inv(g)))
        acts.append(Action(unipotent.inv(g), spec.p, g_inv=g))
    for name in spec.elements[1:]:
        acts.append(spec.action(name))
        acts.append(Action(spec.rep_inv(name), spec.p, g_inv=spec.rep(name)))
    return acts


def _image(act, K, m):
    return lat.hnf([act(b, m) for b in K.basis], K.p, K.dim)


def conjugate_lattices(spec, K, cap=ORBIT_CAP):
    """The G-orbit of the lattice K under conjugation (BFS over generators)."""
    m = spec.m
    acts = _group_actions(spec)
    orbit = [K]
    i = 0
    while i < len(orbit):
        X = orbit[i]
        i += 1
        for act in acts:
            Y = _image(act, X, m)
            if Y not in orbit:
                orbit.append(Y)
                if len(orbit) > cap:
                    raise InvalidInput("conjugate set exceeds the cap; subgroup is not orbital")
    return orbit


@dataclass
class CoreResult:
    core: Subgroup
    conjugates: list
    rank_drop: int
    divisors: object  # ElementaryDivisors when ranks agree


def normal_core(spec, K):
    """Intersection of the finitely many conjugates of an orbital K inside N."""
    KL = _as_lattice(spec, K)
    if not lat.contains(spec.lie, KL):
        raise InvalidInput("subgroup is not contained in N")
    if normalizer(spec.lie, KL).rank != spec.lie.rank:
        raise InvalidInput("subgroup is not orbital")
    conj = conjugate_lattices(spec, KL)
    core = conj[0]
    for X in conj[1:]:
        core = lat.intersect(core, X)
    drop = KL.rank - core.rank
    div = lat.quotient_divisors(core, KL) if drop == 0 else None
    return CoreResult(Subgroup(core, (IDENTITY,)), conj, drop, div)


# -- orbital soundness -----------------------------------------------------------------

@dataclass
class Verdict:
    answer: str            # "yes" | "no" | "unknown"
    witness: object = None  # a Lattice for "no" when found
    moved_by: str = None
    reason: str = ""


def orbitally_sound_check(spec):
    nb = nio_bounds(spec)
    G = whole_group(spec)
    if nb.exact and set(nb.upper.cosets) == set(G.cosets):
        return Verdict("yes", reason=f"nio exact ({nb.certificate}) and equal to G")
    table = xi_scalars(spec, nb.lower)
    series = nilpotent_chain(spec, nb.lower.cosets)
    terms = list(series.terms)
    L, m = spec.lie, spec.m
    fb = table.filtered
    for name in spec.elements[1:]:
        for i, e in enumerate(table.rows[name]):
            if e.scalar:
                continue
            layer_index = _term_index(terms, fb, i)
            below = terms[layer_index + 1] if layer_index + 1 < len(terms) else \
                lat.zero_lattice(L.p, L.dim)
            K = lat.saturate(lat.hnf([e.witness] + list(below.basis), L.p, L.dim), L)
            if normalizer(L, K).rank != L.rank:
                continue
            for act in _group_actions(spec):
                if _image(act, K, m) != K:
                    mover = act.name or "N"
                    return Verdict("no", K, mover,
                                   f"isolated orbital subgroup moved by {mover}")
    if nb.exact:
        return Verdict("no", reason="nio is exact and proper")
    return Verdict("unknown", reason="nio bounds are not exact and no witness was found")


def _term_index(terms, fb, layer):
    """Index i with the given filtered layer equal to terms[i] / terms[i+1]."""
    k = -1
    for i, (a, b) in enumerate(zip(terms, terms[1:])):
        if a.rank != b.rank:
            k += 1
            if k == layer:
                return i
    raise InvalidInput("layer index out of range")


# -- centre of a subgroup containing N ---------------------------------------------------

def centre_contains(spec, H, Dsub):
    """Whether every generator of Dsub commutes with N and the cosets of H."""
    m = spec.m
    gens = [unipotent.exp(from_vec(b, m)) for b in Dsub.lattice.basis]
    gens += [Dsub.element(spec, c) for c in Dsub.cosets if c != IDENTITY]
    others = [spec.rep(c) for c in H.cosets if c != IDENTITY]
    others += [unipotent.exp(from_vec(b, m)) for b in spec.lie.basis]
    for g in gens:
        for h in others:
            if not linalg.mat_equal(linalg.mat_mul(g, h), linalg.mat_mul(h, g)):
                return False
    return True


def centre_lattice(spec, H):
    """Lattice part of Z(H) for H ⊇ N: x in Z(L) fixed by the cosets of H."""
    S = [from_vec(b, spec.m) for b in spec.lie.basis]
    S += [spec.rep(c) for c in H.cosets if c != IDENTITY]
    return centralizer(spec.lie, S)


# -- report ------------------------------------------------------------------------------

@dataclass
class StructureReport:
    spec: object
    delta_plus: FiniteSubgroup
    delta: Subgroup
    fnp: Subgroup
    nio: NioBounds
    series: object
    scalars: ScalarTable
    verdict: Verdict
    checks: dict

    @property
    def layer_ranks(self):
        return self.series.layer_ranks


def structure_report(spec):
    ensure_valid(spec)
    Dp = delta_plus(spec)
    D = delta(spec)
    F = fnp(spec)
    H = F.subgroup
    nb = nio_bounds(spec)
    table = xi_scalars(spec, H)
    verdict = orbitally_sound_check(spec)
    G = whole_group(spec)
    checks = {}
    checks["delta_plus_in_delta"] = all(D.contains(spec, g) for _, g in Dp.elements)
    checks["delta_in_fnp"] = subgroup_leq(D, H, spec)
    checks["fnp_in_nio_lower"] = subgroup_leq(H, nb.lower, spec)
    checks["nio_lower_in_upper"] = subgroup_leq(nb.lower, nb.upper, spec)
    checks["nio_upper_in_G"] = subgroup_leq(nb.upper, G, spec)
    checks["fnp_maximal"] = all(set(P) <= set(H.cosets) for P, ok in F.candidates if ok)
    checks["isolated_series_torsion_free"] = F.series.checks.get("torsion_free_layers", True)
    checks["strongly_central"] = F.series.checks.get("strongly_central", True)
    checks["block_lower_triangular"] = all(table.blocks_lower_triangular.values())
    scalar_rows = [n for n in table.rows if table.rows[n] and table.all_scalar(n)]
    checks["power_law"] = all(table.power_law.get(n, True) for n in scalar_rows)
    checks["xi_multiplicative"] = table.multiplicative
    checks["delta_mod_plus_abelian"] = _delta_mod_plus_abelian(spec, D, Dp)
    if Dp.order == 1:
        # Z(H) ⊆ C_G(N) = Delta always, since N ⊆ H
        checks["delta_is_centre_of_fnp"] = (centre_contains(spec, H, D)
                                             and centre_lattice(spec, H) == D.lattice)
    if spec.p > 2 and nb.exact:
        checks["sylow"] = all(_order_mod(spec, c, H.cosets) % spec.p != 0
                              for c in nb.upper.cosets if c not in H.cosets)
    bad = [k for k, v in checks.items() if not v]
    if bad:
        raise InvariantViolation("structure invariants failed: " + ", ".join(bad))
    return StructureReport(spec, Dp, D, H, nb, F.series, table, verdict, checks)


def _order_mod(spec, c, sub):
    k, x = 1, c
    while x not in sub:
        x = spec.qmul(x, c)
        k += 1
    return k


def _delta_mod_plus_abelian(spec, D, Dp):
    for a in D.cosets:
        for b in D.cosets:
            ga, gb = D.element(spec, a), D.element(spec, b)
            comm = linalg.mat_mul(
                linalg.mat_mul(linalg.mat_inv(ga, spec.p), linalg.mat_inv(gb, spec.p)),
                linalg.mat_mul(ga, gb))
            if not Dp.contains_matrix(comm):
                return False
    return True


def coset_name(spec, g):
    return coset_of(g, spec)
