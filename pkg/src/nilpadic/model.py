"""Group specifications: unipotent generators of N plus coset representatives.

The finite quotient Q = G/N is given by named representatives and a
multiplication table; the identity coset is always called ``"1"``.  N is
taken to be exp of the smallest lattice that contains the logarithms of the
generators and is closed under brackets and under the group law on basis
pairs.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from itertools import product

from . import lattice as lat
from . import linalg, unipotent
from .errors import ClosureFailure, InvalidInput, NotInGroup, SpecValidationError
from .lie import Action, bracket_vec, from_vec, nil_dim, to_vec
from .scalar import PadicContext, format_scalar, parse_scalar

IDENTITY = "1"


@dataclass(frozen=True, eq=False)
class GroupSpec:
    ctx: PadicContext
    m: int
    n_generators: tuple
    coset_reps: tuple  # ((name, matrix), ...) in input order
    table: dict        # {(a, b): c} over all coset names including "1"
    name: str = ""
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def p(self):
        return self.ctx.p

    @property
    def elements(self):
        return [IDENTITY] + [n for n, _ in self.coset_reps]

    @property
    def order_Q(self):
        return len(self.coset_reps) + 1

    def rep(self, name):
        if name == IDENTITY:
            return linalg.identity(self.m)
        try:
            return dict(self.coset_reps)[name]
        except KeyError:
            raise InvalidInput(f"unknown coset {name!r}") from None

    def rep_inv(self, name):
        key = ("rep_inv", name)
        if key not in self._cache:
            self._cache[key] = linalg.mat_inv(self.rep(name), self.p)
        return self._cache[key]

    def action(self, name):
        key = ("action", name)
        if key not in self._cache:
            self._cache[key] = Action(self.rep(name), self.p, name, self.rep_inv(name))
        return self._cache[key]

    def qmul(self, a, b):
        return self.table[(a, b)]

    def qinv(self, a):
        return next(b for b in self.elements if self.qmul(a, b) == IDENTITY)

    def qorder(self, a):
        k, x = 1, a
        while x != IDENTITY:
            x = self.qmul(x, a)
            k += 1
        return k

    @property
    def lie(self):
        if "lie" not in self._cache:
            self._cache["lie"] = build_lie(self)
        return self._cache["lie"]


# -- parsing ----------------------------------------------------------------------------

def _parse_matrix(obj, m, p, what):
    if not isinstance(obj, list) or len(obj) != m:
        raise InvalidInput(f"{what}: expected {m} rows")
    rows = []
    for r in obj:
        if not isinstance(r, list) or len(r) != m:
            raise InvalidInput(f"{what}: expected rows of length {m}")
        rows.append(tuple(parse_scalar(x, p) for x in r))
    return tuple(rows)


def spec_from_dict(d, name=""):
    if not isinstance(d, dict):
        raise InvalidInput("spec must be a JSON object")
    missing = [k for k in ("p", "m", "N_generators") if k not in d]
    if missing:
        raise InvalidInput(f"spec is missing {', '.join(missing)}")
    p, m = d["p"], d["m"]
    if not isinstance(p, int) or not isinstance(m, int) or m < 1:
        raise InvalidInput("p and m must be integers, m >= 1")
    ctx = PadicContext(p, int(d.get("precision", 40)))
    gens = tuple(_parse_matrix(g, m, p, f"N_generators[{i}]")
                 for i, g in enumerate(d["N_generators"]))
    reps_in = d.get("coset_reps", {}) or {}
    if not isinstance(reps_in, dict):
        raise InvalidInput("coset_reps must be an object")
    if IDENTITY in reps_in:
        raise InvalidInput(f"coset name {IDENTITY!r} is reserved for N")
    reps = tuple((str(k), _parse_matrix(v, m, p, f"coset_reps[{k}]"))
                 for k, v in reps_in.items())
    names = [IDENTITY] + [k for k, _ in reps]
    table = {}
    for a in names:
        table[(IDENTITY, a)] = a
        table[(a, IDENTITY)] = a
    for key, val in (d.get("table", {}) or {}).items():
        parts = [s.strip() for s in str(key).split(",")]
        if len(parts) != 2:
            raise InvalidInput(f"malformed table key {key!r}")
        a, b = parts
        if a not in names or b not in names or str(val) not in names:
            raise InvalidInput(f"table entry {key!r} -> {val!r} names an unknown coset")
        table[(a, b)] = str(val)
    return GroupSpec(ctx, m, gens, reps, table, name)


def load_spec(path, precision=None):
    with open(path) as fh:
        try:
            d = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidInput(f"{path}: not valid JSON ({exc.msg})") from exc
    if precision is not None and isinstance(d, dict):
        d = dict(d, precision=precision)
    return spec_from_dict(d, os.path.splitext(os.path.basename(str(path)))[0])


def matrix_to_json(M):
    return [[format_scalar(x) for x in row] for row in M]


def spec_to_dict(spec):
    table = {f"{a},{b}": c for (a, b), c in sorted(spec.table.items())
             if a != IDENTITY and b != IDENTITY}
    return {"p": spec.p, "m": spec.m, "precision": spec.ctx.precision,
            "N_generators": [matrix_to_json(g) for g in spec.n_generators],
            "coset_reps": {n: matrix_to_json(r) for n, r in spec.coset_reps},
            "table": table}


# -- the Lie lattice of N ---------------------------------------------------------------

def build_lie(spec):
    """Smallest bracket- and product-closed lattice containing log of the generators."""
    m, p = spec.m, spec.p
    d = nil_dim(m)
    for g in spec.n_generators:
        if not unipotent.is_unipotent(g):
            raise InvalidInput("N generator is not unipotent", witness=g)
    L = lat.hnf([to_vec(unipotent.log(g)) for g in spec.n_generators], p, d)
    for _ in range(max(m * d, 1) + 1):
        new = list(L.basis)
        for i, a in enumerate(L.basis):
            for b in L.basis[i + 1:]:
                new.append(bracket_vec(a, b, m))
                prod = unipotent.mul(unipotent.exp(from_vec(a, m)), unipotent.exp(from_vec(b, m)))
                new.append(to_vec(unipotent.log(prod)))
        nxt = lat.hnf(new, p, d)
        if nxt == L:
            return L
        L = nxt
    raise ClosureFailure(f"log-lattice closure did not stabilise within {m * d} passes",
                         witness=L)


def member_of_N(g, spec):
    if not unipotent.is_unipotent(g):
        return False
    return lat.member(to_vec(unipotent.log(g)), spec.lie)


def coset_of(g, spec):
    for name in spec.elements:
        h = linalg.mat_mul(g, spec.rep_inv(name))
        if member_of_N(h, spec):
            return name
    raise NotInGroup("element lies in no coset of N", witness=g)


# -- validation ---------------------------------------------------------------------------

@dataclass
class ValidationReport:
    checks: dict = field(default_factory=dict)
    witnesses: dict = field(default_factory=dict)
    messages: dict = field(default_factory=dict)

    @property
    def ok(self):
        return all(self.checks.values())

    def fail(self, check, message, witness=None):
        self.checks[check] = False
        self.messages.setdefault(check, message)
        if witness is not None:
            self.witnesses.setdefault(check, witness)

    def first_failure(self):
        for k, v in self.checks.items():
            if not v:
                return k
        return None

    def to_json(self):
        out = {"ok": self.ok, "checks": self.checks}
        if self.messages:
            out["failures"] = {k: {"message": self.messages[k],
                                   "witness": witness_to_json(self.witnesses.get(k))}
                               for k in self.messages}
        return out


def witness_to_json(w):
    if w is None:
        return None
    if isinstance(w, tuple) and w and isinstance(w[0], tuple):
        return matrix_to_json(w)
    if isinstance(w, tuple):
        return [format_scalar(x) for x in w]
    return str(w)


def validate(spec):
    """Checks (a) unipotent generators, (b) closure, (c) normalisation,
    (d) table consistency and (e) the group axioms on Q."""
    rep = ValidationReport()
    m, p = spec.m, spec.p
    rep.checks["unipotent"] = True
    for g in spec.n_generators:
        if not unipotent.is_unipotent(g):
            rep.fail("unipotent", "N generator is not unipotent upper-triangular", g)
    for name, r in spec.coset_reps:
        try:
            spec.rep_inv(name)
        except Exception:
            rep.fail("unipotent", f"coset representative {name!r} is singular", r)
    if not rep.checks["unipotent"]:
        return rep

    rep.checks["closure"] = True
    try:
        L = spec.lie
    except ClosureFailure as exc:
        rep.fail("closure", str(exc), exc.witness.basis[0] if exc.witness.basis else None)
        return rep

    rep.checks["normalizes"] = True
    for name, r in spec.coset_reps:
        act = spec.action(name)
        inv_act = Action(spec.rep_inv(name), p, g_inv=r)
        for a in (act, inv_act):
            for b in L.basis:
                try:
                    img = a(b, m)
                except InvalidInput:
                    img = None
                if img is None or not lat.member(img, L):
                    rep.fail("normalizes", f"representative {name!r} moves N", from_vec(b, m))
                    break

    names = spec.elements
    rep.checks["group"] = True
    for a, b in product(names, names):
        if (a, b) not in spec.table:
            rep.fail("group", f"table has no entry for {a},{b}", (a, b))
    if rep.checks["group"]:
        for a, b, c in product(names, names, names):
            if spec.qmul(spec.qmul(a, b), c) != spec.qmul(a, spec.qmul(b, c)):
                rep.fail("group", f"table is not associative at {a},{b},{c}", (a, b, c))
                break
        for a in names:
            if not any(spec.qmul(a, b) == IDENTITY for b in names):
                rep.fail("group", f"{a} has no inverse in the table", a)
        for a in names:
            if sorted(spec.qmul(a, b) for b in names) != sorted(names):
                rep.fail("group", f"row {a} of the table is not a permutation", a)
                break

    rep.checks["table"] = True
    if rep.checks["normalizes"] and rep.checks["group"]:
        for a, b in product(names, names):
            c = spec.qmul(a, b)
            w = linalg.mat_mul(linalg.mat_mul(spec.rep(a), spec.rep(b)), spec.rep_inv(c))
            if not member_of_N(w, spec):
                rep.fail("table", f"rep({a})*rep({b}) is not in the coset {c}", w)
                break
        for a, b in product(names, names):
            if a < b:
                w = linalg.mat_mul(spec.rep(a), spec.rep_inv(b))
                if member_of_N(w, spec):
                    rep.fail("table", f"representatives {a} and {b} lie in the same coset", w)
    else:
        rep.checks["table"] = False
        rep.messages.setdefault("table", "skipped: earlier checks failed")
    return rep


def ensure_valid(spec):
    report = validate(spec)
    if not report.ok:
        check = report.first_failure()
        raise SpecValidationError(report.messages.get(check, check), check,
                                  report.witnesses.get(check))
    return report


# -- subgroups -------------------------------------------------------------------------------

@dataclass(frozen=True)
class Subgroup:
    """H = union over ``cosets`` c of exp(lattice) * h_c with h_c = rep(c) * t_c.

    ``lattice`` is the log-lattice of H ∩ N and ``translations`` maps each
    included coset to t_c in N (identity when absent).
    """

    lattice: lat.Lattice
    cosets: tuple
    translations: tuple = ()

    def translation(self, name, m):
        return dict(self.translations).get(name, linalg.identity(m))

    def element(self, spec, name):
        """The chosen element h_c of H in coset c."""
        return linalg.mat_mul(spec.rep(name), self.translation(name, spec.m))

    @property
    def rank(self):
        return self.lattice.rank

    @property
    def index_in_N_part(self):
        return len(self.cosets)

    def contains(self, spec, g):
        try:
            c = coset_of(g, spec)
        except NotInGroup:
            return False
        if c not in self.cosets:
            return False
        h = self.element(spec, c)
        w = linalg.mat_mul(linalg.mat_inv(h, spec.p), g)
        return unipotent.is_unipotent(w) and lat.member(to_vec(unipotent.log(w)), self.lattice)

    def to_json(self, spec):
        return {"rank": self.rank, "cosets": list(self.cosets),
                "lattice": self.lattice.to_json(),
                "translations": {c: matrix_to_json(self.translation(c, spec.m))
                                 for c in self.cosets if c != IDENTITY}}


def whole_group(spec):
    return Subgroup(spec.lie, tuple(spec.elements))


def normal_subgroup_N(spec):
    return Subgroup(spec.lie, (IDENTITY,))


def subgroup_leq(A, B, spec):
    """A ⊆ B, checked on lattice parts and on one element per coset of A."""
    if not lat.contains(B.lattice, A.lattice):
        return False
    if not set(A.cosets) <= set(B.cosets):
        return False
    return all(B.contains(spec, A.element(spec, c)) for c in A.cosets)
