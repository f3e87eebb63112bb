"""Serialisation of structure reports: JSON, Graphviz DOT and plain text.

All three renderers are pure functions of the report, so identical inputs
give identical bytes.
"""
from __future__ import annotations

import json

from .lattice import quotient_divisors
from .model import spec_to_dict
from .scalar import format_scalar, precision_of

FORMAT_VERSION = 1


def _cosets(sub):
    return list(sub.cosets)


def nio_label(report):
    """"G", "FNp", "intermediate" (exact, strictly between) or "bounds"."""
    nb = report.nio
    if not nb.exact:
        return "bounds"
    n = len(nb.upper.cosets)
    if n == report.spec.order_Q:
        return "G"
    if n == len(report.fnp.cosets):
        return "FNp"
    return "intermediate"


def _index(big, small):
    """Index of one subgroup in another, or None when it is infinite."""
    if big.rank != small.rank:
        return None
    lattice_index = quotient_divisors(small.lattice, big.lattice).index
    return len(big.cosets) // len(small.cosets) * lattice_index


def chain_data(report):
    """The chain 1 <= Delta+ <= Delta <= FN_p <= nio-lower <= nio-upper <= G."""
    G_order = report.spec.order_Q
    D, H, nb = report.delta, report.fnp, report.nio
    links = [
        {"from": "G", "to": "nio_upper", "finite_index": G_order // len(nb.upper.cosets)},
        {"from": "nio_upper", "to": "nio_lower",
         "finite_index": len(nb.upper.cosets) // len(nb.lower.cosets)},
        {"from": "nio_lower", "to": "FNp", "finite_index": 1},
        {"from": "FNp", "to": "Delta", "finite_index": _index(H, D),
         "rank_drop": H.rank - D.rank},
        {"from": "Delta", "to": "Delta_plus",
         "finite_index": len(D.cosets) // report.delta_plus.order if D.rank == 0 else None,
         "rank_drop": D.rank},
        {"from": "Delta_plus", "to": "1", "finite_index": report.delta_plus.order},
    ]
    return links


def certified_precision(spec):
    """Digits actually certified: the context precision, or less when some
    input entry is itself only known to fewer digits."""
    k = spec.ctx.precision
    mats = list(spec.n_generators) + [r for _, r in spec.coset_reps]
    for M in mats:
        for row in M:
            for x in row:
                k = min(k, precision_of(x))
    return k


def _scalar_or_none(z):
    return None if z is None else format_scalar(z)


def to_dict(report, oracle=None):
    spec = report.spec
    nb = report.nio
    v = report.verdict
    out = {
        "format_version": FORMAT_VERSION,
        "name": spec.name,
        "p": spec.p,
        "m": spec.m,
        "precision": spec.ctx.precision,
        "epsilon": spec.ctx.epsilon,
        "Q_order": spec.order_Q,
        "N_rank": spec.lie.rank,
        "delta_plus_order": report.delta_plus.order,
        "delta_plus": report.delta_plus.to_json(),
        "delta_rank": report.delta.rank,
        "delta": report.delta.to_json(spec),
        "FNp_rank": report.fnp.rank,
        "FNp": report.fnp.to_json(spec),
        "nio": nio_label(report),
        "nio_bounds": {"lower": _cosets(nb.lower), "upper": _cosets(nb.upper),
                       "exact": nb.exact, "certificate": nb.certificate},
        "layer_ranks": list(report.scalars.layer_ranks),
        "isolated_series": report.series.to_json(),
        "scalars": report.scalars.to_json(),
        "xi1": {n: _scalar_or_none(z) for n, z in sorted(report.scalars.xi1.items())},
        "orbitally_sound": {
            "answer": v.answer,
            "witness": v.witness.to_json() if v.witness is not None else None,
            "moved_by": v.moved_by,
            "reason": v.reason,
        },
        "chain": chain_data(report),
        "checks": dict(sorted(report.checks.items())),
        "certification": {"precision": certified_precision(spec),
                          "nio": nb.certificate if nb.exact else "bounds-only",
                          "scalars": "mod p^precision"},
    }
    if oracle is not None:
        out["oracle"] = oracle.to_json()
    return out


def to_json(report, oracle=None):
    return json.dumps(to_dict(report, oracle), sort_keys=True, indent=2,
                      ensure_ascii=False) + "\n"


# -- DOT --------------------------------------------------------------------------------

def _q(s):
    # labels use \n line breaks on purpose, so only quotes are escaped
    return '"' + str(s).replace('"', '\\"') + '"'


def _zeta_text(report, layer):
    """Realised values of zeta^i on a layer, as short text."""
    vals = []
    for name, entries in sorted(report.scalars.rows.items()):
        if layer < len(entries) and entries[layer].scalar:
            z = entries[layer].zeta
            vals.append(f"{name}:{_short(z)}")
    return ", ".join(vals)


def _short(z):
    s = format_scalar(z)
    if isinstance(s, dict):
        digits = "".join(str(d) for d in reversed(s["digits"][:4]))
        return f"...{digits}"
    return s[:-2] if s.endswith("/1") else s


def to_dot(report):
    """Digraph G -> nio(G) -> H_1 -> ... -> H_r = Delta+ -> 1."""
    nb = report.nio
    ranks = list(report.scalars.layer_ranks)
    r = len(ranks) + 1
    lines = ["digraph structure {", "  rankdir=TB;", "  node [shape=box];"]
    nio_node = "nio(G)" if nb.exact else "nio(G) bounds"
    nodes = [("G", f"G\\n|Q| = {report.spec.order_Q}")]
    if nb.exact:
        nodes.append(("nio", f"{nio_node}\\ncosets {{{', '.join(nb.upper.cosets)}}}"
                      f"\\n{nb.certificate}"))
    else:
        nodes.append(("nio", f"{nio_node}\\nlower {{{', '.join(nb.lower.cosets)}}}"
                      f"\\nupper {{{', '.join(nb.upper.cosets)}}}"))
    for i in range(1, r):
        extra = f"\\nFN_p, rank {report.fnp.rank}" if i == 1 else ""
        nodes.append((f"H_{i}", f"H_{i}{extra}"))
    nodes.append((f"H_{r}", f"H_{r} = Delta+\\norder {report.delta_plus.order}"))
    nodes.append(("1", "1"))
    for key, label in nodes:
        lines.append(f"  {_q(key)} [label={_q(label)}];")

    def edge(a, b, label):
        lines.append(f"  {_q(a)} -> {_q(b)} [label={_q(label)}];")

    hi = report.spec.order_Q // len(nb.upper.cosets)
    lo = report.spec.order_Q // len(nb.lower.cosets)
    top = len(nb.upper.cosets) // len(report.fnp.cosets)
    bottom = len(nb.lower.cosets) // len(report.fnp.cosets)
    if nb.exact:
        edge("G", "nio", f"index {hi}")
        edge("nio", "H_1", f"<= t(Z_p^x), order {top}")
    else:
        edge("G", "nio", f"index {hi}..{lo}")
        edge("nio", "H_1", f"<= t(Z_p^x), order {bottom}..{top}")
    for i, d in enumerate(ranks, start=1):
        zeta = _zeta_text(report, i - 1)
        label = f"d_{i} = {d}; zeta^{i}"
        if zeta:
            label += f" [{zeta}]"
        edge(f"H_{i}", f"H_{i + 1}", label)
    edge(f"H_{r}", "1", f"|Delta+| = {report.delta_plus.order}")
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- text -------------------------------------------------------------------------------

def to_text(report, oracle=None):
    spec, nb, v = report.spec, report.nio, report.verdict
    out = [f"{spec.name or '<spec>'}: p={spec.p} m={spec.m} precision={spec.ctx.precision}"
           f" (certified {certified_precision(spec)})",
           f"  |Q| = {spec.order_Q}, rank N = {spec.lie.rank}",
           f"  Delta+ order {report.delta_plus.order}: {', '.join(report.delta_plus.cosets)}",
           f"  Delta rank {report.delta.rank}, cosets {', '.join(report.delta.cosets)}",
           f"  FN_p rank {report.fnp.rank}, cosets {', '.join(report.fnp.cosets)}"]
    if nb.exact:
        out.append(f"  nio = {nio_label(report)} (cosets {', '.join(nb.upper.cosets)};"
                   f" certificate {nb.certificate})")
    else:
        out.append(f"  nio between {{{', '.join(nb.lower.cosets)}}} and "
                   f"{{{', '.join(nb.upper.cosets)}}} (not certified exact)")
    out.append(f"  layer ranks {list(report.scalars.layer_ranks)}")
    for name, entries in sorted(report.scalars.rows.items()):
        cells = [_short(e.zeta) if e.scalar else f"non-scalar ({e.reason})" for e in entries]
        out.append(f"    {name}: {' | '.join(cells) if cells else '-'}")
    out.append(f"  orbitally sound: {v.answer} ({v.reason})")
    if v.witness is not None:
        w = [[_short(x) for x in b] for b in v.witness.basis]
        out.append(f"    witness {w} moved by {v.moved_by}")
    failed = [k for k, ok in report.checks.items() if not ok]
    out.append(f"  checks: {len(report.checks) - len(failed)}/{len(report.checks)} passed")
    if oracle is not None:
        out.append(f"  oracle k={oracle.k}: |image| = {oracle.order}")
        for k, res in sorted(oracle.checks.items()):
            out.append(f"    {k}: {res}")
    return "\n".join(out) + "\n"


def render(report, fmt, oracle=None):
    if fmt == "json":
        return to_json(report, oracle)
    if fmt == "dot":
        return to_dot(report)
    if fmt == "text":
        return to_text(report, oracle)
    raise ValueError(f"unknown format {fmt!r}")


def spec_json(spec):
    """Canonical spec file bytes."""
    return json.dumps(spec_to_dict(spec), sort_keys=True, indent=2) + "\n"


__all__ = ["to_dict", "to_json", "to_dot", "to_text", "render", "nio_label",
           "chain_data", "certified_precision", "spec_json"]
