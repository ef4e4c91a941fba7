"""Recognise the three canonical two-qubit circuits inside an arbitrary netlist.

Matching is structural: node names do not matter, only which capacitors and
junctions connect what. The result records each circuit parameter plus the
orientation of every junction relative to the canonical drawing, so that
signed matrix entries can be compared with closed forms.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .netlist import GND, Junction, Netlist


class TopologyMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Match:
    kind: str  # "direct" | "grounded-bus" | "floating-bus"
    params: dict[str, Fraction]
    labels: dict[str, str]  # canonical role -> coordinate label
    signs: dict[str, int]  # canonical role -> +1 / -1 orientation


def _oriented(j: Junction, first: str) -> tuple[str, str, int]:
    if j.node_a == first:
        return j.node_a, j.node_b, 1
    return j.node_b, j.node_a, -1


def _labels_for(n: Netlist) -> dict[int, str]:
    """Minus-coordinate label of each floating junction, by junction index."""
    out = {}
    ordinal = 0
    for i, j in enumerate(n.junctions):
        if j.floating:
            ordinal += 1
            out[i] = f"{j.name if j.name is not None else ordinal}m"
    return out


def _check_edges(n: Netlist, expected: set[frozenset[str]], kind: str) -> None:
    present = {frozenset((c.node_a, c.node_b)) for c in n.capacitors}
    extra = present - expected
    if extra:
        pairs = ", ".join("-".join(sorted(e)) for e in sorted(extra, key=sorted))
        raise TopologyMismatch(f"not a {kind} circuit: unexpected capacitors {pairs}")


def _drive_side(n: Netlist) -> tuple[str, str, Junction, int]:
    if len(n.drive_ports) != 1:
        raise TopologyMismatch("expected exactly one drive port")
    d = n.drive_ports[0].source_node
    nb = n.neighbours(d)
    if len(nb) != 1 or GND in nb:
        raise TopologyMismatch("drive source must couple to exactly one island")
    (a,) = nb
    j = n.junction_of(a)
    if j is None or not j.floating:
        raise TopologyMismatch("drive must couple to an island of a floating junction")
    return d, a, j, n.junctions.index(j)


def identify(n: Netlist) -> Match:
    d, a, j1, i1 = _drive_side(n)
    a, b, s1 = _oriented(j1, a)
    minus = _labels_for(n)
    others = [(i, j) for i, j in enumerate(n.junctions) if i != i1]
    floating = [(i, j) for i, j in others if j.floating]
    grounded = [(i, j) for i, j in others if not j.floating]
    C = n.capacitance
    base = {"C_d": C(d, a), "C_q1": C(a, b), "C_g1": C(a, GND), "C_g2": C(b, GND)}

    if len(others) == 1 and len(floating) == 1:
        i2, j2 = floating[0]
        x, y = j2.node_a, j2.node_b
        if C(a, y) or C(b, x):
            x, y = y, x
        c, e, s2 = _oriented(j2, x)
        _check_edges(n, {frozenset(p) for p in [
            (d, a), (a, b), (c, e), (a, GND), (b, GND), (c, GND), (e, GND), (a, c), (b, e)]}, "direct")
        params = {**base, "C_q2": C(c, e), "C_g3": C(c, GND), "C_g4": C(e, GND),
                  "C_c1": C(a, c), "C_c2": C(b, e)}
        return Match("direct", params,
                     {"d": d, "q1": minus[i1], "q2": minus[i2]},
                     {"d": 1, "q1": s1, "q2": s2})

    if len(floating) == 1 and len(grounded) == 1:
        i2, j2 = floating[0]
        _, tj = grounded[0]
        t = tj.node_a
        x, y = j2.node_a, j2.node_b
        if C(y, t) and not C(x, t):
            x, y = y, x
        c, e, s2 = _oriented(j2, x)
        _check_edges(n, {frozenset(p) for p in [
            (d, a), (a, b), (c, e), (a, GND), (b, GND), (c, GND), (e, GND),
            (t, GND), (a, t), (c, t)]}, "grounded-bus")
        params = {**base, "C_q2": C(c, e), "C_g3": C(c, GND), "C_g4": C(e, GND),
                  "C_t": C(t, GND), "C_c1": C(a, t), "C_c2": C(c, t)}
        return Match("grounded-bus", params,
                     {"d": d, "q1": minus[i1], "t": t, "q2": minus[i2]},
                     {"d": 1, "q1": s1, "t": 1, "q2": s2})

    if len(floating) == 2 and not grounded:
        (ib, jb), (i2, j2) = floating
        if not (C(a, jb.node_a) or C(a, jb.node_b)):
            (ib, jb), (i2, j2) = (i2, j2), (ib, jb)
        u = jb.node_a if C(a, jb.node_a) else jb.node_b
        u, v, sb = _oriented(jb, u)
        w = j2.node_a if C(v, j2.node_a) else j2.node_b
        w, z, s2 = _oriented(j2, w)
        _check_edges(n, {frozenset(p) for p in [
            (d, a), (a, b), (w, z), (a, GND), (b, GND), (w, GND), (z, GND),
            (u, v), (u, GND), (v, GND), (a, u), (v, w)]}, "floating-bus")
        params = {**base, "C_q2": C(w, z), "C_g3": C(w, GND), "C_g4": C(z, GND),
                  "C_t": C(u, v), "C_b1": C(u, GND), "C_b2": C(v, GND),
                  "C_c1": C(a, u), "C_c2": C(v, w)}
        return Match("floating-bus", params,
                     {"d": d, "q1": minus[i1], "t": minus[ib], "q2": minus[i2]},
                     {"d": 1, "q1": s1, "t": sb, "q2": s2})

    raise TopologyMismatch("netlist does not match a direct, grounded-bus or floating-bus circuit")
