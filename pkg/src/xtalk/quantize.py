"""Capacitance matrix assembly, plus/minus mode transform and free-mode elimination."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .netlist import GND, Netlist
from .ratmat import Matrix, SingularMatrixError, block, congruence, invert, submatrix


class Kind(str, Enum):
    DRIVE = "drive"
    QUBIT_MINUS = "qubit-minus"
    FREE_PLUS = "free-plus"
    GROUNDED = "grounded-node"


class FloatingSubcircuitError(SingularMatrixError):
    """The capacitance matrix is singular because some nodes never reach ground."""

    def __init__(self, nodes: list[str]):
        self.nodes = nodes
        super().__init__("floating subcircuit: " + " ".join(nodes))


class ReductionMismatch(AssertionError):
    pass


@dataclass(frozen=True)
class Coordinate:
    label: str
    kind: Kind
    nodes: tuple[str, ...]  # one node, or the (a, b) pair of a floating junction


@dataclass(frozen=True)
class ModeSystem:
    """Coordinate change ``Phi = S Phi'`` from node fluxes to device modes.

    ``transform`` is indexed by coordinate label on both axes; its columns
    correspond positionally to ``node_order``.
    """

    transform: Matrix
    node_order: tuple[str, ...]
    coordinates: tuple[Coordinate, ...]
    netlist: Netlist
    diagnostics: tuple[str, ...] = ()

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(c.label for c in self.coordinates)

    def kind(self, label: str) -> Kind:
        for c in self.coordinates:
            if c.label == label:
                return c.kind
        raise KeyError(f"unknown coordinate {label!r}")

    def coordinate(self, label: str) -> Coordinate:
        for c in self.coordinates:
            if c.label == label:
                return c
        raise KeyError(f"unknown coordinate {label!r}")

    @property
    def free(self) -> tuple[str, ...]:
        return tuple(c.label for c in self.coordinates if c.kind is Kind.FREE_PLUS)

    @property
    def retained(self) -> tuple[str, ...]:
        return tuple(c.label for c in self.coordinates if c.kind is not Kind.FREE_PLUS)


@dataclass(frozen=True)
class ReducedSystem:
    c_r: Matrix
    removed: tuple[str, ...]
    original: Matrix
    modes: ModeSystem

    def drive_labels(self) -> tuple[str, ...]:
        return tuple(c.label for c in self.modes.coordinates if c.kind is Kind.DRIVE)


def assemble(n: Netlist) -> Matrix:
    """Maxwell capacitance matrix over the non-ground nodes, in declaration order."""
    idx = {node: i for i, node in enumerate(n.nodes)}
    size = len(n.nodes)
    m = [[Fraction(0)] * size for _ in range(size)]
    for c in n.capacitors:
        ends = [idx[x] for x in (c.node_a, c.node_b) if x != GND]
        for i in ends:
            m[i][i] += c.value
        if len(ends) == 2:
            i, j = ends
            m[i][j] -= c.value
            m[j][i] -= c.value
    return Matrix(m, n.nodes)


def floating_subcircuits(n: Netlist) -> list[list[str]]:
    """Groups of nodes with no capacitive path to ground (each makes the matrix singular)."""
    parent = {x: x for x in (*n.nodes, GND)}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for c in n.capacitors:
        parent[find(c.node_a)] = find(c.node_b)
    root = find(GND)
    groups: dict[str, list[str]] = {}
    for node in n.nodes:
        r = find(node)
        if r != root:
            groups.setdefault(r, []).append(node)
    return list(groups.values())


def build_modes(n: Netlist) -> ModeSystem:
    coords: list[Coordinate] = []
    node_order: list[str] = []
    diagnostics: list[str] = []

    for d in n.drive_ports:
        coords.append(Coordinate(d.source_node, Kind.DRIVE, (d.source_node,)))
        node_order.append(d.source_node)

    floating_ordinal = 0
    for j in n.junctions:
        if j.floating:
            floating_ordinal += 1
            name = j.name if j.name is not None else str(floating_ordinal)
            pair = (j.node_a, j.node_b)
            coords.append(Coordinate(f"{name}p", Kind.FREE_PLUS, pair))
            coords.append(Coordinate(f"{name}m", Kind.QUBIT_MINUS, pair))
            node_order.extend(pair)
        else:
            coords.append(Coordinate(j.node_a, Kind.GROUNDED, (j.node_a,)))
            node_order.append(j.node_a)

    placed = set(node_order)
    for node in n.nodes:
        if node not in placed:
            coords.append(Coordinate(node, Kind.GROUNDED, (node,)))
            node_order.append(node)
            diagnostics.append(f"node {node} has no junction and no drive; retained as a spectator")

    labels = [c.label for c in coords]
    if len(set(labels)) != len(labels):
        dup = sorted({x for x in labels if labels.count(x) > 1})
        raise ValueError(f"mode label collision: {dup}; rename nodes or set junction name=")

    size = len(node_order)
    pos = {node: i for i, node in enumerate(node_order)}
    s = [[0] * size for _ in range(size)]
    for row, c in enumerate(coords):
        if len(c.nodes) == 1:
            s[row][pos[c.nodes[0]]] = 1
        else:
            a, b = (pos[x] for x in c.nodes)
            sign = 1 if c.kind is Kind.FREE_PLUS else -1
            s[row][a] = 1
            s[row][b] = sign
    return ModeSystem(Matrix(s, labels), tuple(node_order), tuple(coords), n, tuple(diagnostics))


def transform(c_prime: Matrix, ms: ModeSystem) -> Matrix:
    """Express the node-space matrix in mode coordinates: ``S^-1 C' S^-1``."""
    ordered = c_prime.permute(ms.node_order).relabel(ms.labels)
    return congruence(ordered, ms.transform)


def _check_grounded(ms: ModeSystem) -> None:
    groups = floating_subcircuits(ms.netlist)
    if groups:
        raise FloatingSubcircuitError(sorted(x for g in groups for x in g))


def reduce_schur(c: Matrix, free: tuple[str, ...], retained: tuple[str, ...]) -> Matrix:
    """``C_RR - C_RF C_FF^-1 C_FR``."""
    c_rr = submatrix(c, retained)
    if not free:
        return c_rr
    c_ff_inv = invert(submatrix(c, free))
    f = c_ff_inv.labels
    r = c_rr.labels
    c_rf = block(c, r, f)
    c_fr = block(c, f, r)
    inv = c_ff_inv.rows
    nf, nr = len(f), len(r)
    # X = C_FF^-1 C_FR
    x = [[sum((inv[i][k] * c_fr[k][j] for k in range(nf)), Fraction(0)) for j in range(nr)] for i in range(nf)]
    rows = [
        [c_rr.rows[i][j] - sum((c_rf[i][k] * x[k][j] for k in range(nf)), Fraction(0)) for j in range(nr)]
        for i in range(nr)
    ]
    return Matrix(rows, c_rr.labels)


def reduce_by_inversion(c: Matrix, retained: tuple[str, ...]) -> Matrix:
    """Invert, drop the free-mode rows and columns, invert back."""
    return invert(submatrix(invert(c), retained))


def reduce(c: Matrix, ms: ModeSystem, *, method: str = "schur", verify: bool = False) -> ReducedSystem:
    """Eliminate free modes from the transformed matrix ``c``.

    ``method`` is ``"schur"`` or ``"inverse"``; ``verify`` computes both and
    raises :class:`ReductionMismatch` if they differ.
    """
    _check_grounded(ms)
    free, retained = ms.free, ms.retained
    try:
        if method == "schur":
            c_r = reduce_schur(c, free, retained)
        elif method == "inverse":
            c_r = reduce_by_inversion(c, retained)
        else:
            raise ValueError(f"unknown reduction method {method!r}")
        if verify:
            other = reduce_by_inversion(c, retained) if method == "schur" else reduce_schur(c, free, retained)
            if other != c_r:
                raise ReductionMismatch("Schur complement and inverse-restrict-inverse disagree")
    except SingularMatrixError as exc:
        if isinstance(exc, FloatingSubcircuitError):
            raise
        raise FloatingSubcircuitError(list(ms.node_order)) from exc
    return ReducedSystem(c_r, free, c, ms)


def quantize(n: Netlist, *, method: str = "schur", verify: bool = False) -> ReducedSystem:
    ms = build_modes(n)
    return reduce(transform(assemble(n), ms), ms, method=method, verify=verify)
