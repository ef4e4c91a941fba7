"""Lumped circuit descriptions: the line-based netlist format and canonical circuits.

Document format (UTF-8, one statement per line, ``#`` starts a comment).
Values are decimal literals; ``p/q`` is also accepted so that every exact
value can be written back out::

    node <id> [<id> ...]
    cap <idA> <idB> <value_fF>          # idB may be gnd
    jj <idA> <idB> [EJ=<GHz>] [name=<id>]
    drive <name> <source_node_id>

``name=`` on a junction sets the prefix of its mode labels (``<name>p`` and
``<name>m``); unnamed floating junctions are numbered 1, 2, ... in order.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

from .ratmat import RationalError, as_rational, rational_from_decimal

GND = "gnd"
_ID_RE = re.compile(r"[A-Za-z0-9_]+")
_RATIO_RE = re.compile(r"([+-]?\d+)/(\d+)")


class NetlistError(ValueError):
    """Invalid netlist; carries the 1-based line and column when parsing."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.message = message
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(where + message)


@dataclass(frozen=True)
class Capacitor:
    node_a: str
    node_b: str
    value: Fraction  # fF


@dataclass(frozen=True)
class Junction:
    node_a: str
    node_b: str
    josephson_energy: Fraction | None = None  # GHz, informational only
    name: str | None = None

    @property
    def floating(self) -> bool:
        return self.node_b != GND


@dataclass(frozen=True)
class DrivePort:
    name: str
    source_node: str


@dataclass(frozen=True)
class Netlist:
    nodes: tuple[str, ...]
    capacitors: tuple[Capacitor, ...] = ()
    junctions: tuple[Junction, ...] = ()
    drive_ports: tuple[DrivePort, ...] = ()

    def __post_init__(self):
        validate(self)

    def capacitance(self, a: str, b: str) -> Fraction:
        """Total capacitance directly between ``a`` and ``b`` (0 if none)."""
        return sum(
            (c.value for c in self.capacitors if {c.node_a, c.node_b} == {a, b}),
            Fraction(0),
        )

    def neighbours(self, node: str) -> set[str]:
        out = set()
        for c in self.capacitors:
            if c.node_a == node:
                out.add(c.node_b)
            elif c.node_b == node:
                out.add(c.node_a)
        return out

    def junction_of(self, node: str) -> Junction | None:
        for j in self.junctions:
            if node in (j.node_a, j.node_b):
                return j
        return None


def _check_id(ident: str, what: str) -> None:
    if not _ID_RE.fullmatch(ident):
        raise NetlistError(f"invalid {what} id {ident!r}")


def validate(n: Netlist) -> None:
    seen: set[str] = set()
    for node in n.nodes:
        _check_id(node, "node")
        if node == GND:
            raise NetlistError("'gnd' is reserved and cannot be declared")
        if node in seen:
            raise NetlistError(f"duplicate node {node!r}")
        seen.add(node)
    known = seen | {GND}

    for c in n.capacitors:
        for end in (c.node_a, c.node_b):
            if end not in known:
                raise NetlistError(f"unknown node {end!r}")
        if c.node_a == c.node_b:
            raise NetlistError(f"self-capacitor on node {c.node_a!r}")
        if c.value <= 0:
            raise NetlistError(f"non-positive capacitance {c.value} between {c.node_a} and {c.node_b}")

    in_junction: set[str] = set()
    for j in n.junctions:
        for end in (j.node_a, j.node_b):
            if end not in known:
                raise NetlistError(f"unknown node {end!r}")
        if j.node_a == GND:
            raise NetlistError("junction first terminal must not be gnd")
        if j.node_a == j.node_b:
            raise NetlistError(f"junction shorts node {j.node_a!r} to itself")
        if j.josephson_energy is not None and j.josephson_energy <= 0:
            raise NetlistError("Josephson energy must be positive")
        if j.name is not None:
            _check_id(j.name, "junction name")
        for end in (j.node_a, j.node_b):
            if end == GND:
                continue
            if end in in_junction:
                raise NetlistError(f"node {end!r} is in more than one junction")
            in_junction.add(end)

    drive_names: set[str] = set()
    for d in n.drive_ports:
        _check_id(d.name, "drive")
        if d.name in drive_names:
            raise NetlistError(f"duplicate drive port {d.name!r}")
        drive_names.add(d.name)
        if d.source_node not in seen:
            raise NetlistError(f"unknown node {d.source_node!r}")
        if d.source_node in in_junction:
            raise NetlistError(f"drive source {d.source_node!r} must not be in a junction")
        if not any(d.source_node in (c.node_a, c.node_b) for c in n.capacitors):
            raise NetlistError(f"drive source {d.source_node!r} has no capacitor")
    sources = [d.source_node for d in n.drive_ports]
    if len(set(sources)) != len(sources):
        raise NetlistError("two drive ports share a source node")


def _split(line: str) -> list[tuple[str, int]]:
    """Whitespace tokens with their 1-based columns."""
    return [(m.group(), m.start() + 1) for m in re.finditer(r"\S+", line)]


def parse(text: str) -> Netlist:
    nodes: list[str] = []
    caps: list[Capacitor] = []
    jjs: list[Junction] = []
    drives: list[DrivePort] = []
    declared: set[str] = set()
    origin: dict[str, tuple[int, int]] = {}

    def need_node(tok: str, lineno: int, col: int, allow_gnd: bool = True) -> str:
        if tok == GND and allow_gnd:
            return tok
        if tok not in declared:
            raise NetlistError(f"unknown node {tok!r}", lineno, col)
        return tok

    def value(tok: str, lineno: int, col: int) -> Fraction:
        try:
            return parse_value(tok)
        except (RationalError, ZeroDivisionError):
            raise NetlistError(f"malformed number {tok!r}", lineno, col) from None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        toks = _split(line)
        if not toks:
            continue
        kw, kcol = toks[0]
        args = toks[1:]
        if kw == "node":
            if not args:
                raise NetlistError("'node' needs at least one id", lineno, kcol)
            for tok, col in args:
                if not _ID_RE.fullmatch(tok):
                    raise NetlistError(f"invalid node id {tok!r}", lineno, col)
                if tok == GND:
                    raise NetlistError("'gnd' is reserved", lineno, col)
                if tok in declared:
                    raise NetlistError(f"duplicate node {tok!r}", lineno, col)
                declared.add(tok)
                nodes.append(tok)
        elif kw == "cap":
            if len(args) != 3:
                raise NetlistError("expected: cap <idA> <idB> <value_fF>", lineno, kcol)
            (a, ca), (b, cb), (v, cv) = args
            need_node(a, lineno, ca)
            need_node(b, lineno, cb)
            if a == b:
                raise NetlistError(f"self-capacitor on node {a!r}", lineno, cb)
            val = value(v, lineno, cv)
            if val <= 0:
                raise NetlistError(f"non-positive capacitance {v}", lineno, cv)
            caps.append(Capacitor(a, b, val))
        elif kw == "jj":
            if len(args) < 2:
                raise NetlistError("expected: jj <idA> <idB> [EJ=<GHz>] [name=<id>]", lineno, kcol)
            (a, ca), (b, cb) = args[:2]
            need_node(a, lineno, ca, allow_gnd=False)
            need_node(b, lineno, cb)
            if a == b:
                raise NetlistError(f"junction shorts node {a!r} to itself", lineno, cb)
            ej = None
            name = None
            for tok, col in args[2:]:
                key, sep, val = tok.partition("=")
                if not sep:
                    raise NetlistError(f"unexpected token {tok!r}", lineno, col)
                if key == "EJ" and ej is None:
                    ej = value(val, lineno, col + 3)
                    if ej <= 0:
                        raise NetlistError("Josephson energy must be positive", lineno, col + 3)
                elif key == "name" and name is None:
                    if not _ID_RE.fullmatch(val):
                        raise NetlistError(f"invalid junction name {val!r}", lineno, col + 5)
                    name = val
                else:
                    raise NetlistError(f"unexpected option {key!r}", lineno, col)
            for end, col in ((a, ca), (b, cb)):
                if end != GND and end in origin:
                    raise NetlistError(f"node {end!r} is in more than one junction", lineno, col)
            for end, col in ((a, ca), (b, cb)):
                if end != GND:
                    origin[end] = (lineno, col)
            jjs.append(Junction(a, b, ej, name))
        elif kw == "drive":
            if len(args) != 2:
                raise NetlistError("expected: drive <name> <source_node_id>", lineno, kcol)
            (nm, cn), (src, cs) = args
            if not _ID_RE.fullmatch(nm):
                raise NetlistError(f"invalid drive name {nm!r}", lineno, cn)
            need_node(src, lineno, cs, allow_gnd=False)
            drives.append(DrivePort(nm, src))
        else:
            raise NetlistError(f"unknown statement {kw!r}", lineno, kcol)

    return Netlist(tuple(nodes), tuple(caps), tuple(jjs), tuple(drives))


def render(n: Netlist) -> str:
    """Inverse of :func:`parse`; values are printed exactly (as decimals when finite)."""
    lines = []
    if n.nodes:
        lines.append("node " + " ".join(n.nodes))
    for c in n.capacitors:
        lines.append(f"cap {c.node_a} {c.node_b} {format_value(c.value)}")
    for j in n.junctions:
        parts = ["jj", j.node_a, j.node_b]
        if j.josephson_energy is not None:
            parts.append(f"EJ={format_value(j.josephson_energy)}")
        if j.name is not None:
            parts.append(f"name={j.name}")
        lines.append(" ".join(parts))
    for d in n.drive_ports:
        lines.append(f"drive {d.name} {d.source_node}")
    return "\n".join(lines) + "\n"


def parse_value(tok: str) -> Fraction:
    """Decimal literal, or ``p/q`` for values with no finite decimal form."""
    m = _RATIO_RE.fullmatch(tok)
    if m:
        return Fraction(int(m.group(1)), int(m.group(2)))
    return rational_from_decimal(tok)


def format_value(x: Fraction) -> str:
    """Exact literal for ``x``: a decimal when one exists, otherwise ``p/q``."""
    num, den = x.numerator, x.denominator
    twos = fives = 0
    d = den
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d != 1:
        return f"{num}/{den}"
    places = max(twos, fives)
    if places == 0:
        return str(num)
    scaled = num * 10**places // den
    sign = "-" if scaled < 0 else ""
    digits = str(abs(scaled)).rjust(places + 1, "0")
    out = f"{sign}{digits[:-places]}.{digits[-places:]}".rstrip("0")
    return out


# --- canonical circuits -------------------------------------------------------


def _caps(spec: list[tuple[str, str, Fraction | int | str]]) -> tuple[Capacitor, ...]:
    out = []
    for a, b, v in spec:
        v = as_rational(v)
        if v < 0:
            raise NetlistError(f"negative capacitance between {a} and {b}")
        if v != 0:
            out.append(Capacitor(a, b, v))
    return tuple(out)


def _positive(**kw) -> dict[str, Fraction]:
    out = {}
    for k, v in kw.items():
        v = as_rational(v)
        if v <= 0:
            raise NetlistError(f"{k} must be positive, got {v}")
        out[k] = v
    return out


def build_direct_coupled(
    C_d, C_q, C_g1, C_g2=None, C_g3=None, C_g4=None, C_c1=0, C_c2=0, C_q2=None
) -> Netlist:
    """Two floating transmons (1,2) and (3,4) coupled by C_c1 (1-3) and C_c2 (2-4).

    The drive source ``d`` couples to node 1 through ``C_d``. Island caps
    default to ``C_g1`` and the second shunt to ``C_q``. Zero couplings are
    omitted; if both are zero a ``UserWarning`` is issued.
    """
    g1 = C_g1
    p = _positive(
        C_d=C_d,
        C_q=C_q,
        C_q2=C_q if C_q2 is None else C_q2,
        C_g1=g1,
        C_g2=g1 if C_g2 is None else C_g2,
        C_g3=g1 if C_g3 is None else C_g3,
        C_g4=g1 if C_g4 is None else C_g4,
    )
    c1, c2 = as_rational(C_c1), as_rational(C_c2)
    if c1 == 0 and c2 == 0:
        warnings.warn("C_c1 and C_c2 are both zero: the qubits are disconnected", stacklevel=2)
    caps = _caps([
        ("d", "1", p["C_d"]),
        ("1", "2", p["C_q"]),
        ("3", "4", p["C_q2"]),
        ("1", GND, p["C_g1"]),
        ("2", GND, p["C_g2"]),
        ("3", GND, p["C_g3"]),
        ("4", GND, p["C_g4"]),
        ("1", "3", c1),
        ("2", "4", c2),
    ])
    return Netlist(
        ("d", "1", "2", "3", "4"),
        caps,
        (Junction("1", "2", name="1"), Junction("3", "4", name="2")),
        (DrivePort("d", "d"),),
    )


def build_grounded_bus(
    C_d, C_q, C_g1, C_c1, C_t, C_g2=None, C_g3=None, C_g4=None, C_c2=None
) -> Netlist:
    """Floating qubits (1,2) and (3,4) coupled through a grounded bus node ``t``.

    ``t`` has a junction and shunt ``C_t`` to ground and couples to islands 1
    and 3 through ``C_c1`` and ``C_c2`` (default ``C_c1``).
    """
    g1 = C_g1
    p = _positive(
        C_d=C_d,
        C_q=C_q,
        C_t=C_t,
        C_g1=g1,
        C_g2=g1 if C_g2 is None else C_g2,
        C_g3=g1 if C_g3 is None else C_g3,
        C_g4=g1 if C_g4 is None else C_g4,
    )
    c1 = as_rational(C_c1)
    c2 = c1 if C_c2 is None else as_rational(C_c2)
    if c1 == 0 and c2 == 0:
        warnings.warn("bus couplings are both zero: the qubits are disconnected", stacklevel=2)
    caps = _caps([
        ("d", "1", p["C_d"]),
        ("1", "2", p["C_q"]),
        ("3", "4", p["C_q"]),
        ("1", GND, p["C_g1"]),
        ("2", GND, p["C_g2"]),
        ("3", GND, p["C_g3"]),
        ("4", GND, p["C_g4"]),
        ("t", GND, p["C_t"]),
        ("1", "t", c1),
        ("3", "t", c2),
    ])
    return Netlist(
        ("d", "1", "2", "t", "3", "4"),
        caps,
        (Junction("1", "2", name="1"), Junction("t", GND), Junction("3", "4", name="2")),
        (DrivePort("d", "d"),),
    )


def build_floating_bus(
    C_d, C_q, C_g1, C_c1, C_t, C_b1, C_g2=None, C_g3=None, C_g4=None, C_c2=None, C_b2=None
) -> Netlist:
    """Floating qubits (1,2) and (5,6) coupled through a floating bus (3,4).

    The bus junction is shunted by ``C_t``; each bus island has ``C_b1`` /
    ``C_b2`` to ground. Couplings: 1-3 through ``C_c1`` and 4-5 through
    ``C_c2`` (default ``C_c1``). Bus modes are labelled ``tp`` / ``tm``.
    """
    g1 = C_g1
    p = _positive(
        C_d=C_d,
        C_q=C_q,
        C_t=C_t,
        C_b1=C_b1,
        C_b2=C_b1 if C_b2 is None else C_b2,
        C_g1=g1,
        C_g2=g1 if C_g2 is None else C_g2,
        C_g3=g1 if C_g3 is None else C_g3,
        C_g4=g1 if C_g4 is None else C_g4,
    )
    c1 = as_rational(C_c1)
    c2 = c1 if C_c2 is None else as_rational(C_c2)
    if c1 == 0 and c2 == 0:
        warnings.warn("bus couplings are both zero: the qubits are disconnected", stacklevel=2)
    caps = _caps([
        ("d", "1", p["C_d"]),
        ("1", "2", p["C_q"]),
        ("5", "6", p["C_q"]),
        ("1", GND, p["C_g1"]),
        ("2", GND, p["C_g2"]),
        ("5", GND, p["C_g3"]),
        ("6", GND, p["C_g4"]),
        ("3", "4", p["C_t"]),
        ("3", GND, p["C_b1"]),
        ("4", GND, p["C_b2"]),
        ("1", "3", c1),
        ("4", "5", c2),
    ])
    return Netlist(
        ("d", "1", "2", "3", "4", "5", "6"),
        caps,
        (Junction("1", "2", name="1"), Junction("3", "4", name="t"), Junction("5", "6", name="2")),
        (DrivePort("d", "d"),),
    )


class Coupling(str, Enum):
    SAME = "same"
    OPPOSITE = "opposite"


@dataclass(frozen=True)
class LayoutPreset:
    """One layout cell: island caps C_g / lambda*C_g, coupling r*C_g on one side."""

    coupling_side: Coupling
    r: Fraction
    lam: Fraction = Fraction(1)
    C_g: Fraction = Fraction(100)
    symmetric: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "coupling_side", Coupling(self.coupling_side))
        for k in ("r", "lam", "C_g"):
            object.__setattr__(self, k, as_rational(getattr(self, k)))
        if self.r < 0:
            raise ValueError("capacitance ratio r must be non-negative")
        if self.lam < 1:
            raise ValueError("island asymmetry lambda must be >= 1")
        if self.C_g <= 0:
            raise ValueError("C_g must be positive")
        object.__setattr__(self, "symmetric", self.lam == 1)

    @property
    def C_c1(self) -> Fraction:
        return self.r * self.C_g if self.coupling_side is Coupling.SAME else Fraction(0)

    @property
    def C_c2(self) -> Fraction:
        return self.r * self.C_g if self.coupling_side is Coupling.OPPOSITE else Fraction(0)


def from_preset(p: LayoutPreset, C_d=1, C_q=70) -> Netlist:
    lg = p.lam * p.C_g
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return build_direct_coupled(
            C_d, C_q, p.C_g, C_g2=lg, C_g3=p.C_g, C_g4=lg, C_c1=p.C_c1, C_c2=p.C_c2
        )
